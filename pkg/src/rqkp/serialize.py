"""Text formats for instances and solve reports.

Both are JSON objects. Floats are written with 17 significant digits so a
parse of the written text reproduces every value bit for bit.
"""

import json

import numpy as np

from .exceptions import ParseError
from .model import GeneralInstance, ReducedInstance, SolveReport, Status

_GENERAL_FIELDS = ("n", "q", "a", "b", "c", "l", "u")
_REDUCED_FIELDS = ("n", "a", "b", "c", "u")
_REPORT_FIELDS = ("status", "x", "objective", "lambda", "gap", "phase",
                  "events_processed", "time_ms")


def _num(v) -> str:
    v = float(v)
    if not np.isfinite(v):
        # JSON has no literal for these; json.loads accepts the JS spellings.
        return "NaN" if np.isnan(v) else ("Infinity" if v > 0 else "-Infinity")
    return format(v, ".17g")


def _arr(values) -> str:
    return "[" + ", ".join(_num(v) for v in values) + "]"


def serialize_instance(inst) -> str:
    if isinstance(inst, GeneralInstance):
        parts = [
            '"form": "general"',
            f'"n": {inst.n}',
            f'"q": {_arr(inst.q)}',
            f'"a": {_arr(inst.a)}',
            f'"b": {_num(inst.b)}',
            f'"c": {_arr(inst.c)}',
            f'"l": {_arr(inst.l)}',
            f'"u": {_arr(inst.u)}',
        ]
    elif isinstance(inst, ReducedInstance):
        if not inst.is_plain:
            raise ValueError("only untransformed reduced instances can be serialized")
        parts = [
            '"form": "reduced"',
            f'"n": {inst.n}',
            f'"a": {_arr(inst.a)}',
            f'"b": {_num(inst.b)}',
            f'"c": {_arr(inst.c)}',
            f'"u": {_arr(inst.u)}',
        ]
    else:
        raise TypeError(f"cannot serialize {type(inst).__name__}")
    return "{\n  " + ",\n  ".join(parts) + "\n}\n"


def _load(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object", line=1)
    return obj


def _line_of(text, key):
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


def _vector(obj, text, key, n):
    val = obj[key]
    if not isinstance(val, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in val
    ):
        raise ParseError("expected a list of numbers", line=_line_of(text, key), field=key)
    if len(val) != n:
        raise ParseError(f"expected {n} entries, found {len(val)}",
                         line=_line_of(text, key), field=key)
    return np.array(val, dtype=float)


def _scalar(obj, text, key, kind=float):
    val = obj[key]
    ok = isinstance(val, (int, float)) and not isinstance(val, bool)
    if kind is int:
        ok = ok and float(val).is_integer()
    if not ok:
        raise ParseError(f"expected {'an integer' if kind is int else 'a number'}",
                         line=_line_of(text, key), field=key)
    return kind(val)


def parse_instance(text: str):
    """Parse either instance form; the ``form`` marker selects the type."""
    obj = _load(text)
    form = obj.get("form")
    if form is None:
        form = "general" if "q" in obj else "reduced"
    if form not in ("general", "reduced"):
        raise ParseError(f"unknown form {form!r}", line=_line_of(text, "form"), field="form")
    required = _GENERAL_FIELDS if form == "general" else _REDUCED_FIELDS
    for key in required:
        if key not in obj:
            raise ParseError("missing required field", field=key)
    n = _scalar(obj, text, "n", int)
    if n < 1:
        raise ParseError("n must be positive", line=_line_of(text, "n"), field="n")
    b = _scalar(obj, text, "b")
    vecs = {k: _vector(obj, text, k, n) for k in required if k not in ("n", "b")}
    try:
        if form == "general":
            return GeneralInstance(q=vecs["q"], a=vecs["a"], b=b, c=vecs["c"],
                                   l=vecs["l"], u=vecs["u"])
        return ReducedInstance(a=vecs["a"], b=b, c=vecs["c"], u=vecs["u"])
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def serialize_report(rep: SolveReport) -> str:
    parts = [
        f'"status": "{Status(rep.status).value}"',
        f'"x": {_arr(rep.x)}',
        f'"objective": {_num(rep.objective)}',
        f'"lambda": {_num(rep.lam)}',
        f'"gap": {_num(rep.gap)}',
        f'"phase": {int(rep.phase)}',
        f'"events_processed": {int(rep.events_processed)}',
        f'"time_ms": {_num(rep.time_ms)}',
    ]
    return "{\n  " + ",\n  ".join(parts) + "\n}\n"


def parse_report(text: str) -> SolveReport:
    obj = _load(text)
    for key in _REPORT_FIELDS:
        if key not in obj:
            raise ParseError("missing required field", field=key)
    try:
        status = Status(obj["status"])
    except ValueError:
        raise ParseError(f"unknown status {obj['status']!r}",
                         line=_line_of(text, "status"), field="status") from None
    x = obj["x"]
    if not isinstance(x, list):
        raise ParseError("expected a list of numbers", line=_line_of(text, "x"), field="x")
    return SolveReport(
        status=status,
        x=np.array(x, dtype=float),
        objective=float(obj["objective"]),
        lam=float(obj["lambda"]),
        gap=float(obj["gap"]),
        phase=_scalar(obj, text, "phase", int),
        events_processed=_scalar(obj, text, "events_processed", int),
        time_ms=float(obj["time_ms"]),
    )
