"""Timing harness over generated instances; writes one CSV row per solve."""

import io
from dataclasses import astuple, dataclass
from typing import Iterable, List, Optional

from .config import DEFAULT, SolverConfig
from .driver import solve
from .generate import GenSpec, InstanceType, generate
from .model import Status

HEADER = ("n", "type", "seed", "time_ms", "events", "phase", "objective", "gap")
TABLE_SIZES = (500, 750, 1000, 2000, 5000, 10000, 30000, 50000)


@dataclass(frozen=True)
class BenchRow:
    n: int
    type: int
    seed: int
    time_ms: float
    events: int
    phase: int
    objective: float
    gap: float
    status: str = Status.OPTIMAL.value


class BenchFailure(RuntimeError):
    pass


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def rep_seed(seed: int, n: int, typ: int, rep: int) -> int:
    """Per-solve seed; distinct for every (n, type, rep) of a run."""
    return (seed * 1_000_003 + n * 7_919 + typ * 104_729 + rep) & 0xFFFFFFFFFFFFFFFF


def warm_up():
    """Trigger compilation of the sweep kernels outside any timed region."""
    solve(generate(GenSpec(InstanceType.TYPE_I, 8, 0)))


def bench(sizes: Iterable[int], reps: int, types: Iterable[int], seed: int,
          cfg: SolverConfig = DEFAULT, progress=None) -> List[BenchRow]:
    sizes = list(sizes)
    types = [InstanceType(t) for t in types]
    rows = []
    if sizes:
        warm_up()
    for n in sizes:
        for typ in types:
            for rep in range(reps):
                s = rep_seed(seed, n, int(typ), rep)
                inst = generate(GenSpec(typ, n, s))
                out = solve(inst, cfg)
                row = BenchRow(n=n, type=int(typ), seed=s, time_ms=out.time_ms,
                               events=out.events_processed, phase=out.phase,
                               objective=float(out.objective), gap=float(out.gap),
                               status=out.status.value)
                rows.append(row)
                if progress is not None:
                    progress(row)
    return rows


def to_csv(rows: List[BenchRow], summary: bool = True) -> str:
    buf = io.StringIO()
    buf.write(",".join(HEADER) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in astuple(row)[: len(HEADER)]) + "\n")
    if summary and rows:
        buf.write("\n# summary: n,type,reps,mean_time_ms,mean_events\n")
        keys = sorted({(r.n, r.type) for r in rows})
        for n, t in keys:
            sel = [r for r in rows if r.n == n and r.type == t]
            mt = sum(r.time_ms for r in sel) / len(sel)
            me = sum(r.events for r in sel) / len(sel)
            buf.write(f"# {n},{t},{len(sel)},{mt:.3f},{me:.1f}\n")
    return buf.getvalue()


def check_rows(rows: List[BenchRow]) -> Optional[str]:
    """Message describing the first non-OPTIMAL row, or None."""
    for r in rows:
        if r.status != Status.OPTIMAL.value:
            return f"n={r.n} type={r.type} seed={r.seed} ended {r.status} (gap {r.gap:g})"
    return None
