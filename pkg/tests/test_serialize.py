import json

import numpy as np
import pytest

from rqkp.driver import solve
from rqkp.exceptions import ParseError
from rqkp.generate import GenSpec, generate
from rqkp.model import GeneralInstance, ReducedInstance
from rqkp.serialize import parse_instance, parse_report, serialize_instance, serialize_report


def test_general_round_trip(rng):
    n = 7
    g = GeneralInstance(q=rng.normal(size=n), a=rng.normal(size=n), b=rng.normal(),
                        c=rng.normal(size=n), l=-rng.random(n), u=rng.random(n))
    back = parse_instance(serialize_instance(g))
    assert isinstance(back, GeneralInstance)
    for name in ("q", "a", "c", "l", "u"):
        np.testing.assert_array_equal(getattr(back, name), getattr(g, name))
    assert back.b == g.b


def test_reduced_round_trip(rng):
    r = ReducedInstance(a=rng.normal(size=4), b=0.1, c=rng.normal(size=4), u=rng.random(4) + 0.1)
    back = parse_instance(serialize_instance(r))
    assert isinstance(back, ReducedInstance)
    np.testing.assert_array_equal(back.a, r.a)
    np.testing.assert_array_equal(back.u, r.u)
    assert back.b == r.b


def test_missing_b_names_field():
    text = json.dumps({"form": "reduced", "n": 1, "a": [1], "c": [1], "u": [1]})
    with pytest.raises(ParseError) as err:
        parse_instance(text)
    assert err.value.field == "b"
    assert "b" in str(err.value)


def test_bad_json_reports_line():
    with pytest.raises(ParseError) as err:
        parse_instance('{\n  "form": "reduced",\n  "n": ,\n}')
    assert err.value.line == 3


def test_length_mismatch():
    text = json.dumps({"form": "reduced", "n": 2, "a": [1], "b": 0, "c": [1, 2], "u": [1, 1]})
    with pytest.raises(ParseError):
        parse_instance(text)


def test_unknown_form():
    with pytest.raises(ParseError):
        parse_instance(json.dumps({"form": "other"}))


def test_report_round_trip():
    rep = solve(generate(GenSpec(2, 20, 3)))
    back = parse_report(serialize_report(rep))
    assert back.same_result(rep)
    assert back.time_ms == rep.time_ms
