import csv
import io
import json

import numpy as np
import pytest

from rqkp import bench as B
from rqkp.cli import main, verify
from rqkp.generate import GenSpec, InstanceType, generate
from rqkp.model import feasibility_check, reduce
from rqkp.serialize import parse_instance, parse_report, serialize_instance


def test_generate_deterministic():
    s1 = serialize_instance(generate(GenSpec(InstanceType.TYPE_II, 5, 42)))
    s2 = serialize_instance(generate(GenSpec(InstanceType.TYPE_II, 5, 42)))
    assert s1 == s2
    assert s1 != serialize_instance(generate(GenSpec(InstanceType.TYPE_II, 5, 43)))


@pytest.mark.parametrize("typ", [1, 2])
def test_generate_ranges(typ):
    for seed in range(50):
        g = generate(GenSpec(typ, 40, seed))
        width = g.u - g.l
        assert np.all((g.l >= 0) & (g.l <= 20))
        assert np.all((width >= 1) & (width <= 100))
        assert np.all(g.q == 1) and np.all(g.a != 0)
        for v in (g.a, g.c, g.l, g.u, [g.b]):
            assert np.all(np.asarray(v) == np.round(v))
        if typ == 2:
            assert np.all((g.a >= 1) & (g.a <= 50))
            assert np.all((g.c >= -50) & (g.c <= -1))
        else:
            assert np.all((g.a >= -50) & (g.a <= 50))
            assert np.all((g.c >= -50) & (g.c <= 50))
        assert feasibility_check(reduce(g))


def test_genspec_validation():
    with pytest.raises(ValueError):
        GenSpec(1, 0, 1)
    with pytest.raises(ValueError):
        GenSpec(3, 5, 1)


def test_bench_rows():
    rows = B.bench([500], 2, [1], seed=0)
    assert len(rows) == 2
    assert all(r.gap <= 1e-6 * (1 + abs(r.objective)) for r in rows)
    assert B.check_rows(rows) is None
    text = B.to_csv(rows)
    body = [line for line in text.splitlines() if line and not line.startswith("#")]
    parsed = list(csv.reader(body))
    assert parsed[0] == list(B.HEADER)
    assert all(len(row) == 8 for row in parsed)


def test_bench_empty():
    assert B.bench([], 3, [1, 2], seed=0) == []
    assert B.to_csv([]) == ",".join(B.HEADER) + "\n"


def test_rep_seeds_distinct():
    seeds = {B.rep_seed(0, n, t, k) for n in (500, 750) for t in (1, 2) for k in range(10)}
    assert len(seeds) == 40


def test_verify_function():
    failures, worst = verify(6, 40, seed=2)
    assert failures == [] and worst <= 1e-6


def test_cli_gen_and_solve(tmp_path, capsys):
    inst = tmp_path / "f.json"
    out = tmp_path / "sol.json"
    assert main(["gen", "--type", "2", "--n", "10", "--seed", "7", "--out", str(inst)]) == 0
    parse_instance(inst.read_text())
    trace = tmp_path / "t.csv"
    code = main(["solve", "--input", str(inst), "--output", str(out),
                 "--trace-events", str(trace)])
    assert code == 0
    rep = parse_report(out.read_text())
    assert rep.status.value == "OPTIMAL"
    lines = trace.read_text().splitlines()
    assert lines[0] == "lambda,id_low,id_high,phi"
    assert len(lines) - 1 == rep.events_processed


def test_cli_infeasible_exit(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"form": "reduced", "n": 1, "a": [1], "b": 5, "c": [0], "u": [1]}))
    assert main(["solve", "--input", str(f), "--output", str(tmp_path / "o")]) == 3


def test_cli_missing_input(capsys):
    assert main(["solve", "--input", "/nonexistent/file"]) == 64
    assert "cannot read" in capsys.readouterr().err


def test_cli_parse_error(tmp_path, capsys):
    f = tmp_path / "x.json"
    f.write_text('{"form": "reduced", "n": 1, "a": [1], "c": [0], "u": [1]}')
    assert main(["solve", "--input", str(f)]) == 64
    assert "field 'b'" in capsys.readouterr().err


def test_cli_unknown_flag(capsys):
    assert main(["solve", "--bogus"]) == 64
    assert "usage" in capsys.readouterr().err


def test_cli_verify(capsys):
    assert main(["verify", "--n-max", "4", "--trials", "50", "--seed", "1"]) == 0
    assert capsys.readouterr().out.startswith("PASS")


def test_cli_bench_empty(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--sizes", "", "--out", str(out)]) == 0
    assert out.read_text() == "n,type,seed,time_ms,events,phase,objective,gap\n"


def test_cli_phi_scan(tmp_path, capsys):
    f = tmp_path / "ex.json"
    f.write_text(json.dumps({"form": "reduced", "n": 5, "a": [-7, -5, 7, -5, 7], "b": 0,
                             "c": [54, 44, 15, -8, -70], "u": [62, 48, 36, 84, 59]}))
    assert main(["phi-scan", "--input", str(f), "--lo", "-8.36", "--hi", "7",
                 "--points", "11"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["lambda", "phi", "piece"] and len(rows) == 12
