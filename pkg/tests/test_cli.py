import csv
import io
import json

import numpy as np
import pytest

from matchhelper import cli
from matchhelper.instances import ParseError, dump_instance, example1, load_instance
from matchhelper.prob import ValidationError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, doc, name="inst.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc), encoding="utf-8")
    return str(path)


@pytest.mark.parametrize("ref", ["example1:δ=0.25", "example1:delta=0.25", "example1:d=0.25"])
def test_load_builtin(ref):
    inst = load_instance(ref)
    np.testing.assert_allclose(inst.joint.matrix,
                               np.array([[0, .75, .25], [.75, 0, .25], [.25, .25, .5]]) / 3)
    assert inst.function[0, 0] is None and inst.function[2, 2] == 2


def test_load_builtin_needs_delta():
    with pytest.raises(ValidationError):
        load_instance("example1")
    assert load_instance("example1", delta=0.1).delta == 0.1
    with pytest.raises(ValidationError):
        load_instance("example1:delta=0.5")


def test_load_file_round_trip(tmp_path):
    inst = example1(0.2)
    back = load_instance(write(tmp_path, dump_instance(inst)))
    np.testing.assert_array_equal(back.joint.matrix, inst.joint.matrix)
    assert back.function == inst.function


def test_load_rejects_bad_sum(tmp_path):
    doc = {"matrix": [[0.49, 0.0], [0.0, 0.5]], "function": [[0, 1], [1, 0]]}
    with pytest.raises(ValidationError, match="sum to 1"):
        load_instance(write(tmp_path, doc))


def test_load_rejects_dont_care_on_positive_cell(tmp_path):
    doc = {"matrix": [[0.5, 0.0], [0.0, 0.5]], "function": [[None, 1], [1, 0]]}
    with pytest.raises(ValidationError):
        load_instance(write(tmp_path, doc))


def test_parse_error_has_position(tmp_path):
    with pytest.raises(ParseError) as exc:
        load_instance(write(tmp_path, '{"matrix": [[1.0]],\n  "function": [[0]'))
    assert exc.value.line == 2 and exc.value.column is not None


def test_rates_example(capsys, tmp_path):
    out_csv = tmp_path / "row.csv"
    code, out, _ = run(capsys, "rates", "--instance", "example1:δ=0.25", "--out", str(out_csv))
    assert code == 0
    vals = {}
    for line in out.splitlines():
        parts = line.rsplit(None, 1)
        try:
            vals[parts[0].strip()] = float(parts[1])
        except (ValueError, IndexError):
            pass
    assert vals["sum rate"] == pytest.approx(2.0, abs=1e-6)
    assert vals["fullyDistributed"] == pytest.approx(2.625814, abs=1e-6)
    assert vals["functionEntropy"] == pytest.approx(0.5 + 0.5 * np.log2(6), abs=1e-6)
    row = list(csv.DictReader(out_csv.open(encoding="utf-8")))[0]
    assert float(row["sum_rate"]) == pytest.approx(2.0, abs=1e-9)


def test_rates_constant_function(capsys, tmp_path):
    doc = {"matrix": [[0.25, 0.25], [0.25, 0.25]], "function": [["a", "a"], ["a", "a"]]}
    code, out, _ = run(capsys, "rates", "--instance", write(tmp_path, doc))
    assert code == 0
    assert "functionEntropy  0.000000" in out
    for line in out.splitlines()[2:]:
        assert float(line.split()[-1]) >= 0


@pytest.mark.parametrize("scheme", ["theorem1", "theorem2"])
def test_rates_matching_schemes(capsys, tmp_path, scheme):
    # example1 has a non-matched component, which both matching-only schemes reject
    code, _, err = run(capsys, "rates", "--instance", "example1:delta=0.25", "--scheme", scheme)
    assert code == 1 and "perfect matching" in err
    doc = {"matrix": [[0.3, 0.1], [0.2, 0.4]], "function": [[0, 1], [1, 0]]}
    code, out, _ = run(capsys, "rates", "--instance", write(tmp_path, doc), "--scheme", scheme)
    assert code == 0 and "sum rate" in out


def test_rates_bad_path(capsys, tmp_path):
    code, _, err = run(capsys, "rates", "--instance", str(tmp_path / "missing.json"))
    assert code == 3 and "error" in err


def test_decompose_prints_weights(capsys):
    code, out, _ = run(capsys, "decompose", "--instance", "example1:delta=0.3")
    assert code == 0
    assert "weight 0.600000" in out and "weight 0.400000" in out


def test_sweep_rows(capsys):
    code, out, _ = run(capsys, "sweep", "--grid", "0.01:0.49:0.01")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 49
    assert [float(r["delta"]) for r in rows] == pytest.approx(np.arange(1, 50) / 100)
    assert float(rows[-1]["loss_vs_Hf"]) == pytest.approx(0.25, abs=0.01)


def test_sweep_csv_round_trips():
    rows = cli.sweep("example1", [0.05, 0.2, 0.35])
    back = list(csv.DictReader(io.StringIO(cli.sweep_csv(rows))))
    for r, b in zip(rows, back):
        again = cli.sweep_row("example1", float(b["delta"]))
        for col in cli.SWEEP_COLUMNS:
            assert float(b[col]) == pytest.approx(again[col], abs=5e-10)
            assert f"{r[col]:.9f}" == b[col]


def test_sweep_order_independent_of_jobs():
    grid = cli.parse_grid("0.05:0.45:0.05")
    assert cli.sweep_csv(cli.sweep("example1", grid, jobs=4)) == \
        cli.sweep_csv(cli.sweep("example1", grid, jobs=1))


@pytest.mark.parametrize("grid", ["", "0.3:0.1:0.05", "0:0.2:0.1", "0.1:0.5:0.1", "0.2,0.7", "a:b:c"])
def test_sweep_bad_grid(capsys, grid):
    code, _, err = run(capsys, "sweep", "--grid", grid)
    assert code == 1 and err


def test_parse_grid_forms():
    assert cli.parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    assert cli.parse_grid("0.2, 0.4") == [0.2, 0.4]


def test_simulate(capsys):
    argv = ("simulate", "--instance", "example1:delta=0.3", "--samples", "10000", "--seed", "7")
    code, out, _ = run(capsys, *argv)
    assert code == 0 and "errors=0" in out
    assert run(capsys, *argv)[1] == out


def test_simulate_zero_samples(capsys):
    code, _, err = run(capsys, "simulate", "--instance", "example1:delta=0.3", "--samples", "0")
    assert code == 1 and err


def test_simulate_undecodable_exit(capsys, tmp_path):
    doc = {"matrix": [[0.5, 0.0], [0.0, 0.5]], "function": [[0, None], [None, 1]]}
    code, _, err = run(capsys, "simulate", "--instance", write(tmp_path, doc),
                       "--scheme", "fullyDistributed", "--samples", "100")
    assert code == 2 and "error" in err
