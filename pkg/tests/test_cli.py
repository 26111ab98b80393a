import json
import math
import subprocess
import sys

import numpy as np
import pytest

from entgeom.cli import main
from entgeom.experiment import (
    CSV_HEADER,
    INJECTED_SEED,
    ExperimentConfig,
    Fig2Row,
    evaluate_pair,
    fmt,
    read_csv,
    run_fig2,
    sort_rows,
    spearman,
    write_csv,
)
from entgeom.geometry import e_normalization
from entgeom.specfile import SpecParseError, literal_spec, parse_spec, spec_to_dict
from entgeom.states import SpecError, bell, build_state, product_basis, random_mixed


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_spec(tmp_path, obj, name="s.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


# spec files

def test_parse_nested_spec():
    spec = parse_spec('{"kind": "compose", "children": [{"kind": "bell"}, {"kind": "ghz", "params": {"n": 3}}]}')
    assert build_state(spec).dims == (2, 2, 2, 2, 2)


def test_syntax_error_has_position():
    with pytest.raises(SpecParseError) as e:
        parse_spec('{"kind": "bell",\n  "params": }')
    assert (e.value.line, e.value.column) == (2, 13)


@pytest.mark.parametrize(
    "text,field",
    [
        ('{"kind": "ghz"}', "params.n"),
        ('{"kind": "cat"}', "kind"),
        ('{"kind": "bell", "colour": 1}', "colour"),
        ('{"kind": "compose", "children": [{"kind": "bell"}, {"kind": "ghz"}]}', "children[1].params.n"),
        ('{"kind": "ghz", "params": {"n": 3, "m": 1}}', "params.m"),
    ],
)
def test_structural_errors_name_field(text, field):
    with pytest.raises(SpecError) as e:
        parse_spec(text)
    assert e.value.field == field


def test_literal_round_trip():
    rho = random_mixed((2, 3), 4)
    back = build_state(parse_spec(json.dumps(spec_to_dict(literal_spec(rho)))))
    assert np.array_equal(back.matrix, rho.matrix) and back.dims == rho.dims


# experiment pieces

def test_fmt_round_trip(rng):
    for x in rng.uniform(0, 4, 200):
        assert float(fmt(x)) == pytest.approx(x, rel=1e-11)
    assert fmt(2.0) == "2.00000000000e+00"


def test_injected_rows():
    row = evaluate_pair(5, INJECTED_SEED, bell(), bell())
    assert (row.concurrence_sum, row.e_normalized) == (pytest.approx(2, abs=1e-12), 2.0)
    zero = product_basis((2, 2), (0, 1))
    row = evaluate_pair(0, 0, zero, zero)
    assert abs(row.concurrence_sum) <= 1e-12 and abs(row.e_normalized) <= 1e-12


def test_normalization_constant():
    assert e_normalization() == pytest.approx(16, abs=1e-12)
    rows, _ = run_fig2(ExperimentConfig(samples=20, seed=2))
    for r in rows:
        assert abs(r.e_normalized - r.e_raw / 16) <= 1e-12


def test_spearman_permutation_invariant(rng):
    rows, summary = run_fig2(ExperimentConfig(samples=40, seed=3))
    shuffled = [rows[i] for i in rng.permutation(len(rows))]
    assert spearman(shuffled) == summary["spearman"]
    assert sort_rows(shuffled) == rows
    assert math.isnan(spearman(rows[:1]))


def test_ties_sort_by_sample_id():
    rows = [Fig2Row(3, 0, 1.0, 0, 0), Fig2Row(1, 0, 1.0, 0, 0), Fig2Row(2, 0, 0.5, 0, 0)]
    assert [r.sample_id for r in sort_rows(rows)] == [2, 1, 3]


def test_csv_round_trip(tmp_path):
    rows, _ = run_fig2(ExperimentConfig(samples=15, seed=4, inject_bell=True))
    write_csv(rows, tmp_path / "a.csv")
    back = read_csv(tmp_path / "a.csv")
    assert [r.sample_id for r in back] == [r.sample_id for r in rows]
    for a, b in zip(rows, back):
        assert b.e_raw == float(fmt(a.e_raw)) and b.concurrence_sum == float(fmt(a.concurrence_sum))
    assert back[-1].seed == INJECTED_SEED


def test_workers_do_not_change_rows():
    serial, _ = run_fig2(ExperimentConfig(samples=12, seed=5))
    threaded, _ = run_fig2(ExperimentConfig(samples=12, seed=5, workers=3))
    assert serial == threaded


def test_config_validation():
    for bad in ({"samples": 0}, {"seed": -2}, {"rank": 5}, {"workers": 0}):
        with pytest.raises(ValueError):
            ExperimentConfig(**bad)


# command line

def test_fig2_command(tmp_path, capsys):
    out, plot = tmp_path / "f.csv", tmp_path / "f.dat"
    code, stdout, _ = run(["fig2", "--samples", "10", "--seed", "7", "--out", str(out), "--plot", str(plot)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 11 and lines[0] == ",".join(CSV_HEADER)
    summary = json.loads(stdout)
    assert summary["rows"] == 10
    data = [l for l in plot.read_text().splitlines() if l and not l.startswith("#")]
    assert len(data) == 10


def test_analyze_command(tmp_path, capsys):
    code, stdout, _ = run(["analyze", "--spec", write_spec(tmp_path, {"kind": "ghz", "params": {"n": 3}})], capsys)
    assert code == 0
    report = json.loads(stdout)
    assert report["e_raw"] == pytest.approx(6, abs=1e-10)


def test_filter_command(tmp_path, capsys):
    spec = write_spec(tmp_path, {"kind": "compose", "children": [{"kind": "bell"}, {"kind": "bell"}]})
    code, stdout, _ = run(["filter", "--spec", spec, "--subset", "0,1"], capsys)
    assert code == 0 and json.loads(stdout)["is_island"] is True
    code, stdout, _ = run(["filter", "--spec", spec, "--subset", "1,2"], capsys)
    assert code == 0 and json.loads(stdout)["is_island"] is False
    code, stdout, _ = run(["filter", "--spec", spec, "--exhaustive"], capsys)
    assert sorted(map(sorted, json.loads(stdout)["partition"])) == [[0, 1], [2, 3]]


def test_categorize_command(tmp_path, capsys):
    spec = write_spec(tmp_path, {"kind": "compose", "children": [{"kind": "bell"}, {"kind": "bell"}]})
    code, stdout, _ = run(["categorize", "--spec", spec], capsys)
    assert code == 0 and json.loads(stdout)["pattern"] == "2-party + 2-party"


def test_random_command_round_trips(tmp_path, capsys):
    code, stdout, _ = run(["random", "--dims", "2,2", "--seed", "9"], capsys)
    assert code == 0
    state = build_state(parse_spec(stdout))
    assert np.array_equal(state.matrix, random_mixed((2, 2), 9).matrix)


def test_monogamy_command(capsys):
    code, stdout, _ = run(["monogamy", "--theta", "0.2"], capsys)
    assert code == 0
    r = json.loads(stdout)
    assert r["metrics"]["AC"] == pytest.approx(2, abs=1e-9)
    assert r["forced_m_ab"] == 0


def test_error_exit_codes(tmp_path, capsys):
    code, _, err = run(["analyze", "--spec", write_spec(tmp_path, {"kind": "ghz"})], capsys)
    assert code == 1 and "params.n" in err
    code, _, err = run(["analyze", "--spec", write_spec(tmp_path, '{"kind": ')], capsys)
    assert code == 1 and "line 1" in err
    code, _, _ = run(["analyze", "--spec", str(tmp_path / "missing.json")], capsys)
    assert code == 1
    assert run(["fig2", "--samples", "0"], capsys)[0] == 1
    assert run(["transmogrify"], capsys)[0] == 2
    assert run(["fig2", "--samples", "many"], capsys)[0] == 2
    assert run([], capsys)[0] == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "entgeom", "random", "--dims", "2", "--seed", "1", "--pure"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert build_state(parse_spec(proc.stdout)).dims == (2,)
