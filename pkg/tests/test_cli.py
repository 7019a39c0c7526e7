import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sea_entanglement.bell import PARTITION, bell_like_state
from sea_entanglement.cli import main, sweep_grid, sweep_rows
from sea_entanglement.errors import SpecError
from sea_entanglement.fock import BOSON
from sea_entanglement.specfile import StateSpec

H = 1 / math.sqrt(2)

BALANCED = {
    "statistics": "fermion",
    "modes": ["X", "Y"],
    "internal_dim": 2,
    "particles": [
        {"X:0": [H, 0.0], "Y:0": [H, 0.0]},
        {"X:1": [H, 0.0], "Y:1": [H, 0.0]},
    ],
    "partition": {"X": ["X"], "Y": ["Y"]},
}


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def bell_spec(tmp_path):
    spec = StateSpec.from_state(bell_like_state(), PARTITION)
    return write(tmp_path, "bell.json", spec.to_dict())


def test_entropy_command(tmp_path, capsys):
    code, out, _ = run(capsys, "entropy", write(tmp_path, "s.json", BALANCED))
    assert code == 0
    report = json.loads(out)
    assert report["total_entropy_bits"] == pytest.approx(1)
    assert report["swapped_total_entropy_bits"] == pytest.approx(1)
    assert [s["sector"] for s in report["sectors"]] == ["even", "odd"]


def test_reduce_command_labels(tmp_path, capsys):
    code, out, _ = run(capsys, "reduce", write(tmp_path, "s.json", BALANCED), "--trace", "X")
    assert code == 0
    report = json.loads(out)
    even = report["sectors"][0]
    assert even["basis"] == ["vac", "Y:0 Y:1"]
    assert np.allclose(np.array(even["matrix"])[..., 0], np.eye(2) / 2)


def test_reduce_unknown_subsystem(tmp_path, capsys):
    code, _, err = run(capsys, "reduce", write(tmp_path, "s.json", BALANCED), "--trace", "Q")
    assert code == 2
    assert "--trace" in err


def test_separable_command(tmp_path, capsys):
    code, out, _ = run(capsys, "separable", write(tmp_path, "s.json", BALANCED))
    report = json.loads(out)
    assert code == 0 and report["separable"] is False
    assert report["schmidt_rank"] == 4


def test_chsh_optimal(tmp_path, capsys):
    code, out, _ = run(capsys, "chsh", bell_spec(tmp_path), "--settings", "optimal")
    assert code == 0
    assert json.loads(out)["abs_value"] == pytest.approx(2.8284271, abs=1e-7)


def test_chsh_explicit_vectors(tmp_path, capsys):
    code, out, _ = run(capsys, "chsh", bell_spec(tmp_path), "--settings=1,0,0;0,0,1;1,0,1;-1,0,1")
    assert code == 0
    assert json.loads(out)["abs_value"] == pytest.approx(2 * math.sqrt(2), abs=1e-9)
    code, out, _ = run(capsys, "chsh", bell_spec(tmp_path), "--settings", "0,0,1", "0,0,1", "0,0,1", "0,0,1")
    assert code == 0 and json.loads(out)["abs_value"] <= 2 * math.sqrt(2)


def test_chsh_bad_settings_and_encoding(tmp_path, capsys):
    code, _, _ = run(capsys, "chsh", bell_spec(tmp_path), "--settings", "1,0")
    assert code == 2
    code, _, err = run(capsys, "chsh", write(tmp_path, "s.json", BALANCED))
    assert code == 3 and "EncodingViolation" in err


def test_ghjw_command(tmp_path, capsys):
    rotated = dict(BALANCED, particles=[{"X:0": [H, 0.0], "Y:1": [H, 0.0]}, {"X:1": [H, 0.0], "Y:0": [H, 0.0]}])
    code, out, _ = run(capsys, "ghjw", write(tmp_path, "a.json", BALANCED), write(tmp_path, "b.json", rotated))
    assert code == 0
    report = json.loads(out)
    assert report["residual"] < 1e-8
    assert report["basis"][0] == "vac"


def test_ghjw_not_copurifications(tmp_path, capsys):
    code, _, err = run(capsys, "ghjw", write(tmp_path, "a.json", BALANCED), bell_spec(tmp_path))
    assert code == 3 and "NotCoPurifications" in err


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--particles", "2", "--statistics", "f", "--grid", "11")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["r", "l", "total_entropy_bits", "p_Y_even", "p_Y_odd"]
    values = np.array(rows[1:], dtype=float)
    assert values.shape == (11, 5)
    assert values[:, 2].max() == pytest.approx(1, abs=1e-9)
    assert values[0, 0] == 0 and values[-1, 0] == 1


def test_sweep_bosons_and_threads(monkeypatch):
    header, rows = sweep_rows(2, BOSON, 21)
    monkeypatch.setenv("THREADS", "3")
    from sea_entanglement import cli

    header2, rows2 = sweep_rows(2, BOSON, 21, cli._threads())
    assert header == header2 == ["r", "l", "total_entropy_bits", "p_Y_0", "p_Y_1", "p_Y_2"]
    assert rows == rows2
    assert max(r[2] for r in rows) == pytest.approx(0.5, abs=1e-9)


def test_sweep_grid_contains_balanced_point():
    phi = sweep_grid(101)
    assert math.sin(phi[50]) == pytest.approx(H, abs=1e-15)
    with pytest.raises(SpecError):
        sweep_grid(1)


def test_oracle_check_command(capsys):
    code, out, _ = run(capsys, "oracle-check", "--seed", "3", "--trials", "5")
    assert code == 0 and json.loads(out)["ok"]


def test_oracle_check_reports_first_failing_seed(capsys, monkeypatch):
    from sea_entanglement import cli, oracle

    monkeypatch.setattr(cli, "run_equivalence_trials", lambda seed, trials: oracle.run_equivalence_trials(seed, trials, tol=-1))
    code, out, err = run(capsys, "oracle-check", "--seed", "42", "--trials", "2")
    assert code == 3
    assert json.loads(out)["first_failing_seed"] == 42
    assert "42" in err


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d.pop("statistics"), "$.statistics"),
        (lambda d: d.update(statistics="anyon"), "$.statistics"),
        (lambda d: d.update(internal_dim=0), "$.internal_dim"),
        (lambda d: d.update(occupation=[]), "$"),
        (lambda d: d["particles"][1].update({"X:1": [1.0]}), "$.particles[1].X:1"),
        (lambda d: d["particles"][0].update({"Q:0": [1.0, 0.0]}), "$.particles[0].Q:0"),
        (lambda d: d.update(partition={"X": ["X"]}), "$.partition"),
        (lambda d: d.update(partition={"X": ["X", "Y"], "Y": ["Y"]}), "$.partition.Y[0]"),
        (lambda d: d.update(extra=1), "$.extra"),
    ],
)
def test_malformed_specs_exit_2_with_field_path(tmp_path, capsys, mutate, path):
    data = json.loads(json.dumps(BALANCED))
    mutate(data)
    code, _, err = run(capsys, "entropy", write(tmp_path, "bad.json", data))
    assert code == 2
    assert path in err


def test_zero_wedge_and_unreadable_spec(tmp_path, capsys):
    same = dict(BALANCED, particles=[{"X:0": [1.0, 0.0]}, {"X:0": [2.0, 0.0]}])
    code, _, err = run(capsys, "entropy", write(tmp_path, "z.json", same))
    assert code == 2 and "ZeroWedge" in err
    code, _, _ = run(capsys, "entropy", str(tmp_path / "missing.json"))
    assert code == 2
    (tmp_path / "junk.json").write_text("{not json")
    code, _, err = run(capsys, "entropy", str(tmp_path / "junk.json"))
    assert code == 2 and "invalid JSON" in err


def test_renormalization_warning(tmp_path, capsys, caplog):
    loose = dict(BALANCED, particles=[{"X:0": [1.0, 0.0], "Y:0": [1.0, 0.0]}, {"X:1": [1.0, 0.0], "Y:1": [1.0, 0.0]}])
    with caplog.at_level("WARNING"):
        StateSpec.from_dict(loose).state()
    assert "renormalized" in caplog.text
    code, out, _ = run(capsys, "entropy", write(tmp_path, "loose.json", loose))
    assert code == 0 and json.loads(out)["total_entropy_bits"] == pytest.approx(1)


def test_occupation_spec_ordering_sign():
    spec = StateSpec.from_dict(
        {
            "statistics": "fermion",
            "modes": ["X", "Y"],
            "occupation": [{"labels": "Y:0 X:0", "amplitude": [1, 0]}],
            "partition": {"X": ["X"], "Y": ["Y"]},
        }
    )
    (amp,) = spec.state().terms.values()
    assert amp == -1
    with pytest.raises(SpecError):
        StateSpec.from_dict(
            {
                "statistics": "fermion",
                "modes": ["X"],
                "occupation": [{"labels": "X:0 X:0", "amplitude": [1, 0]}],
                "partition": {"X": ["X"]},
            }
        )


amplitude = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(amplitude, amplitude), min_size=2, max_size=2), st.sampled_from(["boson", "fermion"]))
def test_spec_round_trip_is_bitwise(pairs, statistics):
    data = json.loads(json.dumps(BALANCED))
    data["statistics"] = statistics
    data["particles"][0]["X:0"] = list(pairs[0])
    data["particles"][1]["Y:1"] = list(pairs[1])
    spec = StateSpec.from_dict(data)
    again = StateSpec.loads(spec.dumps())
    assert again == spec
    assert again.dumps() == spec.dumps()


def test_state_round_trip_through_occupation_form():
    psi = bell_like_state()
    spec = StateSpec.from_state(psi, PARTITION)
    rebuilt = StateSpec.loads(spec.dumps()).state()
    assert rebuilt.terms == psi.terms


def test_deterministic_output(tmp_path, capsys):
    path = write(tmp_path, "s.json", BALANCED)
    _, first, _ = run(capsys, "reduce", path, "--trace", "Y")
    _, second, _ = run(capsys, "reduce", path, "--trace", "Y")
    assert first == second


def test_module_entry_point(tmp_path):
    demos = Path(__file__).resolve().parents[1] / "demos" / "specs" / "bell_like.json"
    out = subprocess.run(
        [sys.executable, "-m", "sea_entanglement", "chsh", str(demos)], capture_output=True, text=True, check=True
    )
    assert json.loads(out.stdout)["abs_value"] == pytest.approx(2.8284271, abs=1e-7)
