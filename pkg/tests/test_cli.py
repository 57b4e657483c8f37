import json

import numpy as np
import pytest
from click.testing import CliRunner

from fneg.cli import cli, main
from fneg.states import canonical_vector


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args, **kwargs):
    return runner.invoke(cli, args, catch_exceptions=False, **kwargs)


class TestReproduce:
    def test_paper_values_pass(self, runner):
        result = invoke(runner, ["reproduce", "paper-values"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "name,computed,expected,abs_delta"
        assert len(lines) >= 15
        for line in lines[1:]:
            assert float(line.rsplit(",", 1)[1]) <= 1e-9

    def test_paper_values_json(self, runner):
        result = invoke(runner, ["--output", "json", "reproduce", "paper-values"])
        assert result.exit_code == 0
        rows = json.loads(result.output)
        assert all(r["abs_delta"] <= 1e-9 for r in rows)

    def test_table1(self, runner):
        result = invoke(runner, ["reproduce", "table1"])
        assert result.exit_code == 0
        assert result.output.count("true") == 6

    def test_deterministic_output(self, runner):
        first = invoke(runner, ["reproduce", "paper-values"]).output
        second = invoke(runner, ["reproduce", "paper-values"]).output
        assert first == second


class TestSweep:
    def test_werner_endpoint(self, runner):
        result = invoke(
            runner,
            ["sweep", "werner", "--min", "1", "--max", "1", "--steps", "1",
             "--measures", "log_negativity"],
        )
        assert result.exit_code == 0
        header, row = result.output.strip().splitlines()
        assert header == "p,log_negativity"
        assert abs(float(row.split(",")[1]) - np.log(2)) <= 1e-9

    def test_psi_p_normalized_at_one(self, runner):
        result = invoke(
            runner,
            ["sweep", "psi_p", "--min", "1", "--max", "1", "--steps", "1",
             "--normalized"],
        )
        header, row = result.output.strip().splitlines()
        assert header == "p,j_abc,three_tangle,n_abc,pi_abc,label"
        cells = row.split(",")
        assert all(abs(float(x) - 1.0) <= 1e-9 for x in cells[1:5])
        assert cells[5] == "GHZ"

    def test_unknown_measure_rejected(self, runner):
        result = runner.invoke(cli, ["sweep", "werner", "--measures", "entropy"])
        assert result.exit_code != 0

    def test_normalized_requires_psi_p(self, runner):
        result = runner.invoke(cli, ["sweep", "werner", "--normalized"])
        assert result.exit_code != 0

    def test_rows_ordered_by_parameter(self, runner):
        result = invoke(runner, ["sweep", "psi_p", "--steps", "9"])
        ps = [float(line.split(",")[0]) for line in result.output.strip().splitlines()[1:]]
        assert ps == sorted(ps)

    def test_csv_round_trip_precision(self, runner):
        result = invoke(
            runner,
            ["sweep", "werner", "--min", "0.3", "--max", "0.3", "--steps", "1",
             "--measures", "negativity"],
        )
        cell = result.output.strip().splitlines()[1].split(",")[1]
        from fneg.measures import negativity
        from fneg.states import canonical_state
        from fneg.fock import SubsystemSpec

        exact = negativity(canonical_state("werner", p=0.3), SubsystemSpec((1,)))
        assert float(cell) == exact  # 17 significant digits survive the round trip


class TestClassifyCommand:
    def _write(self, tmp_path, payload):
        path = tmp_path / "state.json"
        path.write_text(json.dumps(payload))
        return str(path)

    def test_pure_ghz(self, runner, tmp_path):
        vec, _ = canonical_vector("ghz")
        path = self._write(
            tmp_path,
            {"num_modes": 3, "labels": ["A", "B", "C"],
             "pure": [[z.real, z.imag] for z in vec]},
        )
        result = invoke(runner, ["classify", path])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["label"] == "GHZ"
        # GHZ superposes empty and occupied mode A: subsystem parity is mixed
        assert payload["parity_type"]["kind"] == "type_II"

    def test_maximally_mixed_three_modes(self, runner, tmp_path):
        eye = np.eye(8) / 8
        path = self._write(
            tmp_path,
            {"num_modes": 3, "labels": ["A", "B", "C"],
             "matrix": [[z.real, z.imag] for z in eye.ravel()]},
        )
        result = invoke(runner, ["classify", path])
        assert result.exit_code == 0
        assert json.loads(result.output)["label"] == "fully_separable"

    def test_two_mode_dispatch(self, runner, tmp_path):
        from fneg.states import canonical_state

        dimer = canonical_state("majorana_dimer")
        path = self._write(
            tmp_path,
            {"num_modes": 2, "labels": ["A", "B"],
             "matrix": [[z.real, z.imag] for z in dimer.matrix.ravel()]},
        )
        result = invoke(runner, ["classify", path])
        payload = json.loads(result.output)
        assert payload["label"] == "inseparable"
        assert payload["parity_type"]["kind"] == "type_II"

    def test_two_mode_pure_file(self, runner, tmp_path):
        amp = 1 / np.sqrt(2)
        path = self._write(
            tmp_path,
            {"num_modes": 2, "labels": ["A", "B"], "pure": [amp, 0.0, 0.0, amp]},
        )
        result = invoke(runner, ["classify", path])
        payload = json.loads(result.output)
        assert payload["label"] == "inseparable"
        assert abs(payload["witnesses"]["negativity"] - 0.5) <= 1e-9

    def test_malformed_json_exits_3(self, runner, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"num_modes": 2,,}')
        code = main(["classify", str(path)])
        assert code == 3

    def test_invalid_state_exits_4(self, tmp_path):
        path = tmp_path / "bad.json"
        payload = {"num_modes": 2, "labels": ["A", "B"],
                   "matrix": [[1.0, 0.0]] * 16}  # trace 4, not a state
        path.write_text(json.dumps(payload))
        assert main(["classify", str(path)]) == 4

    def test_unnormalized_pure_exits_4(self, tmp_path):
        path = tmp_path / "bad2.json"
        payload = {"num_modes": 2, "labels": ["A", "B"], "pure": [1.0, 0, 0, 1.0]}
        path.write_text(json.dumps(payload))
        assert main(["classify", str(path)]) == 4

    def test_parity_violating_matrix_exits_4(self, tmp_path):
        # couples |00> to |10>: a unit-trace PSD matrix that breaks parity
        mat = np.zeros((4, 4))
        mat[0, 0] = mat[1, 1] = 0.5
        mat[0, 1] = mat[1, 0] = 0.3
        path = tmp_path / "odd.json"
        payload = {"num_modes": 2, "labels": ["A", "B"],
                   "matrix": [[z, 0.0] for z in mat.ravel()]}
        path.write_text(json.dumps(payload))
        assert main(["classify", str(path)]) == 4


class TestVerifyCommand:
    def test_identities_passes(self, runner):
        result = invoke(runner, ["verify", "identities", "--trials", "6",
                                 "--modes", "2,3"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["passed"] is True

    def test_locc_passes(self, runner):
        result = invoke(runner, ["verify", "locc", "--trials", "5"])
        assert result.exit_code == 0

    def test_conjecture_passes(self, runner):
        result = invoke(runner, ["verify", "conjecture", "--trials", "60",
                                 "--modes", "2"])
        assert result.exit_code == 0

    def test_perturbation_reports_failure(self, runner):
        # quartic residual vs the demanded cubic bracket: honest exit 1
        result = invoke(runner, ["verify", "perturbation", "--trials", "3"])
        assert result.exit_code == 1
        report = json.loads(result.output)
        assert report["passed"] is False

    def test_seed_determinism_and_env_override(self, runner):
        a = invoke(runner, ["verify", "conjecture", "--trials", "25"]).output
        b = invoke(runner, ["verify", "conjecture", "--trials", "25"]).output
        assert a == b
        c = invoke(runner, ["verify", "conjecture", "--trials", "25"],
                   env={"FNEG_SEED": "777"}).output
        d = invoke(runner, ["verify", "conjecture", "--trials", "25",
                            "--seed", "777"]).output
        assert c == d
        assert json.loads(c)["diagnostics"][0]["minimum_at"] != \
            json.loads(a)["diagnostics"][0]["minimum_at"]


class TestSweepRecord:
    def test_row_shape(self):
        from fneg.cli import SweepRecord

        rec = SweepRecord(0.5, {"j_abc": 0.1}, "fermionic", "GHZ")
        assert rec.as_row() == {"p": 0.5, "j_abc": 0.1, "label": "GHZ"}
        bare = SweepRecord(0.0, {"negativity": 0.0}, "bosonic")
        assert "label" not in bare.as_row()


class TestMainExitCodes:
    def test_usage_error_is_internal(self):
        assert main(["sweep", "unknown-family"]) == 2

    def test_ok_path(self, capsys):
        assert main(["reproduce", "table1"]) == 0
        capsys.readouterr()
