import json

import pytest

from linewsn.cli import main
from linewsn.harness import ExperimentConfig, Instance, generate_instance, save_instance

from conftest import make_chain3


@pytest.fixture
def chain_instance(tmp_path):
    path = tmp_path / "chain.json"
    save_instance(path, Instance(make_chain3(0.6), (5,), 1))
    return path


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSolve:
    def test_basic(self, capsys, chain_instance):
        code, out, _ = run_cli(capsys, ["solve", str(chain_instance)])
        assert code == 0
        payload = json.loads(out)
        assert payload["lifetime"] == 5
        assert payload["slots"] == [[1]] * 5

    def test_full_report(self, capsys, chain_instance, tmp_path):
        out_file = tmp_path / "result.json"
        code, _, _ = run_cli(
            capsys,
            ["solve", str(chain_instance), "--exact", "--bound", "--certify",
             "--out", str(out_file)],
        )
        assert code == 0
        payload = json.loads(out_file.read_text())
        assert payload["t_max"] == 5
        assert payload["t_bar_f"] == 5
        assert payload["certificate"]["status"] == "optimal"

    def test_missing_file_is_invalid_input(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, ["solve", str(tmp_path / "nope.json")])
        assert code == 1
        assert "error" in err

    def test_malformed_json_is_invalid_input(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, _, _ = run_cli(capsys, ["solve", str(path)])
        assert code == 1

    def test_guard_exceeded_is_exit_2(self, capsys, tmp_path):
        cfg = ExperimentConfig(
            n_sensors=22, range_over_length=0.3, m_cs=2, trials=1, seed=5
        )
        inst = generate_instance(cfg, 0)
        path = tmp_path / "big.json"
        save_instance(path, inst)
        code, _, err = run_cli(capsys, ["solve", str(path), "--exact"])
        assert code == 2
        assert "error" in err

    def test_certify_guard_is_exit_2(self, capsys, tmp_path):
        cfg = ExperimentConfig(
            n_sensors=16, range_over_length=0.3, m_cs=2, trials=1, seed=5
        )
        save_instance(tmp_path / "mid.json", generate_instance(cfg, 0))
        code, _, _ = run_cli(capsys, ["solve", str(tmp_path / "mid.json"), "--certify"])
        assert code == 2


class TestExperimentCommands:
    @pytest.fixture
    def config_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({
            "n_sensors": [4, 5], "range_over_length": 0.35, "m_cs": 1,
            "energy_mean": 5.0, "energy_stddev": 1.0, "trials": 2,
            "seed": 9, "eta_list": [1, 2], "sweep_ranges": [0.4, 0.6],
        }))
        return path

    def test_gap_command(self, capsys, config_file, tmp_path):
        out_dir = tmp_path / "gap_out"
        code, out, _ = run_cli(
            capsys, ["gap", "--config", str(config_file), "--out", str(out_dir)]
        )
        assert code == 0
        assert json.loads(out)["rows"] == 2
        assert (out_dir / "gap.csv").exists()

    def test_scale_command(self, capsys, config_file, tmp_path):
        out_dir = tmp_path / "scale_out"
        code, out, _ = run_cli(
            capsys, ["scale", "--config", str(config_file), "--out", str(out_dir)]
        )
        assert code == 0
        assert json.loads(out)["rows"] == 4
        assert (out_dir / "scale.csv").exists()

    def test_sweep_command(self, capsys, config_file, tmp_path):
        out_dir = tmp_path / "sweep_out"
        code, out, _ = run_cli(
            capsys, ["sweep", "--config", str(config_file), "--out", str(out_dir)]
        )
        assert code == 0
        assert json.loads(out)["rows"] == 2
        header = (out_dir / "sweep.csv").read_text().splitlines()[0]
        assert header == "range,mean_t_g,mean_t_bar_f,mean_baseline"

    def test_seed_override_changes_output(self, capsys, config_file, tmp_path):
        code_a, out_a, _ = run_cli(
            capsys, ["gap", "--config", str(config_file), "--seed", "1"]
        )
        code_b, out_b, _ = run_cli(
            capsys, ["gap", "--config", str(config_file), "--seed", "1"]
        )
        assert code_a == code_b == 0
        assert out_a == out_b

    def test_bad_config_is_invalid_input(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n_sensors": 4}))
        code, _, _ = run_cli(capsys, ["gap", "--config", str(path)])
        assert code == 1
