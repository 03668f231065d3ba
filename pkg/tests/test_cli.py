import json
import subprocess
import sys

import pytest

from distmo.cli import main


def run_cli(*argv):
    return main(list(argv))


class TestGenerateLearnPrune:
    def test_pipeline(self, tmp_path):
        out = str(tmp_path)
        assert run_cli("generate", "--config", "small", "--seed", "3", "--out", out) == 0
        momdp_path = tmp_path / "momdp.json"
        assert momdp_path.exists()

        assert run_cli(
            "learn", "--momdp", str(momdp_path), "--episodes", "60",
            "--walks", "400", "--seed", "3", "--out", out,
        ) == 0
        dus = json.loads((tmp_path / "dus.json").read_text())
        assert len(dus["entries"]) >= 1

        for target in ("pf", "ch", "dus", "cdus"):
            assert run_cli(
                "prune", "--set", str(tmp_path / "dus.json"), "--to", target,
                "--out", out,
            ) == 0
            pruned = json.loads((tmp_path / f"{target}.json").read_text())
            assert len(pruned["entries"]) <= len(dus["entries"])

        assert run_cli(
            "evaluate", "--set", str(tmp_path / "dus.json"),
            "--utilities", "product,leontief,linear:0.5:0.5", "--out", out,
        ) == 0
        assert (tmp_path / "evaluation.json").exists()

    def test_custom_generate_flags(self, tmp_path):
        out = str(tmp_path)
        code = run_cli(
            "generate", "--states", "4", "--actions", "2", "--horizon", "2",
            "--set-limit", "5", "--next-states", "1", "1", "--seed", "7",
            "--out", out,
        )
        assert code == 0
        momdp = json.loads((tmp_path / "momdp.json").read_text())
        assert momdp["num_states"] == 4

    def test_marginal_only_prune(self, tmp_path):
        out = str(tmp_path)
        run_cli("generate", "--config", "small", "--seed", "2", "--out", out)
        run_cli(
            "learn", "--momdp", str(tmp_path / "momdp.json"), "--episodes", "40",
            "--walks", "300", "--seed", "2", "--out", out,
        )
        assert run_cli(
            "prune", "--set", str(tmp_path / "dus.json"), "--to", "cdus",
            "--marginal-only", "--out", out,
        ) == 0

    def test_checkpoint_round_trip(self, tmp_path):
        out = str(tmp_path)
        run_cli("generate", "--config", "small", "--seed", "5", "--out", out)
        ckpt = str(tmp_path / "ckpt.json")
        run_cli(
            "learn", "--momdp", str(tmp_path / "momdp.json"), "--episodes", "30",
            "--walks", "200", "--seed", "5", "--out", out, "--checkpoint", ckpt,
        )
        first = (tmp_path / "dus.json").read_text()
        assert run_cli(
            "learn", "--momdp", str(tmp_path / "momdp.json"), "--resume", ckpt,
            "--out", out,
        ) == 0
        assert (tmp_path / "dus.json").read_text() == first


class TestExitCodes:
    def test_invalid_input(self, tmp_path):
        bad = tmp_path / "nope.json"
        assert run_cli("learn", "--momdp", str(bad), "--out", str(tmp_path)) == 2

    def test_oracle_cap(self, tmp_path):
        out = str(tmp_path)
        run_cli("generate", "--config", "small", "--seed", "1", "--out", out)
        code = run_cli(
            "oracle-dus", "--momdp", str(tmp_path / "momdp.json"),
            "--cap", "2", "--out", out,
        )
        assert code == 3

    def test_oracle_within_cap(self, tmp_path):
        out = str(tmp_path)
        run_cli(
            "generate", "--states", "3", "--actions", "2", "--horizon", "2",
            "--next-states", "1", "1", "--seed", "4", "--out", out,
        )
        assert run_cli(
            "oracle-dus", "--momdp", str(tmp_path / "momdp.json"), "--out", out,
        ) == 0
        assert (tmp_path / "oracle_dus.json").exists()

    def test_argparse_error_is_2(self):
        with pytest.raises(SystemExit) as err:
            run_cli("prune", "--to", "nonsense")
        assert err.value.code == 2


class TestEnvVarAndFormats:
    def test_out_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DISTMO_OUT", str(tmp_path / "envout"))
        assert run_cli("generate", "--config", "small", "--seed", "1") == 0
        assert (tmp_path / "envout" / "momdp.json").exists()

    def test_csv_format_evaluate(self, tmp_path):
        out = str(tmp_path)
        run_cli("generate", "--config", "small", "--seed", "6", "--out", out)
        run_cli(
            "learn", "--momdp", str(tmp_path / "momdp.json"), "--episodes", "30",
            "--walks", "200", "--seed", "6", "--out", out,
        )
        assert run_cli(
            "evaluate", "--set", str(tmp_path / "dus.json"), "--format", "csv",
            "--out", out,
        ) == 0
        header = (tmp_path / "evaluation.csv").read_text().splitlines()[0]
        assert header == "utility,rank,id,value,is_best,in_pf"

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "distmo.cli", "generate", "--config", "small",
             "--seed", "1", "--out", str(tmp_path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0


class TestExperimentCommand:
    def test_experiment_outputs(self, tmp_path):
        out = str(tmp_path)
        code = run_cli(
            "experiment", "--config", "small", "--seeds", "1", "2",
            "--episodes", "80", "--walks", "500", "--out", out, "--save-sets",
        )
        assert code == 0
        report = (tmp_path / "report.csv").read_text().splitlines()
        assert report[0] == (
            "config,seed,dus_size,cdus_size,pf_size,ch_size,"
            "cdus_pct,pf_pct,ch_pct,status"
        )
        assert len(report) == 3
        assert (tmp_path / "timings.csv").exists()
        assert (tmp_path / "summary.csv").exists()
        assert (tmp_path / "small_seed1_dus.json").exists()

    def test_solution_set_files_round_trip(self, tmp_path):
        from distmo import SolutionSet

        out = str(tmp_path)
        run_cli(
            "experiment", "--config", "small", "--seeds", "1",
            "--episodes", "60", "--walks", "400", "--out", out, "--save-sets",
        )
        for kind in ("dus", "cdus", "pf", "ch"):
            path = tmp_path / f"small_seed1_{kind}.json"
            text = path.read_text()
            assert SolutionSet.from_json(text).to_json() == text
