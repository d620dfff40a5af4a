import json

import numpy as np
import pytest

import wgnoise.cli as cli
from wgnoise import DivergenceError, read_latent, write_latent
from wgnoise.harness import ScenarioConfig


def run_cli(*argv):
    return cli.main([str(a) for a in argv])


def make_latent(path, n, seed=0):
    write_latent(path, np.random.default_rng(seed).standard_normal(n))


def write_scenario(path, **overrides):
    data = ScenarioConfig().to_json_dict()
    data.update(overrides)
    path.write_text(json.dumps(data))
    return path


class TestProjectCommand:
    def test_project_gaussian_latent(self, tmp_path, capsys):
        src = tmp_path / "in.wgnl"
        dst = tmp_path / "out.wgnl"
        report = tmp_path / "report.json"
        make_latent(src, 256)
        code = run_cli("project", src, dst, "--block-size", 16, "--report-path", report)
        assert code == 0
        assert "projected n=256" in capsys.readouterr().out
        payload = json.loads(report.read_text())
        assert payload["schema_version"] == 1
        assert payload["cosine_similarity"] > 0.9
        assert np.linalg.norm(read_latent(dst)) ** 2 == pytest.approx(256, rel=1e-9)

    def test_already_feasible_distance_small(self, tmp_path, capsys):
        src = tmp_path / "in.wgnl"
        mid = tmp_path / "mid.wgnl"
        out = tmp_path / "out.wgnl"
        make_latent(src, 256, seed=1)
        assert run_cli("project", src, mid, "--json") == 0
        capsys.readouterr()
        assert run_cli("project", mid, out, "--json") == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["distance"] < 1e-9

    def test_divisibility_error(self, tmp_path, capsys):
        src = tmp_path / "in.wgnl"
        make_latent(src, 100)
        code = run_cli("project", src, tmp_path / "out.wgnl", "--block-size", 16)
        assert code == 1
        assert "divisible" in capsys.readouterr().err

    def test_malformed_file(self, tmp_path):
        src = tmp_path / "in.wgnl"
        src.write_bytes(b"garbage")
        assert run_cli("project", src, tmp_path / "out.wgnl") == 1

    def test_missing_file(self, tmp_path):
        assert run_cli("project", tmp_path / "absent.wgnl", tmp_path / "out.wgnl") == 1


class TestVerifyCommand:
    def test_oracle_suite_small(self, capsys, monkeypatch):
        import wgnoise.verify as verify

        monkeypatch.setitem(
            verify.SUITES, "oracle", lambda seed: verify.suite_oracle(seed, blocks_per_size=25)
        )
        assert run_cli("verify", "--suite", "oracle") == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_bounds_suite_json(self, capsys):
        assert run_cli("verify", "--suite", "bounds", "--json") == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["suite"] == "bounds"
        assert payload["passed"] is True
        assert all(check["passed"] for check in payload["checks"])

    def test_unknown_suite_is_validation_error(self, capsys):
        assert run_cli("verify", "--suite", "bogus") == 1


class TestSampleStudyCommand:
    def test_writes_csv_json_and_figure(self, tmp_path, capsys):
        out_csv = tmp_path / "study.csv"
        code = run_cli(
            "sample-study", "--samples", 10, "--n", 64, "--block-size", 16,
            "--seed", 5, "--out-csv", out_csv, "--json",
        )
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "sample,cosine"
        assert len(lines) == 11
        summary = json.loads((tmp_path / "study.json").read_text())
        stdout_summary = json.loads(capsys.readouterr().out)
        assert summary == stdout_summary
        assert summary["sample_count"] == 10
        assert (tmp_path / "study.png").exists()

    def test_no_figures_flag(self, tmp_path):
        out_csv = tmp_path / "study.csv"
        run_cli("sample-study", "--samples", 3, "--n", 64, "--out-csv", out_csv,
                "--no-figures")
        assert not (tmp_path / "study.png").exists()

    def test_byte_identical_reruns(self, tmp_path):
        files = {}
        for tag in ("a", "b"):
            out_csv = tmp_path / f"{tag}.csv"
            run_cli("sample-study", "--samples", 20, "--n", 64, "--seed", 9,
                    "--out-csv", out_csv)
            files[tag] = (
                out_csv.read_bytes(),
                (tmp_path / f"{tag}.json").read_bytes(),
                (tmp_path / f"{tag}.png").read_bytes(),
            )
        assert files["a"] == files["b"]

    def test_bad_sample_count(self, tmp_path):
        code = run_cli("sample-study", "--samples", 0, "--n", 64,
                       "--out-csv", tmp_path / "x.csv")
        assert code == 1


class TestOptimizeCommand:
    def test_tiny_scenario_outputs(self, tmp_path, capsys):
        scenario = write_scenario(
            tmp_path / "scenario.json", n=64, iterations=4,
            modes=["projected", "unconstrained"], seed=2,
        )
        out_dir = tmp_path / "run"
        code = run_cli("optimize", "--scenario", scenario, "--out-dir", out_dir, "--json")
        assert code == 0
        captured = capsys.readouterr()
        payload = json.loads(captured.out)
        assert {row["mode"] for row in payload["rows"]} == {"projected", "unconstrained"}
        assert "wall time" in captured.err
        assert (out_dir / "comparison.csv").exists()
        assert (out_dir / "trajectory_projected.csv").exists()
        assert (out_dir / "final_projected.wgnl").exists()
        assert (out_dir / "trajectories.png").exists()
        # wall-clock timing stays off the golden outputs
        assert "wall" not in (out_dir / "comparison.csv").read_text()

    def test_invalid_scenario_key(self, tmp_path):
        scenario = tmp_path / "scenario.json"
        scenario.write_text(json.dumps({"n": 64, "typo_key": 1}))
        assert run_cli("optimize", "--scenario", scenario, "--out-dir", tmp_path / "r") == 1

    def test_divergence_writes_partial_and_exits_2(self, tmp_path, monkeypatch):
        from wgnoise.harness import run_comparison as real_run

        def fake_run(scenario):
            result = real_run(
                ScenarioConfig(n=64, iterations=2, modes=("projected",), seed=1)
            )
            exc = DivergenceError("boom", trajectory=result.trajectories["projected"])
            exc.partial_result = result
            raise exc

        monkeypatch.setattr(cli, "run_comparison", fake_run)
        scenario = write_scenario(tmp_path / "scenario.json", n=64, iterations=2)
        out_dir = tmp_path / "run"
        code = run_cli("optimize", "--scenario", scenario, "--out-dir", out_dir)
        assert code == 2
        assert (out_dir / "trajectory_projected.csv").exists()


class TestBenchCommand:
    def test_bench_json_and_csv(self, tmp_path, capsys):
        out_csv = tmp_path / "bench.csv"
        code = run_cli("bench", "--n-list", "2048,4096", "--repeats", 3,
                       "--out-csv", out_csv, "--json")
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert [p["n"] for p in payload["points"]] == [2048, 4096]
        assert len(payload["doubling_ratios"]) == 1
        assert out_csv.exists()
        assert (tmp_path / "bench.png").exists()

    def test_single_repeat(self, capsys):
        assert run_cli("bench", "--n-list", "2048", "--repeats", 1) == 0
        assert "n=2048" in capsys.readouterr().out

    def test_bad_repeats(self):
        assert run_cli("bench", "--n-list", "2048", "--repeats", 0) == 1

    def test_indivisible_n(self):
        assert run_cli("bench", "--n-list", "100") == 1
