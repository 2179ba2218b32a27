"""Command-line interface tests (run in-process through main)."""

import json

import numpy as np
import pytest

from phasekit.cli import main


def run(args):
    return main([str(a) for a in args])


def load(path):
    with open(path) as fh:
        return json.load(fh)


class TestDirectInvert:
    def test_direct_emits_valid_artifact(self, tmp_path):
        out = tmp_path / "params.json"
        assert run(["direct", "--model", "M9", "--rates", "1,2,3,4,5",
                    "--out", out]) == 0
        doc = load(out)
        np.testing.assert_allclose(doc["moments"]["L"], [-15.0, 27.0, -10.0],
                                   rtol=1e-9)
        np.testing.assert_allclose(doc["moments"]["S"], [-5.0, 60.0],
                                   rtol=1e-9)
        assert doc["manifest"]["tool_version"]

    def test_invert_worked_example(self, tmp_path):
        out = tmp_path / "sols.json"
        assert run(["invert", "--model", "M9",
                    "--moments=-15,27,-10,-5,60", "--out", out]) == 0
        doc = load(out)
        found = sorted(tuple(np.round(s["rates"], 8))
                       for s in doc["solutions"])
        assert found == [(1.0, 2.0, 3.0, 4.0, 5.0),
                         (2.0, 1.0, 4.0, 3.0, 5.0)]

    def test_direct_then_invert_round_trip(self, tmp_path):
        params = tmp_path / "params.json"
        run(["direct", "--model", "M4", "--rates", "1,1.5,4,3,5",
             "--out", params])
        doc = load(params)
        moments = doc["moments"]["L"] + doc["moments"]["S"]
        sols = tmp_path / "sols.json"
        assert run(["invert", "--model", "M4",
                    "--moments=" + ",".join(map(repr, moments)),
                    "--out", sols]) == 0
        best = min(
            max(abs(np.array(s["rates"]) - [1.0, 1.5, 4.0, 3.0, 5.0]))
            for s in load(sols)["solutions"]
        )
        assert best < 1e-8

    def test_invert_lambda_amplitude_input(self, tmp_path):
        out = tmp_path / "sols.json"
        assert run(["invert", "--model", "chain2",
                    "--lambda=-0.5,-2.0", "--A=0.7,0.3",
                    "--out", out]) == 0
        doc = load(out)
        assert len(doc["solutions"]) == 1
        assert doc["solutions"][0]["residual"] < 1e-9

    def test_thomas_flag(self, tmp_path):
        out = tmp_path / "sols.json"
        assert run(["invert", "--model", "M9",
                    "--moments=-15,27,-10,-5,60", "--thomas",
                    "--out", out]) == 0
        assert len(load(out)["solutions"]) == 2

    def test_survival_csv(self, tmp_path):
        csv = tmp_path / "surv.csv"
        run(["direct", "--model", "M9", "--rates", "1,2,3,4,5",
             "--out", tmp_path / "p.json", "--survival-csv", csv,
             "--t-max", 2.0, "--t-points", 5])
        lines = csv.read_text().strip().splitlines()
        assert lines[0] == "t,survival"
        assert len(lines) == 6
        first = [float(x) for x in lines[1].split(",")]
        np.testing.assert_allclose(first, [0.0, 1.0], atol=1e-12)


class TestExitCodes:
    def test_no_solution_is_exit_3(self):
        assert run(["invert", "--model", "M9", "--moments", "1,1,1,1,1"]) == 3

    def test_bad_input_is_exit_2(self):
        assert run(["invert", "--model", "M9", "--moments", "1,2"]) == 2

    def test_missing_file_is_exit_2(self, tmp_path):
        assert run(["fit", "--trace", tmp_path / "nope.csv",
                    "--components", 2]) == 2

    def test_validate_ok(self, capsys):
        assert run(["validate", "--model", "M9", "--rates", "1,2,3,4,5"]) == 0
        assert "ok" in capsys.readouterr().out

    def test_validate_flags_bad_rates(self):
        assert run(["validate", "--model", "M9",
                    "--rates", "1,0,3,4,5"]) == 2


class TestSimulateFit:
    def test_simulate_and_fit(self, tmp_path):
        trace = tmp_path / "trace.csv"
        assert run(["simulate", "--model", "chain1", "--rates", "2.0",
                    "--n", 5000, "--seed", 3, "--out", trace]) == 0
        assert trace.read_text().splitlines()[0] == "gap"
        assert (tmp_path / "trace.csv.manifest.json").exists()
        fit_out = tmp_path / "fit.json"
        assert run(["fit", "--trace", trace, "--components", 1,
                    "--restarts", 3, "--out", fit_out]) == 0
        doc = load(fit_out)
        assert abs(doc["lam"][0] + 2.0) < 0.15
        assert doc["converged"] is True

    def test_simulate_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            run(["simulate", "--model", "M9", "--rates", "1,2,3,4,5",
                 "--n", 200, "--seed", 11, "--out", out])
        assert a.read_text() == b.read_text()


class TestVariantsExperiment:
    def test_variants_report(self, tmp_path):
        out = tmp_path / "var.json"
        assert run(["variants", "--lambda=-0.5,-1.5,-13",
                    "--A=0.57,0.07,0.36", "--out", out]) == 0
        doc = load(out)
        assert sum(1 for i in doc["instances"] if i["valid"]) >= 4
        assert doc["deltas"]["p3"] < 1e-8

    def test_variants_from_moments(self, tmp_path):
        out = tmp_path / "var.json"
        assert run(["variants", "--moments=-15,27,-10,-5,60",
                    "--out", out]) == 0
        assert load(out)["instances"]

    def test_experiment_small(self, tmp_path):
        out = tmp_path / "exp.json"
        prefix = tmp_path / "hist"
        assert run(["experiment", "--samples", 300, "--seed", 7,
                    "--out", out, "--hist-prefix", prefix]) == 0
        doc = load(out)
        assert doc["n_samples"] == 300
        assert 0 < doc["n_retained"] < 300
        assert (tmp_path / "hist_delta_p1.csv").exists()


class TestPipeline:
    def test_m9_pipeline(self, tmp_path):
        out = tmp_path / "pipe.json"
        assert run(["pipeline", "--model", "M9", "--rates", "1,2,3,4,5",
                    "--n", 20000, "--seed", 2, "--restarts", 4,
                    "--out", out]) == 0
        doc = load(out)
        assert doc["solvable"] is True
        assert doc["ground_truth"]["best_match_model"] == "M9"
        assert doc["ground_truth"]["best_match_rel_err"] < 0.5

    def test_pipeline_rejects_tiny_trace(self):
        assert run(["pipeline", "--model", "M9", "--rates", "1,2,3,4,5",
                    "--n", 10, "--seed", 1]) == 2

    def test_m3_pipeline_family(self, tmp_path):
        out = tmp_path / "pipe3.json"
        assert run(["pipeline", "--model", "M3", "--rates", "1,2,3,4,5",
                    "--n", 20000, "--seed", 1, "--restarts", 4,
                    "--m3-tol", 0.2, "--out", out]) == 0
        doc = load(out)
        assert doc["solvable"] is False
        assert len(doc["m3_family"]) >= 1
