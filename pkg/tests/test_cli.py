import json
import math
from pathlib import Path

import pytest

from embednoise.analytics import critical_chain_strength
from embednoise.cli import empirical_kstar, main
from embednoise.noise import NoiseModel

FAST_SWEEP = {"L_sweep": {"start": 5, "stop": 40, "step": 5}, "reads": 400}


def write_config(tmp_path, extra=None):
    cfg = dict(FAST_SWEEP)
    if extra:
        cfg.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, ln.split(","))) for ln in lines[1:]]
    return header, rows


class TestChainlen:
    def test_outputs_and_fit(self, tmp_path):
        rc = main(["chainlen", "--config", write_config(tmp_path),
                   "--out", str(tmp_path), "--seed", "1"])
        assert rc == 0
        header, rows = read_csv(tmp_path / "chainlen.csv")
        assert header == ["L", "mean_chain_len"]
        assert len(rows) == 8
        fit = json.loads((tmp_path / "chainlen_fit.json").read_text())
        assert set(fit) == {"slope", "intercept", "r_squared"}

    def test_integer_lattice_slope_exact(self, tmp_path):
        cfg = write_config(tmp_path, {"chain_length": {"slope": 0.2, "intercept": 1.0,
                                                       "jitter": 0}})
        main(["chainlen", "--config", cfg, "--out", str(tmp_path)])
        fit = json.loads((tmp_path / "chainlen_fit.json").read_text())
        assert fit["slope"] == pytest.approx(0.2, abs=1e-9)
        assert fit["r_squared"] == pytest.approx(1.0, abs=1e-12)

    def test_jittered_slope_near_nominal(self, tmp_path):
        cfg = write_config(tmp_path, {
            "L_sweep": {"start": 5, "stop": 100, "step": 5},
            "chain_length": {"slope": 0.122, "intercept": 1.0, "jitter": 2}})
        main(["chainlen", "--config", cfg, "--out", str(tmp_path), "--seed", "4"])
        fit = json.loads((tmp_path / "chainlen_fit.json").read_text())
        # jitter sd ~ 1.4 over L chains; 3 SE on 20 points is generous
        assert abs(fit["slope"] - 0.122) < 0.02


class TestCbfCurve:
    def test_self_consistency(self, tmp_path):
        cfg = write_config(tmp_path, {"reads": 4000})
        rc = main(["cbf-curve", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 0
        header, rows = read_csv(tmp_path / "cbf_curve.csv")
        assert header == ["L", "cbf_obs", "cbf_pred"]
        for row in rows:
            obs, pred = float(row["cbf_obs"]), float(row["cbf_pred"])
            se = math.sqrt(max(pred * (1 - pred), 1e-12) / 4000)
            assert abs(obs - pred) <= 4 * se + 1e-6

    def test_huge_k_gives_zero_curve(self, tmp_path):
        cfg = write_config(tmp_path, {"k": 50.0})
        main(["cbf-curve", "--config", cfg, "--out", str(tmp_path)])
        _, rows = read_csv(tmp_path / "cbf_curve.csv")
        assert all(float(r["cbf_obs"]) == 0.0 for r in rows)
        assert all(float(r["cbf_pred"]) < 1e-12 for r in rows)

    def test_pred_nondecreasing_in_L(self, tmp_path):
        main(["cbf-curve", "--config", write_config(tmp_path), "--out", str(tmp_path)])
        _, rows = read_csv(tmp_path / "cbf_curve.csv")
        preds = [float(r["cbf_pred"]) for r in rows]
        assert all(a <= b + 1e-15 for a, b in zip(preds, preds[1:]))


class TestFitCommand:
    def test_fit_from_curve_outputs(self, tmp_path):
        cfg = write_config(tmp_path, {"reads": 2000})
        main(["cbf-curve", "--config", cfg, "--out", str(tmp_path)])
        rc = main(["fit", str(tmp_path / "cbf_curve.csv"),
                   "--lengths", str(tmp_path / "cbf_curve_lengths.json"),
                   "--config", cfg, "--out", str(tmp_path)])
        assert rc == 0
        result = json.loads((tmp_path / "fit_result.json").read_text())
        assert set(result) >= {"sigma_h", "sigma_c", "kappa", "sse", "per_L"}
        header, rows = read_csv(tmp_path / "fit_report.csv")
        assert header == ["L", "cbf_obs", "cbf_pred", "abs_err"]
        assert len(rows) == len(result["per_L"])

    def test_malformed_csv_fails_cleanly(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("not,a,valid\nobservations,file,x\n")
        rc = main(["fit", str(bad), "--out", str(tmp_path)])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestKstar:
    def test_analytic_exponents(self, tmp_path):
        rc = main(["kstar", "--out", str(tmp_path)])
        assert rc == 0
        header, rows = read_csv(tmp_path / "kstar.csv")
        assert header == ["l", "k_star", "tau"]
        fits = json.loads((tmp_path / "kstar_fits.json").read_text())
        for tau in ("0.01", "0.02", "0.05"):
            assert 0.45 <= fits[tau]["exponent"] <= 0.55

    def test_correlated_preset_exponent(self, tmp_path):
        cfg = write_config(tmp_path, {"noise": {
            "sigma_h": 0.001, "sigma_c": 0.0,
            "corr_strength": 0.01, "corr_exponent": 1.64}})
        main(["kstar", "--config", cfg, "--out", str(tmp_path)])
        fits = json.loads((tmp_path / "kstar_fits.json").read_text())
        for fit in fits.values():
            assert 0.78 <= fit["exponent"] <= 0.86

    def test_empirical_matches_analytic(self):
        nm = NoiseModel(sigma_h=0.06, sigma_c=0.005)
        analytic = critical_chain_strength(8, nm, 0.02)
        emp = empirical_kstar(8, nm, tau=0.02, eta=1.0, reads=10**6, seed=5)
        assert abs(emp - analytic) / analytic < 0.02


class TestHeatmap:
    def test_monotone_rows_and_columns(self, tmp_path):
        cfg = write_config(tmp_path, {
            "L_sweep": {"start": 10, "stop": 60, "step": 10},
            "k_values": {"start": 0.1, "stop": 0.9, "step": 0.1},
            "reads": 30000})
        rc = main(["heatmap", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 0
        _, rows = read_csv(tmp_path / "heatmap.csv")
        grid = {}
        for r in rows:
            grid[(int(r["L"]), float(r["k"]))] = float(r["cbf_mean"])
        Ls = sorted({L for L, _ in grid})
        ks = sorted({k for _, k in grid})
        slack = 0.01  # Monte Carlo wiggle room on a trend check
        for L in Ls:
            vals = [grid[(L, k)] for k in ks]
            assert all(a >= b - slack for a, b in zip(vals, vals[1:]))
        for k in ks:
            vals = [grid[(L, k)] for L in Ls]
            assert all(a <= b + slack for a, b in zip(vals, vals[1:]))

    def test_contour_schema(self, tmp_path):
        cfg = write_config(tmp_path, {
            "L_sweep": {"start": 10, "stop": 40, "step": 10},
            "reads": 20000})
        main(["heatmap", "--config", cfg, "--out", str(tmp_path)])
        header, rows = read_csv(tmp_path / "heatmap_contour.csv")
        assert header == ["L", "k_star_empirical"]
        assert rows  # contour crosses tau=0.02 inside the default k range


class TestBench:
    def test_schema_and_oracle_bound(self, tmp_path):
        cfg = write_config(tmp_path, {"bench_L": [5, 8], "reads": 300, "sweeps": 64})
        rc = main(["bench", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 0
        header, rows = read_csv(tmp_path / "bench.csv")
        assert header == ["L", "solver", "E_min", "seconds"]
        by_L = {}
        for r in rows:
            by_L.setdefault(int(r["L"]), {})[r["solver"]] = float(r["E_min"])
        for L, solvers in by_L.items():
            assert set(solvers) == {"brute_force", "sa", "synthetic"}
            assert solvers["sa"] >= solvers["brute_force"] - 1e-9
            assert solvers["synthetic"] >= solvers["brute_force"] - 1e-9

    def test_small_instance_agreement(self, tmp_path):
        cfg = write_config(tmp_path, {"bench_L": [5], "reads": 500,
                                      "noise": {"sigma_h": 0.0, "sigma_c": 0.0,
                                                "corr_strength": 0.0,
                                                "corr_exponent": 0.0}})
        main(["bench", "--config", cfg, "--out", str(tmp_path)])
        _, rows = read_csv(tmp_path / "bench.csv")
        energies = {r["solver"]: float(r["E_min"]) for r in rows}
        assert energies["sa"] == pytest.approx(energies["brute_force"], abs=1e-9)
        assert energies["synthetic"] == pytest.approx(energies["brute_force"], abs=1e-9)


class TestZephyrCommand:
    def test_outputs(self, tmp_path):
        rc = main(["zephyr", "--m", "2", "--t", "2", "--out", str(tmp_path)])
        assert rc == 0
        g = json.loads((tmp_path / "zephyr_2_2.json").read_text())
        assert len(g["vertices"]) == 80
        edges = (tmp_path / "zephyr_2_2_edges.txt").read_text()
        fixture = (Path(__file__).parent / "data" / "zephyr_2_2_edges.txt").read_text()
        assert edges == fixture

    def test_invalid_m(self, tmp_path, capsys):
        rc = main(["zephyr", "--m", "0", "--out", str(tmp_path)])
        assert rc == 1


class TestRepro:
    def test_full_pipeline(self, tmp_path):
        cfg = write_config(tmp_path, {"reads": 1000})
        rc = main(["repro", "--config", cfg, "--out", str(tmp_path), "--seed", "2"])
        assert rc == 0
        for name in ("chainlen.csv", "cbf_curve.csv", "fit_result.json",
                     "fit_report.csv", "kstar.csv", "kstar_fits.json"):
            assert (tmp_path / name).exists()

    def test_deterministic(self, tmp_path):
        cfg = write_config(tmp_path, {"reads": 500})
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        main(["repro", "--config", cfg, "--out", str(out_a), "--seed", "3"])
        main(["repro", "--config", cfg, "--out", str(out_b), "--seed", "3"])
        for name in ("chainlen.csv", "cbf_curve.csv", "fit_report.csv", "kstar.csv"):
            assert (out_a / name).read_text() == (out_b / name).read_text()


class TestConfigPrecedence:
    def test_flag_overrides_config(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path, {"seed": 11})
        out = tmp_path / "flagged"
        main(["chainlen", "--config", cfg, "--seed", "99", "--out", str(out)])
        assert out.exists()

    def test_env_var_default_out(self, tmp_path, monkeypatch):
        monkeypatch.setenv("EMBEDNOISE_OUT", str(tmp_path / "envout"))
        rc = main(["chainlen", "--config", write_config(tmp_path)])
        assert rc == 0
        assert (tmp_path / "envout" / "chainlen.csv").exists()
