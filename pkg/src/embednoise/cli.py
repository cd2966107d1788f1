"""Command-line harness for the chain-break experiments.

Every subcommand is deterministic given its configuration (seed
included), emits CSV/JSON only, and writes nothing outside the chosen
output directory. Plotting is left to external tools; the column
schemas are documented in the README.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .analytics import CbpModel, cbf_predict, critical_chain_strength, power_law_fit
from .embedding import ChainLengthModel, fit_linear, synth_chain_lengths
from .fitting import FitGrid, GridRange, fit_noise_params, fit_report, read_lengths_json, read_observations_csv
from .noise import NoiseModel
from .problem import generate_random_qubo, qubo_to_ising
from .rng import substream
from .sampler import (AnnealSchedule, brute_force, margin_model_run,
                      simulated_anneal, synthetic_hardware_run)
from .topology import build_zephyr, degree_histogram

OUT_ENV = "EMBEDNOISE_OUT"

DEFAULTS = {
    "L_sweep": {"start": 5, "stop": 100, "step": 5},
    "ell_sweep": {"start": 3, "stop": 30, "step": 1},
    "bench_L": [5, 10, 15, 20],
    "reads": 2000,
    "seed": 0,
    "k": 0.35,
    "bench_k": 2.0,
    "k_values": {"start": 0.1, "stop": 1.0, "step": 0.05},
    "taus": [0.01, 0.02, 0.05],
    "eta": 1.0,
    "density": 0.5,
    "noise": {"sigma_h": 0.06, "sigma_c": 0.005,
              "corr_strength": 0.0, "corr_exponent": 0.0},
    "chain_length": {"slope": 0.122, "intercept": 1.0, "jitter": 0},
    "contour_tau": 0.02,
    "sweeps": 128,
    "grid": None,
}


def _sweep_values(spec) -> list:
    if isinstance(spec, dict):
        vals = []
        x = spec["start"]
        while x <= spec["stop"] + 1e-9:
            vals.append(round(x, 10))
            x += spec["step"]
        return vals
    return list(spec)


def _load_config(args) -> dict:
    cfg = json.loads(json.dumps(DEFAULTS))  # deep copy
    if args.config:
        with open(args.config) as f:
            cfg.update(json.load(f))
    for key in ("seed", "reads", "out"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _out_dir(cfg) -> Path:
    out = cfg.get("out") or os.environ.get(OUT_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _noise(cfg) -> NoiseModel:
    return NoiseModel(**cfg["noise"])


def _chain_model(cfg) -> ChainLengthModel:
    return ChainLengthModel(**cfg["chain_length"])


def _grid(cfg) -> FitGrid:
    if cfg.get("grid"):
        g = cfg["grid"]
        return FitGrid(sigma_h_range=GridRange(**g["sigma_h"]),
                       sigma_c_range=GridRange(**g["sigma_c"]),
                       kappa_range=GridRange(**g["kappa"]))
    return FitGrid()


def _write(path: Path, text: str):
    path.write_text(text)
    print(f"wrote {path}")


def _point_seed(seed: int, tag: str, value) -> int:
    return int(substream(seed, tag, int(round(value * 1000))).integers(1 << 31))


def cmd_chainlen(cfg) -> int:
    model = _chain_model(cfg)
    Ls = [int(v) for v in _sweep_values(cfg["L_sweep"])]
    means = [float(np.mean(synth_chain_lengths(L, model, cfg["seed"]))) for L in Ls]
    lines = ["L,mean_chain_len"]
    lines += [f"{L},{m:.12g}" for L, m in zip(Ls, means)]
    out = _out_dir(cfg)
    _write(out / "chainlen.csv", "\n".join(lines) + "\n")
    fit = fit_linear(np.asarray(Ls, dtype=float), np.asarray(means))
    _write(out / "chainlen_fit.json", json.dumps(fit, indent=2) + "\n")
    print(f"slope={fit['slope']:.6g} intercept={fit['intercept']:.6g} R2={fit['r_squared']:.6g}")
    return 0


def _curve_points(cfg):
    model = _chain_model(cfg)
    nm = _noise(cfg)
    k, eta = cfg["k"], cfg["eta"]
    cbp_model = CbpModel(noise=nm, kappa=eta * k, eta=eta)
    for L in (int(v) for v in _sweep_values(cfg["L_sweep"])):
        lengths = synth_chain_lengths(L, model, cfg["seed"])
        obs = float(np.mean(margin_model_run(
            lengths, k, eta, nm, cfg["reads"], _point_seed(cfg["seed"], "cbf-curve", L))))
        yield L, lengths, obs, cbf_predict(lengths, cbp_model)


def cmd_cbf_curve(cfg) -> int:
    lines = ["L,cbf_obs,cbf_pred"]
    lengths_map = {}
    for L, lengths, obs, pred in _curve_points(cfg):
        lines.append(f"{L},{obs:.12g},{pred:.12g}")
        lengths_map[L] = [int(v) for v in lengths]
    out = _out_dir(cfg)
    _write(out / "cbf_curve.csv", "\n".join(lines) + "\n")
    _write(out / "cbf_curve_lengths.json", json.dumps(lengths_map) + "\n")
    return 0


def cmd_fit(cfg, observations_path: str, lengths_path: str | None) -> int:
    lengths_by_L = None
    if lengths_path:
        lengths_by_L = read_lengths_json(Path(lengths_path).read_text())
    obs = read_observations_csv(Path(observations_path).read_text(), lengths_by_L)
    fr = fit_noise_params(obs, _grid(cfg),
                          corr_strength=cfg["noise"]["corr_strength"],
                          corr_exponent=cfg["noise"]["corr_exponent"])
    out = _out_dir(cfg)
    _write(out / "fit_result.json", fr.dumps() + "\n")
    _write(out / "fit_report.csv", fit_report(fr))
    print(f"sigma_h={fr.sigma_h:.6g} sigma_c={fr.sigma_c:.6g} "
          f"kappa={fr.kappa:.6g} sse={fr.sse:.6g}")
    return 0


def empirical_kstar(ell: int, nm: NoiseModel, tau: float, eta: float,
                    reads: int, seed: int, iters: int = 40) -> float:
    """Bisect chain strength until the margin-model mean CBF hits tau."""
    def cbf(k):
        return float(np.mean(margin_model_run([ell], k, eta, nm, reads, seed)))

    lo, hi = 1e-9, 1.0
    while cbf(hi) > tau:
        lo, hi = hi, hi * 2.0
        if hi > 1e6:
            raise RuntimeError("bisection bracket failed")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if cbf(mid) > tau:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cmd_kstar(cfg, empirical: bool = False) -> int:
    nm = _noise(cfg)
    eta = cfg["eta"]
    ells = [int(v) for v in _sweep_values(cfg["ell_sweep"])]
    lines = ["l,k_star,tau"]
    fits = {}
    for tau in cfg["taus"]:
        if empirical:
            ks = [empirical_kstar(ell, nm, tau, eta, cfg["reads"],
                                  _point_seed(cfg["seed"], "kstar", ell)) for ell in ells]
        else:
            ks = [critical_chain_strength(ell, nm, tau, eta) for ell in ells]
        lines += [f"{ell},{k:.12g},{tau:.12g}" for ell, k in zip(ells, ks)]
        pf = power_law_fit(ells, ks)
        fits[str(tau)] = {"exponent": pf.exponent, "prefactor": pf.prefactor,
                          "r_squared": pf.r_squared}
        print(f"tau={tau}: exponent={pf.exponent:.4f} prefactor={pf.prefactor:.4f}")
    out = _out_dir(cfg)
    _write(out / "kstar.csv", "\n".join(lines) + "\n")
    _write(out / "kstar_fits.json", json.dumps(fits, indent=2) + "\n")
    return 0


def cmd_heatmap(cfg) -> int:
    nm = _noise(cfg)
    model = _chain_model(cfg)
    eta, tau = cfg["eta"], cfg["contour_tau"]
    Ls = [int(v) for v in _sweep_values(cfg["L_sweep"])]
    ks = [float(v) for v in _sweep_values(cfg["k_values"])]
    lines = ["L,k,cbf_mean"]
    contour = ["L,k_star_empirical"]
    for L in Ls:
        lengths = synth_chain_lengths(L, model, cfg["seed"])
        row = []
        for k in ks:
            seed = _point_seed(cfg["seed"], f"heatmap-{L}", k)
            cbf = float(np.mean(margin_model_run(lengths, k, eta, nm, cfg["reads"], seed)))
            row.append(cbf)
            lines.append(f"{L},{k:.12g},{cbf:.12g}")
        # smallest k reaching cbf <= tau, linearly interpolated on the k grid
        for j in range(1, len(ks)):
            if row[j] <= tau < row[j - 1]:
                frac = (row[j - 1] - tau) / (row[j - 1] - row[j])
                contour.append(f"{L},{ks[j - 1] + frac * (ks[j] - ks[j - 1]):.12g}")
                break
        else:
            if row and row[0] <= tau:
                contour.append(f"{L},{ks[0]:.12g}")
    out = _out_dir(cfg)
    _write(out / "heatmap.csv", "\n".join(lines) + "\n")
    _write(out / "heatmap_contour.csv", "\n".join(contour) + "\n")
    return 0


def cmd_bench(cfg) -> int:
    nm = _noise(cfg)
    model = _chain_model(cfg)
    schedule = AnnealSchedule(sweeps=cfg["sweeps"])
    lines = ["L,solver,E_min,seconds"]
    for L in cfg["bench_L"]:
        q = generate_random_qubo(L, cfg["density"], cfg["seed"])
        ising = qubo_to_ising(q)

        t0 = time.perf_counter()
        oracle = brute_force(ising)
        lines.append(f"{L},brute_force,{oracle['best_energy']:.12g},{time.perf_counter() - t0:.6g}")

        t0 = time.perf_counter()
        ss = simulated_anneal(ising, cfg["reads"], schedule, seed=cfg["seed"])
        lines.append(f"{L},sa,{float(ss.energies.min()):.12g},{time.perf_counter() - t0:.6g}")

        t0 = time.perf_counter()
        _, resolved = synthetic_hardware_run(q, model, cfg["bench_k"], nm,
                                             schedule, cfg["reads"], cfg["seed"])
        lines.append(f"{L},synthetic,{float(resolved.energies.min()):.12g},"
                     f"{time.perf_counter() - t0:.6g}")
    out = _out_dir(cfg)
    _write(out / "bench.csv", "\n".join(lines) + "\n")
    return 0


def cmd_zephyr(cfg, m: int, t: int) -> int:
    g = build_zephyr(m, t)
    out = _out_dir(cfg)
    _write(out / f"zephyr_{m}_{t}.json", g.dumps() + "\n")
    _write(out / f"zephyr_{m}_{t}_edges.txt", g.to_edgelist())
    hist = degree_histogram(g)
    _write(out / f"zephyr_{m}_{t}_degrees.json",
           json.dumps({str(k): v for k, v in sorted(hist.items())}, indent=2) + "\n")
    print(f"Z({m},{t}): {len(g.vertices)} vertices, {len(g.edges)} edges")
    return 0


def cmd_repro(cfg) -> int:
    rc = cmd_chainlen(cfg)
    rc = rc or cmd_cbf_curve(cfg)
    out = _out_dir(cfg)
    rc = rc or cmd_fit(cfg, str(out / "cbf_curve.csv"),
                       str(out / "cbf_curve_lengths.json"))
    rc = rc or cmd_kstar(cfg)
    return rc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embednoise",
        description="Chain-break simulation and calibration experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None,
                       help=f"output directory (default ${OUT_ENV} or cwd)")
        p.add_argument("--reads", type=int, default=None)
        p.add_argument("--threads", type=int, default=0,
                       help="0 = auto; engines are vectorized in-process, "
                            "so this is accepted for interface stability")
        return p

    common(sub.add_parser("chainlen", help="chain-length vs L curve and linear fit"))
    common(sub.add_parser("cbf-curve", help="observed vs predicted CBF per L"))
    p = common(sub.add_parser("fit", help="grid-search noise calibration"))
    p.add_argument("observations", help="CSV with header L,cbf_obs")
    p.add_argument("--lengths", default=None, help="JSON {L: [chain lengths]}")
    p = common(sub.add_parser("kstar", help="critical chain strength sweep"))
    p.add_argument("--empirical", action="store_true",
                   help="bisect Monte Carlo CBF instead of the closed form")
    common(sub.add_parser("heatmap", help="mean CBF over the (L, k) plane"))
    common(sub.add_parser("bench", help="solver comparison at desk scale"))
    p = common(sub.add_parser("zephyr", help="emit a Zephyr graph fixture"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, default=4)
    common(sub.add_parser("repro", help="chainlen -> cbf-curve -> fit -> kstar"))
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "chainlen":
            return cmd_chainlen(cfg)
        if args.command == "cbf-curve":
            return cmd_cbf_curve(cfg)
        if args.command == "fit":
            return cmd_fit(cfg, args.observations, args.lengths)
        if args.command == "kstar":
            return cmd_kstar(cfg, empirical=args.empirical)
        if args.command == "heatmap":
            return cmd_heatmap(cfg)
        if args.command == "bench":
            return cmd_bench(cfg)
        if args.command == "zephyr":
            return cmd_zephyr(cfg, args.m, args.t)
        if args.command == "repro":
            return cmd_repro(cfg)
        raise ValueError(f"unknown command {args.command!r}")
    except Exception as exc:  # argparse handles its own errors
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
