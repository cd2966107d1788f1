"""Closed-form chain-break predictions and the special functions behind them.

The break probability of a chain of length ell is the Gaussian tail

    cbp(ell) = erfc( kappa / sqrt(2 * Var(ell)) )

with Var(ell) the chain-error variance law and kappa the effective
stabilizing margin. Inverting the tail gives the critical chain strength
k* needed to hold the break probability at a target tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embedding import fit_linear
from .noise import NoiseModel, variance_law

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def erfc(x: float) -> float:
    """Complementary error function (double precision)."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("erfc requires a finite argument")
    return math.erfc(x)


def erfc_inv(p: float) -> float:
    """Inverse of erfc on (0, 2), via safeguarded Newton iteration."""
    p = float(p)
    if not (0.0 < p < 2.0):
        raise ValueError(f"erfc_inv requires 0 < p < 2, got {p}")
    if p == 1.0:
        return 0.0
    # erfc_inv(p) = -erfc_inv(2 - p); solve on the positive branch.
    if p > 1.0:
        return -erfc_inv(2.0 - p)

    lo, hi = 0.0, 1.0
    while math.erfc(hi) > p:  # bracket: erfc(hi) <= p <= erfc(lo)
        lo, hi = hi, hi * 2.0
        if hi > 40.0:
            break
    x = 0.5 * (lo + hi)
    for _ in range(100):
        f = math.erfc(x) - p
        if f > 0.0:
            lo = x
        else:
            hi = x
        step = f / (_TWO_OVER_SQRT_PI * math.exp(-x * x))
        x_new = x + step  # erfc decreases: f > 0 means x too small
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if x_new == x:
            break
        x = x_new
    return x


@dataclass
class CbpModel:
    """Noise widths plus effective stabilizing margin kappa = eta * k."""

    noise: NoiseModel
    kappa: float
    eta: float = 1.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")
        if not (0.0 < self.eta <= 1.0):
            raise ValueError("eta must lie in (0, 1]")


def cbp(ell, model: CbpModel) -> float:
    """Break probability of a single chain of length ell."""
    var = variance_law(ell, model.noise)
    if var == 0.0:
        return 0.0
    return erfc(model.kappa / math.sqrt(2.0 * var))


def cbf_predict(lengths, model: CbpModel) -> float:
    """Expected chain-break fraction: mean of per-chain break probabilities."""
    lengths = np.atleast_1d(np.asarray(lengths))
    if lengths.size == 0:
        raise ValueError("need at least one chain length")
    return float(np.mean([cbp(ell, model) for ell in lengths]))


def cbp_vs_m(m: int, alpha: float, beta: float, model: CbpModel) -> float:
    """Break probability at grid parameter m, via ell = alpha * m + beta."""
    ell = alpha * m + beta
    if ell < 1:
        raise ValueError(f"alpha*m + beta = {ell} is below the minimum chain length 1")
    return cbp(ell, model)


def critical_chain_strength(ell, nm: NoiseModel, tau: float, eta: float = 1.0) -> float:
    """Chain strength k* with cbp(ell) = tau at margin kappa = eta * k*."""
    if not (0.0 < tau < 1.0):
        raise ValueError("tau must lie in (0, 1)")
    if not (0.0 < eta <= 1.0):
        raise ValueError("eta must lie in (0, 1]")
    return math.sqrt(2.0 * variance_law(ell, nm)) * erfc_inv(tau) / eta


@dataclass
class PowerLawFit:
    exponent: float
    prefactor: float
    r_squared: float


def power_law_fit(ells, ks) -> PowerLawFit:
    """Least-squares fit of k = prefactor * ell^exponent on log-log axes."""
    ells = np.asarray(ells, dtype=np.float64)
    ks = np.asarray(ks, dtype=np.float64)
    if np.any(ells <= 0) or np.any(ks <= 0):
        raise ValueError("power-law fit requires strictly positive data")
    fit = fit_linear(np.log(ells), np.log(ks))
    return PowerLawFit(
        exponent=fit["slope"],
        prefactor=float(math.exp(fit["intercept"])),
        r_squared=fit["r_squared"],
    )
