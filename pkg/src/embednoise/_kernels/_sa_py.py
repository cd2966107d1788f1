"""NumPy reference implementation of the Metropolis sweep kernel.

Vectorized across reads; each step updates one spin per read, chosen by
that read's fixed visit permutation.
"""

from __future__ import annotations

import numpy as np


def run_metropolis(spins, h, nbr_idx, nbr_val, perms, betas, uniforms):
    """Run len(betas) Metropolis sweeps in place.

    spins    : int8  (reads, n), entries +/-1, updated in place
    h        : float (reads, n) per-read fields (may be broadcast)
    nbr_idx  : int32 (n, D) padded neighbor ids (pad with 0)
    nbr_val  : float (reads, n, D) padded coupler values (pad with 0.0)
    perms    : int32 (reads, n) per-read spin visit order
    betas    : float (sweeps,) inverse temperature per sweep
    uniforms : float (reads, sweeps, n) acceptance draws in [0, 1)
    """
    reads, n = spins.shape
    ar = np.arange(reads)
    for c, beta in enumerate(betas):
        for t in range(n):
            i = perms[:, t]
            neigh = spins[ar[:, None], nbr_idx[i]]
            vals = nbr_val[ar, i]
            field = h[ar, i] + np.einsum("rd,rd->r", vals, neigh.astype(np.float64))
            de = -2.0 * spins[ar, i] * field
            accept = uniforms[:, c, t] < np.exp(np.minimum(-beta * de, 50.0))
            spins[ar, i] = np.where(accept, -spins[ar, i], spins[ar, i])
