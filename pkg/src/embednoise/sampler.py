"""Monte Carlo engines: simulated annealing, exhaustive search, margin-model
chain-break sampling and the synthetic-hardware pipeline.

The annealer pre-generates every random array (initial spins, per-read
visit permutations, acceptance uniforms) from named substreams and feeds
them to a Metropolis sweep kernel, so results are reproducible per seed
and identical across kernel backends.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import get_kernel
from .embedding import ChainLengthModel, Embedding, build_embedded_ising, synth_chain_lengths
from .noise import NoiseModel, chain_error_sample
from .problem import IsingModel, QuboInstance, qubo_to_ising
from .rng import substream

ENUMERATION_LIMIT = 24


@dataclass
class SampleSet:
    """Per-read spins, energies and chain-break fractions."""

    spins: np.ndarray  # (reads, n) int8
    energies: np.ndarray  # (reads,)
    cbf: np.ndarray  # (reads,)
    metadata: dict = field(default_factory=dict)

    @property
    def num_reads(self) -> int:
        return self.spins.shape[0]

    def records(self):
        for r in range(self.num_reads):
            yield {
                "physical_spins": self.spins[r].tolist(),
                "energy": float(self.energies[r]),
                "cbf": float(self.cbf[r]),
            }

    def to_dict(self) -> dict:
        return {"reads": list(self.records()), "metadata": self.metadata}

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    def summary_csv(self) -> str:
        lines = ["read,energy,cbf"]
        for r in range(self.num_reads):
            lines.append(f"{r},{self.energies[r]:.12g},{self.cbf[r]:.12g}")
        return "\n".join(lines) + "\n"


@dataclass
class AnnealSchedule:
    """Inverse-temperature schedule for the Metropolis annealer.

    With beta endpoints left unset they are derived from the model: the
    median single-flip energy scale gets ~50% acceptance at beta_min and
    ~1e-4 acceptance at beta_max.
    """

    kind: str = "logarithmic"
    beta_min: float | None = None
    beta_max: float | None = None
    sweeps: int = 128

    def __post_init__(self):
        if self.kind not in ("logarithmic", "geometric", "linear"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.beta_min is not None and self.beta_max is not None:
            if not (0 < self.beta_min < self.beta_max):
                raise ValueError("need 0 < beta_min < beta_max")

    def describe(self) -> str:
        return f"{self.kind}[{self.beta_min},{self.beta_max}]x{self.sweeps}"


def _auto_endpoints(h: np.ndarray, abs_coupling: np.ndarray) -> tuple[float, float]:
    scale = np.abs(h) + abs_coupling
    med = float(np.median(scale[scale > 0])) if np.any(scale > 0) else 1.0
    de = 2.0 * med
    return math.log(2.0) / de, math.log(1e4) / de


def schedule_betas(schedule: AnnealSchedule, h: np.ndarray, abs_coupling: np.ndarray) -> np.ndarray:
    bmin, bmax = schedule.beta_min, schedule.beta_max
    if bmin is None or bmax is None:
        auto_min, auto_max = _auto_endpoints(h, abs_coupling)
        bmin = auto_min if bmin is None else bmin
        bmax = auto_max if bmax is None else bmax
    s = schedule.sweeps
    if s == 1:
        return np.array([bmax])
    idx = np.arange(s, dtype=np.float64)
    if schedule.kind == "linear":
        frac = idx / (s - 1)
        return bmin + (bmax - bmin) * frac
    if schedule.kind == "geometric":
        return bmin * (bmax / bmin) ** (idx / (s - 1))
    frac = np.log1p(idx) / np.log1p(s - 1)  # logarithmic
    return bmin + (bmax - bmin) * frac


def _edge_arrays(model: IsingModel):
    keys = sorted(model.J.keys())
    ei = np.array([i for i, _ in keys], dtype=np.int64)
    ej = np.array([j for _, j in keys], dtype=np.int64)
    jv = np.array([model.J[k] for k in keys], dtype=np.float64)
    return keys, ei, ej, jv


def _padded_adjacency(n: int, ei, ej, jv):
    """Padded neighbor tables plus the (row, slot) of each edge endpoint."""
    deg = np.zeros(n, dtype=np.int64)
    for a, b in zip(ei, ej):
        deg[a] += 1
        deg[b] += 1
    width = max(1, int(deg.max()) if n else 1)
    nbr_idx = np.zeros((n, width), dtype=np.int32)
    nbr_val = np.zeros((n, width), dtype=np.float64)
    cursor = np.zeros(n, dtype=np.int64)
    slots_a = np.empty(len(jv), dtype=np.int64)
    slots_b = np.empty(len(jv), dtype=np.int64)
    for e, (a, b, v) in enumerate(zip(ei, ej, jv)):
        slots_a[e] = cursor[a]
        nbr_idx[a, cursor[a]] = b
        nbr_val[a, cursor[a]] = v
        cursor[a] += 1
        slots_b[e] = cursor[b]
        nbr_idx[b, cursor[b]] = a
        nbr_val[b, cursor[b]] = v
        cursor[b] += 1
    return nbr_idx, nbr_val, slots_a, slots_b


def _batch_energies(spins: np.ndarray, h, ei, ej, jv, offset) -> np.ndarray:
    s = spins.astype(np.float64)
    e = s @ h + np.full(len(s), offset)
    if len(jv):
        e += (s[:, ei] * s[:, ej]) @ jv
    return e


def _sweep_chunk(reads: int, n: int) -> int:
    return int(np.clip((1 << 25) // max(1, reads * n), 1, 32))


def _run_anneal(kernel, spins, h2, nbr_idx, nbr_val3, perms, betas, rng):
    reads, n = spins.shape
    chunk = _sweep_chunk(reads, n)
    for start in range(0, len(betas), chunk):
        stop = min(start + chunk, len(betas))
        uniforms = rng.random((reads, stop - start, n))
        kernel.run_metropolis(spins, h2, nbr_idx, nbr_val3, perms,
                              np.ascontiguousarray(betas[start:stop]), uniforms)


def simulated_anneal(
    model: IsingModel,
    reads: int,
    schedule: AnnealSchedule | None = None,
    seed: int = 0,
    backend: str | None = None,
) -> SampleSet:
    """Sample `reads` independent Metropolis anneals of an Ising model."""
    if model.n < 1:
        raise ValueError("model must have at least one spin")
    if reads < 1:
        raise ValueError("reads must be >= 1")
    schedule = schedule or AnnealSchedule()
    kernel = get_kernel(backend)
    n = model.n
    keys, ei, ej, jv = _edge_arrays(model)
    nbr_idx, nbr_val, _, _ = _padded_adjacency(n, ei, ej, jv)
    betas = schedule_betas(schedule, model.h, np.abs(nbr_val).sum(axis=1))

    rng = substream(seed, "sa")
    spins = (rng.integers(0, 2, size=(reads, n)) * 2 - 1).astype(np.int8)
    perms = rng.permuted(np.tile(np.arange(n, dtype=np.int32), (reads, 1)), axis=1)
    h2 = np.broadcast_to(model.h, (reads, n))
    val3 = np.broadcast_to(nbr_val, (reads, n, nbr_val.shape[1]))
    _run_anneal(kernel, spins, h2, nbr_idx, val3, perms, betas, rng)

    energies = _batch_energies(spins, model.h, ei, ej, jv, model.offset)
    meta = {"reads": reads, "sweeps": schedule.sweeps, "seed": seed,
            "schedule": schedule.describe(), "betas": [float(betas[0]), float(betas[-1])]}
    return SampleSet(spins=spins, energies=energies, cbf=np.zeros(reads), metadata=meta)


def brute_force(model: IsingModel) -> dict:
    """Global minimum by exhaustive enumeration (n <= 24).

    Ties resolve to the lexicographically smallest spin assignment
    (with -1 ordered before +1).
    """
    n = model.n
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration limited to n <= {ENUMERATION_LIMIT}, got {n}")
    _, ei, ej, jv = _edge_arrays(model)
    best_e = math.inf
    best_s = np.ones(n, dtype=np.int8)
    if n == 0:
        return {"best_spins": best_s[:0], "best_energy": float(model.offset)}
    # variable 0 on the most significant bit: index order == lexicographic order
    shifts = n - 1 - np.arange(n)
    chunk = 1 << min(n, 16)
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, start + chunk, dtype=np.int64)
        spins = (((idx[:, None] >> shifts) & 1) * 2 - 1).astype(np.int8)
        e = _batch_energies(spins, model.h, ei, ej, jv, model.offset)
        pos = int(np.argmin(e))
        if e[pos] < best_e:
            best_e = float(e[pos])
            best_s = spins[pos].copy()
    return {"best_spins": best_s, "best_energy": best_e}


def _as_chains(embedding_or_chains) -> list[list[int]]:
    if isinstance(embedding_or_chains, Embedding):
        return embedding_or_chains.chains
    return [list(c) for c in embedding_or_chains]


def detect_breaks(spins, embedding_or_chains) -> dict:
    """Flag broken chains (spins not all equal) and compute the read's CBF."""
    chains = _as_chains(embedding_or_chains)
    spins = np.asarray(spins)
    n_needed = 1 + max(p for c in chains for p in c)
    if spins.shape[-1] < n_needed:
        raise ValueError("spin vector does not cover all physical ids in the chains")
    flags = []
    for chain in chains:
        vals = spins[..., chain]
        flags.append(bool(np.any(vals != vals[..., :1])))
    return {"broken": flags, "cbf": float(np.mean(flags))}


def _detect_breaks_batch(spins2d: np.ndarray, chains) -> tuple[np.ndarray, np.ndarray]:
    flags = np.zeros((spins2d.shape[0], len(chains)), dtype=bool)
    for c, chain in enumerate(chains):
        vals = spins2d[:, chain]
        flags[:, c] = np.any(vals != vals[:, :1], axis=1)
    return flags, flags.mean(axis=1)


def resolve_chains(spins, embedding_or_chains, policy: str = "coin",
                   stream: np.random.Generator | None = None) -> np.ndarray:
    """Collapse physical spins to logical spins by per-chain majority vote.

    Even splits resolve by a draw from `stream` (policy "coin") or to +1
    (policy "plus_one").
    """
    chains = _as_chains(embedding_or_chains)
    spins = np.asarray(spins)
    batch = spins.ndim == 2
    spins2d = spins if batch else spins[None, :]
    out = _resolve_batch(spins2d, chains, policy, stream)
    return out if batch else out[0]


def _resolve_batch(spins2d, chains, policy, stream) -> np.ndarray:
    reads = spins2d.shape[0]
    out = np.empty((reads, len(chains)), dtype=np.int8)
    if policy == "coin":
        if stream is None:
            raise ValueError("coin policy needs a random stream")
        coins = (stream.integers(0, 2, size=(reads, len(chains))) * 2 - 1).astype(np.int8)
    elif policy == "plus_one":
        coins = np.ones((reads, len(chains)), dtype=np.int8)
    else:
        raise ValueError(f"unknown tie policy {policy!r}")
    for c, chain in enumerate(chains):
        total = spins2d[:, chain].sum(axis=1, dtype=np.int64)
        maj = np.sign(total).astype(np.int8)
        out[:, c] = np.where(maj == 0, coins[:, c], maj)
    return out


def margin_model_run(lengths, k: float, eta: float, nm: NoiseModel,
                     reads: int, seed: int) -> np.ndarray:
    """Per-read CBF from the exact generative margin model.

    Each chain accumulates a Gaussian error; it breaks when the error
    magnitude exceeds the margin eta * k. Chains use independent
    substreams, so results do not depend on evaluation order.
    """
    if k <= 0:
        raise ValueError("chain strength k must be > 0")
    if not (0.0 < eta <= 1.0):
        raise ValueError("eta must lie in (0, 1]")
    lengths = np.atleast_1d(np.asarray(lengths, dtype=np.int64))
    margin = eta * k
    broken = np.zeros(reads, dtype=np.int64)
    for i, ell in enumerate(lengths):
        delta = chain_error_sample(int(ell), nm, substream(seed, "margin", i), size=reads)
        broken += np.abs(delta) > margin
    return broken / len(lengths)


def _read_chunk(reads: int, n: int, width: int) -> int:
    return int(np.clip((1 << 24) // max(1, n * width), 16, reads))


def synthetic_hardware_run(
    q: QuboInstance,
    chains_or_lengths_or_model,
    k: float,
    nm: NoiseModel,
    schedule: AnnealSchedule | None = None,
    reads: int = 2000,
    seed: int = 0,
    redraw_per_read: bool = True,
    tie_policy: str = "coin",
    backend: str | None = None,
) -> tuple[SampleSet, SampleSet]:
    """Anneal ICE-perturbed embedded Hamiltonians on synthetic hardware.

    Per read: perturb the programmed embedded model (fresh substream),
    run one annealing read, score the spins against the unperturbed
    model, detect chain breaks and majority-resolve to logical spins.
    Returns (physical SampleSet, resolved logical SampleSet).
    """
    if reads < 1:
        raise ValueError("reads must be >= 1")
    schedule = schedule or AnnealSchedule()
    kernel = get_kernel(backend)
    logical = qubo_to_ising(q)
    if isinstance(chains_or_lengths_or_model, ChainLengthModel):
        lengths = synth_chain_lengths(q.L, chains_or_lengths_or_model, seed)
        emb = build_embedded_ising(logical, lengths, k)
    else:
        emb = build_embedded_ising(logical, chains_or_lengths_or_model, k)
    chains = emb.embedding.chains
    model = emb.model
    n = model.n
    keys, ei, ej, jv = _edge_arrays(model)
    nbr_idx, nbr_val, slots_a, slots_b = _padded_adjacency(n, ei, ej, jv)
    betas = schedule_betas(schedule, model.h, np.abs(nbr_val).sum(axis=1))

    pert = substream(seed, "perturb")
    shape = (reads,) if redraw_per_read else (1,)
    dh = pert.normal(0.0, 1.0, size=shape + (n,)) * nm.sigma_h
    dj = pert.normal(0.0, 1.0, size=shape + (len(jv),)) * nm.sigma_c

    rng = substream(seed, "sa")
    spins = (rng.integers(0, 2, size=(reads, n)) * 2 - 1).astype(np.int8)
    perms = rng.permuted(np.tile(np.arange(n, dtype=np.int32), (reads, 1)), axis=1)

    width = nbr_val.shape[1]
    for start in range(0, reads, _read_chunk(reads, n, width)):
        stop = min(start + _read_chunk(reads, n, width), reads)
        rows = slice(start, stop) if redraw_per_read else slice(0, 1)
        h2 = model.h[None, :] + dh[rows]
        val3 = np.repeat(nbr_val[None, :, :], stop - start if redraw_per_read else 1, axis=0)
        if len(jv):
            val3[:, ei, slots_a] += dj[rows]
            val3[:, ej, slots_b] += dj[rows]
        if not redraw_per_read:
            h2 = np.broadcast_to(h2, (stop - start, n))
            val3 = np.broadcast_to(val3[0], (stop - start, n, width))
        _run_anneal(kernel, spins[start:stop], h2, nbr_idx, val3,
                    perms[start:stop], betas, rng)

    energies = _batch_energies(spins, model.h, ei, ej, jv, model.offset)
    flags, cbf = _detect_breaks_batch(spins, chains)
    meta = {"reads": reads, "sweeps": schedule.sweeps, "seed": seed,
            "schedule": schedule.describe(), "chain_strength": k,
            "noise": nm.to_dict(), "lengths": [len(c) for c in chains]}
    physical = SampleSet(spins=spins, energies=energies, cbf=cbf, metadata=meta)

    logical_spins = _resolve_batch(spins, chains, tie_policy, substream(seed, "tie"))
    lkeys, lei, lej, ljv = _edge_arrays(logical)
    logical_energies = _batch_energies(logical_spins, logical.h, lei, lej, ljv, logical.offset)
    resolved = SampleSet(spins=logical_spins, energies=logical_energies, cbf=cbf,
                         metadata=dict(meta, resolved=True))
    return physical, resolved


def energy_stats(ss: SampleSet) -> dict:
    """Minimum, mean and standard deviation of read energies."""
    if ss.num_reads == 0:
        raise ValueError("empty sample set")
    return {
        "E_min": float(np.min(ss.energies)),
        "E_mean": float(np.mean(ss.energies)),
        "E_std": float(np.std(ss.energies)),
    }
