"""Chains, embedded Hamiltonians and chain-length statistics.

A logical variable i is represented by a chain T_i of physical qubits.
The embedded model divides each logical field h_i evenly over T_i,
divides each logical coupler J_ij evenly over the physical edges that
connect T_i to T_j, and adds a ferromagnetic intra-chain coupler -k on
every physical edge inside a chain (minimization convention: aligned
chains lower the energy by k per intra-chain edge).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .problem import IsingModel
from .rng import substream
from .topology import ZephyrGraph


@dataclass
class ChainLengthModel:
    """Linear chain-length law: length = round(slope * L + intercept) +/- jitter."""

    slope: float
    intercept: float = 1.0
    jitter: int = 0

    def __post_init__(self):
        if self.slope < 0:
            raise ValueError("slope must be >= 0")
        if self.jitter < 0:
            raise ValueError("jitter must be >= 0")


@dataclass
class Embedding:
    """Chains T_i (disjoint sets of physical qubit ids) plus the logical edge list."""

    chains: list[list[int]]
    source_edges: list[tuple[int, int]] = field(default_factory=list)
    hardware: ZephyrGraph | None = None

    def lengths(self) -> list[int]:
        return [len(c) for c in self.chains]

    def to_dict(self) -> dict:
        return {"chains": [list(c) for c in self.chains]}

    def dumps(self) -> str:
        return json.dumps(self.to_dict())


@dataclass
class EmbeddedIsing:
    """Physical Ising model produced by an embedding, with provenance per coupler.

    provenance maps each physical coupler (p, q) to ("intra", i) for the
    penalty inside chain i, or ("inter", (i, j)) for a share of J_ij.
    """

    model: IsingModel
    chain_strength: float
    provenance: dict[tuple[int, int], tuple]
    embedding: Embedding

    def intra_edge_count(self) -> int:
        return sum(1 for tag in self.provenance.values() if tag[0] == "intra")

    def to_dict(self) -> dict:
        prov = [[p, q, list(tag[1]) if tag[0] == "inter" else tag[1], tag[0]]
                for (p, q), tag in sorted(self.provenance.items())]
        return {
            "model": self.model.to_dict(),
            "chain_strength": self.chain_strength,
            "provenance": prov,
            "embedding": self.embedding.to_dict(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict())


def synth_chain_lengths(L: int, model: ChainLengthModel, seed: int) -> np.ndarray:
    """Generate L chain lengths from the linear law, with seeded integer jitter."""
    if L < 1:
        raise ValueError("L must be >= 1")
    base = int(round(model.slope * L + model.intercept))
    lengths = np.full(L, base, dtype=np.int64)
    if model.jitter > 0:
        rng = substream(seed, "chain_lengths", L)
        lengths = lengths + rng.integers(-model.jitter, model.jitter + 1, size=L)
    return np.maximum(lengths, 1)


def build_embedded_ising(
    logical: IsingModel,
    chains_or_lengths,
    k: float,
    topology: ZephyrGraph | None = None,
) -> EmbeddedIsing:
    """Build the physical Hamiltonian for an embedding of `logical`.

    `chains_or_lengths` is either an Embedding or a sequence of chain
    lengths; lengths are materialized as path chains over fresh physical
    ids, with every logical edge realized by a single physical edge
    between the lowest-index qubits of the two chains.
    """
    if k <= 0:
        raise ValueError("chain strength k must be > 0")

    if isinstance(chains_or_lengths, Embedding):
        emb = chains_or_lengths
        if topology is not None and emb.hardware is None:
            emb = Embedding(emb.chains, emb.source_edges, topology)
    else:
        lengths = [int(v) for v in chains_or_lengths]
        if any(v < 1 for v in lengths):
            raise ValueError("chain lengths must be >= 1")
        chains, nxt = [], 0
        for ell in lengths:
            chains.append(list(range(nxt, nxt + ell)))
            nxt += ell
        emb = Embedding(chains, sorted(logical.J.keys()))

    if len(emb.chains) != logical.n:
        raise ValueError(f"embedding has {len(emb.chains)} chains for {logical.n} logical spins")

    n_phys = 1 + max(p for c in emb.chains for p in c)
    h = np.zeros(n_phys)
    J: dict[tuple[int, int], float] = {}
    provenance: dict[tuple[int, int], tuple] = {}

    hw_edges = None
    if emb.hardware is not None:
        hw_edges = {(min(a, b), max(a, b)) for a, b, _ in emb.hardware.edges}

    for i, chain in enumerate(emb.chains):
        for p in chain:
            h[p] += logical.h[i] / len(chain)
        if hw_edges is not None:
            intra = [(min(p, q), max(p, q)) for ai, p in enumerate(chain)
                     for q in chain[ai + 1:] if (min(p, q), max(p, q)) in hw_edges]
        else:
            intra = [tuple(sorted((chain[a], chain[a + 1]))) for a in range(len(chain) - 1)]
        for e in intra:
            J[e] = -k
            provenance[e] = ("intra", i)

    logical_edges = sorted(logical.J.keys())
    for (i, j) in logical_edges:
        if hw_edges is not None:
            connecting = sorted(
                (min(p, q), max(p, q))
                for p in emb.chains[i] for q in emb.chains[j]
                if (min(p, q), max(p, q)) in hw_edges
            )
            if not connecting:
                raise ValueError(f"logical edge ({i},{j}) has no physical edge between chains")
        else:
            connecting = [tuple(sorted((emb.chains[i][0], emb.chains[j][0])))]
        share = logical.J[(i, j)] / len(connecting)
        for e in connecting:
            J[e] = J.get(e, 0.0) + share
            provenance[e] = ("inter", (i, j))

    model = IsingModel(n=n_phys, h=h, J=J, offset=logical.offset)
    return EmbeddedIsing(model=model, chain_strength=k, provenance=provenance, embedding=emb)


@dataclass
class ValidationReport:
    violations: list[dict]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_embedding(e: Embedding, hardware: ZephyrGraph, logical_edges) -> ValidationReport:
    """Check disjointness, connectivity and logical-edge coverage.

    Violations are reported as data; an empty report means the embedding
    is valid.
    """
    violations: list[dict] = []
    seen: dict[int, int] = {}
    for i, chain in enumerate(e.chains):
        if not chain:
            violations.append({"kind": "empty_chain", "chain": i})
        for p in chain:
            if p in seen:
                violations.append({"kind": "disjointness", "qubit": p,
                                   "chains": [seen[p], i]})
            seen[p] = i

    adj: dict[int, set[int]] = {}
    for a, b, _ in hardware.edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)

    for i, chain in enumerate(e.chains):
        if not chain:
            continue
        members = set(chain)
        stack, reached = [chain[0]], {chain[0]}
        while stack:
            v = stack.pop()
            for w in adj.get(v, ()):
                if w in members and w not in reached:
                    reached.add(w)
                    stack.append(w)
        if reached != members:
            violations.append({"kind": "connectivity", "chain": i,
                               "unreached": sorted(members - reached)})

    hw = {(min(a, b), max(a, b)) for a, b, _ in hardware.edges}
    for (i, j) in logical_edges:
        covered = any((min(p, q), max(p, q)) in hw
                      for p in e.chains[i] for q in e.chains[j])
        if not covered:
            violations.append({"kind": "edge_coverage", "edge": [i, j]})
    return ValidationReport(violations)


def chain_stats(e_or_lengths) -> dict:
    """Mean, min, max and histogram of chain lengths."""
    lengths = e_or_lengths.lengths() if isinstance(e_or_lengths, Embedding) else list(e_or_lengths)
    if len(lengths) == 0:
        raise ValueError("no chains")
    hist: dict[int, int] = {}
    for v in lengths:
        hist[int(v)] = hist.get(int(v), 0) + 1
    return {
        "mean": float(np.mean(lengths)),
        "min": int(np.min(lengths)),
        "max": int(np.max(lengths)),
        "histogram": hist,
    }


def fit_linear(xs, ys) -> dict:
    """Ordinary least squares y = slope * x + intercept with R^2."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.size < 2 or np.unique(xs).size < 2:
        raise ValueError("need at least two distinct x values")
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return {"slope": float(slope), "intercept": float(intercept), "r_squared": r2}
