"""Random QUBO instances and exact QUBO <-> Ising conversion.

Energy conventions used throughout the package (minimization):

    QUBO:   E(x) = sum_i Q_ii x_i + sum_{i<j} Q_ij x_i x_j,         x_i in {0,1}
    Ising:  E(s) = sum_i h_i s_i  + sum_{i<j} J_ij s_i s_j + offset, s_i in {-1,+1}

The two are linked by x_i = (1 + s_i) / 2, and the conversion preserves
energies exactly for every assignment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .rng import substream


@dataclass
class QuboInstance:
    """Upper-triangular quadratic model over binary variables.

    diag[i] holds Q(i,i); offdiag maps (i, j) with i < j to Q(i,j).
    """

    L: int
    diag: np.ndarray
    offdiag: dict[tuple[int, int], float]
    density: float
    seed: int

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=np.float64)
        if self.diag.shape != (self.L,):
            raise ValueError(f"diag must have length L={self.L}")
        for i, j in self.offdiag:
            if not (0 <= i < j < self.L):
                raise ValueError(f"offdiag key ({i},{j}) violates 0 <= i < j < L")

    def to_dict(self) -> dict:
        triples = [[i, j, v] for (i, j), v in sorted(self.offdiag.items())]
        return {
            "L": self.L,
            "diag": self.diag.tolist(),
            "offdiag": triples,
            "density": self.density,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuboInstance":
        offdiag = {(int(i), int(j)): float(v) for i, j, v in d["offdiag"]}
        return cls(int(d["L"]), np.asarray(d["diag"], dtype=np.float64),
                   offdiag, float(d["density"]), int(d["seed"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, s: str) -> "QuboInstance":
        return cls.from_dict(json.loads(s))


@dataclass
class IsingModel:
    """Spin model with local fields h, couplers J (i < j) and constant offset."""

    n: int
    h: np.ndarray
    J: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=np.float64)
        if self.h.shape != (self.n,):
            raise ValueError(f"h must have length n={self.n}")
        for i, j in self.J:
            if not (0 <= i < j < self.n):
                raise ValueError(f"J key ({i},{j}) violates 0 <= i < j < n")

    def to_dict(self) -> dict:
        triples = [[i, j, v] for (i, j), v in sorted(self.J.items())]
        return {"n": self.n, "h": self.h.tolist(), "J": triples, "offset": self.offset}

    @classmethod
    def from_dict(cls, d: dict) -> "IsingModel":
        J = {(int(i), int(j)): float(v) for i, j, v in d["J"]}
        return cls(int(d["n"]), np.asarray(d["h"], dtype=np.float64), J, float(d["offset"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, s: str) -> "IsingModel":
        return cls.from_dict(json.loads(s))


def generate_random_qubo(L: int, rho: float, seed: int) -> QuboInstance:
    """Draw a random QUBO with Uniform(-1,1) coefficients.

    Every diagonal entry is present; each of the L(L-1)/2 off-diagonal
    slots is present independently with probability rho. Deterministic
    given (L, rho, seed).
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if not (0.0 <= rho <= 1.0):
        raise ValueError(f"density rho must lie in [0, 1], got {rho}")
    rng = substream(seed, "qubo", L)
    diag = rng.uniform(-1.0, 1.0, size=L)
    pairs = [(i, j) for i in range(L) for j in range(i + 1, L)]
    present = rng.random(len(pairs)) < rho
    values = rng.uniform(-1.0, 1.0, size=len(pairs))
    offdiag = {p: float(v) for p, keep, v in zip(pairs, present, values) if keep}
    return QuboInstance(L=L, diag=diag, offdiag=offdiag, density=rho, seed=seed)


def qubo_energy(q: QuboInstance, x) -> float:
    """Evaluate sum_i Q_ii x_i + sum_{i<j} Q_ij x_i x_j for binary x."""
    x = np.asarray(x)
    if x.shape != (q.L,):
        raise ValueError(f"assignment length {x.shape} does not match L={q.L}")
    e = float(np.dot(q.diag, x))
    for (i, j), v in q.offdiag.items():
        e += v * x[i] * x[j]
    return e


def ising_energy(m: IsingModel, s) -> float:
    """Evaluate the Ising energy of a +/-1 spin assignment."""
    s = np.asarray(s)
    if s.shape != (m.n,):
        raise ValueError(f"assignment length {s.shape} does not match n={m.n}")
    if not np.all(np.abs(s) == 1):
        raise ValueError("spin entries must be -1 or +1")
    e = float(np.dot(m.h, s)) + m.offset
    for (i, j), v in m.J.items():
        e += v * s[i] * s[j]
    return e


def qubo_to_ising(q: QuboInstance) -> IsingModel:
    """Convert via x_i = (1 + s_i) / 2; energies match for every assignment."""
    h = q.diag / 2.0
    J = {}
    offset = float(np.sum(q.diag)) / 2.0
    for (i, j), v in q.offdiag.items():
        J[(i, j)] = v / 4.0
        h[i] += v / 4.0
        h[j] += v / 4.0
        offset += v / 4.0
    return IsingModel(n=q.L, h=h, J=J, offset=offset)
