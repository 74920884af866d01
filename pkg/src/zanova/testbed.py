"""Benchmark functions with known variance structure, space-filling
designs, and observation noise.

Design generation uses numpy's default generator (PCG64) behind an
explicit 64-bit seed, so runs replicate exactly on the same platform and
statistically everywhere else; replicated experiments derive one child
seed per replicate and never share generator state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .subsets import subset_dims, subset_mask


class GFunction:
    """Multiplicative benchmark  prod_k (|4 x_k - 2| + a_k) / (1 + a_k) on [0, 1]^d.

    Every coefficient must be positive; the larger a_k, the more inert
    variable k. All of its variance shares are available in closed form
    through :func:`g_analytic_index`.
    """

    def __init__(self, a):
        a = np.asarray(a, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise ValueError("all coefficients must be positive and finite")
        a.setflags(write=False)
        self.a = a

    @property
    def d(self) -> int:
        return self.a.size

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        pts = np.atleast_2d(X)
        if pts.shape[1] != self.d:
            raise ValueError(f"expected {self.d} columns, got {pts.shape[1]}")
        factors = (np.abs(4.0 * pts - 2.0) + self.a) / (1.0 + self.a)
        out = factors.prod(axis=1)
        return float(out[0]) if single else out


def g_analytic_index(subset, a) -> float:
    """Closed-form variance share of one subset of the g-function's inputs.

    share = prod_{i in subset} u_i / (prod_k (1 + u_k) - 1)  with
    u_k = 1 / (3 (1 + a_k)^2). The shares over all nonempty subsets sum
    to one exactly.
    """
    a = np.asarray(a, dtype=float)
    mask = subset_mask(subset, a.size)
    if mask == 0:
        raise ValueError("the empty subset has no variance share")
    u = 1.0 / (3.0 * (1.0 + a) ** 2)
    numer = float(np.prod(u[list(subset_dims(mask))]))
    denom = float(np.prod(1.0 + u) - 1.0)
    return numer / denom


class QuadraticFunction:
    """Two-variable polynomial  x1 + x2^2 + x1*x2.

    Under independent standard-normal inputs its variance splits into
    shares 1/4, 1/2, 1/4 for {1}, {2}, {1,2}, with total variance 4.
    """

    d = 2

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        pts = np.atleast_2d(X)
        if pts.shape[1] != 2:
            raise ValueError(f"expected 2 columns, got {pts.shape[1]}")
        out = pts[:, 0] + pts[:, 1] ** 2 + pts[:, 0] * pts[:, 1]
        return float(out[0]) if single else out


#: Exact variance shares of the quadratic benchmark, keyed by subset mask.
QUADRATIC_INDICES = {0b01: 0.25, 0b10: 0.5, 0b11: 0.25}


def quadratic_analytic_term(subset):
    """Exact projection terms of the quadratic benchmark under independent
    standard-normal inputs.

    Returns a callable: the constant term () takes no arguments and is
    1.0; {1} maps x to x; {2} maps x to x^2 - 1; {1,2} maps (x1, x2) to
    x1*x2.
    """
    mask = subset_mask(subset, 2)
    if mask == 0:
        return lambda: 1.0
    if mask == 0b01:
        return lambda x: np.asarray(x, dtype=float) + 0.0
    if mask == 0b10:
        return lambda x: np.asarray(x, dtype=float) ** 2 - 1.0
    return lambda x1, x2: np.asarray(x1, dtype=float) * np.asarray(x2, dtype=float)


@dataclass(frozen=True)
class DoeSpec:
    """Size, box bounds, seed, and restart budget for a maximin design."""

    n: int
    bounds: tuple
    seed: int | None = None
    restarts: int = 100

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"designs need n >= 2 points, got {self.n}")
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if not bounds:
            raise ValueError("bounds must name at least one dimension")
        for lo, hi in bounds:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bounds must be finite with lo < hi, got ({lo}, {hi})")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        object.__setattr__(self, "bounds", bounds)

    @property
    def d(self) -> int:
        return len(self.bounds)


def lhs_maximin(n: int, bounds, seed=None, restarts: int = 100) -> np.ndarray:
    """Best-of-``restarts`` Latin hypercube under the maximin criterion.

    Each candidate puts one point per axis-aligned stratum per dimension,
    uniformly jittered within its stratum; the candidate with the largest
    minimal pairwise distance (after scaling to ``bounds``) wins.
    Deterministic given an integer seed; a numpy Generator can be passed
    instead to chain several draws.
    """
    spec = DoeSpec(n=n, bounds=tuple(bounds), restarts=restarts)
    rng = np.random.default_rng(seed)
    lows = np.array([lo for lo, _ in spec.bounds])
    spans = np.array([hi - lo for lo, hi in spec.bounds])
    best = None
    best_score = -np.inf
    for _ in range(spec.restarts):
        unit = np.empty((n, spec.d))
        for i in range(spec.d):
            unit[:, i] = (rng.permutation(n) + rng.random(n)) / n
        candidate = lows + unit * spans
        score = float(pdist(candidate).min())
        if score > best_score:
            best_score = score
            best = candidate
    return best


def design_from_spec(spec: DoeSpec) -> np.ndarray:
    return lhs_maximin(spec.n, spec.bounds, seed=spec.seed, restarts=spec.restarts)


def add_noise(F, lam: float, seed=None) -> np.ndarray:
    """Observations plus independent centered Gaussian noise of variance ``lam``.

    ``lam = 0`` returns the observations unchanged (no generator draw),
    so noise-free runs are bit-stable regardless of the seed.
    """
    F = np.asarray(F, dtype=float)
    if lam < 0:
        raise ValueError(f"noise variance must be non-negative, got {lam}")
    if lam == 0:
        return F.copy()
    rng = np.random.default_rng(seed)
    return F + np.sqrt(lam) * rng.standard_normal(F.shape)


def min_pairwise_distance(X) -> float:
    """Smallest pairwise Euclidean distance of the design rows."""
    return float(pdist(np.asarray(X, dtype=float)).min())


def save_design_csv(path, X, F) -> str:
    """Write a design and its observations as CSV with header x1..xd,f.

    Floats are written with full round-trip precision, so loading the
    file back reproduces the arrays bit for bit.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    F = np.asarray(F, dtype=float).ravel()
    if len(F) != len(X):
        raise ValueError(f"{len(X)} design rows but {len(F)} observations")
    header = ",".join([f"x{i + 1}" for i in range(X.shape[1])] + ["f"])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for row, value in zip(X, F):
            fh.write(",".join(repr(float(v)) for v in row) + f",{float(value)!r}\n")
    return str(path)


def load_design_csv(path):
    """Read a design/observation CSV written by :func:`save_design_csv`."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    d = len(header) - 1
    if d < 1 or header != [f"x{i + 1}" for i in range(d)] + ["f"]:
        raise ValueError(f"unexpected design header {header!r}; want x1..xd,f")
    data = np.array([[float(v) for v in row] for row in rows], dtype=float)
    if data.size == 0 or data.shape[1] != d + 1:
        raise ValueError("design rows do not match the header")
    return data[:, :d], data[:, d]
