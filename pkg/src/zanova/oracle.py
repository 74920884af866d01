"""Brute-force functional-ANOVA projections on full tensor grids.

Everything here recomputes, by direct marginalization over a dense grid,
the quantities the closed-form path produces in one matrix expression:
the constant term by averaging everything out, main effects by averaging
out all other coordinates and subtracting the constant, interactions by
recursively subtracting every lower-order term. Tests compare the two
routes. Grids are dense (product of all node counts), so the dimension
is capped; higher-dimensional validation relies on algebraic identities
instead.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

MAX_GRID_DIMS = 3


class GridFunction:
    """Values of a function on the tensor grid of per-dimension rules."""

    def __init__(self, rules, values):
        rules = tuple(rules)
        if not 1 <= len(rules) <= MAX_GRID_DIMS:
            raise ValueError(f"full tensor grids are capped at {MAX_GRID_DIMS} dimensions")
        values = np.asarray(values, dtype=float)
        expected = tuple(r.n for r in rules)
        if values.shape != expected:
            raise ValueError(f"values shape {values.shape} does not match the grid {expected}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid values must be finite")
        self.rules = rules
        self.values = values

    @classmethod
    def from_function(cls, f, rules) -> "GridFunction":
        """Evaluate ``f`` (vectorized over an (m, d) array) on the tensor grid."""
        rules = tuple(rules)
        grids = np.meshgrid(*[r.nodes for r in rules], indexing="ij")
        points = np.column_stack([g.ravel() for g in grids])
        values = np.asarray(f(points), dtype=float).reshape([r.n for r in rules])
        return cls(rules, values)

    @property
    def d(self) -> int:
        return len(self.rules)

    def mean(self) -> float:
        return project_constant(self)

    def variance(self) -> float:
        return grid_variance(self.values, self.rules)


def _marginal(values, rules, keep):
    """Average out every axis not in ``keep``; kept axes stay in order."""
    out = np.asarray(values, dtype=float)
    for axis in reversed(range(out.ndim)):
        if axis not in keep:
            out = np.tensordot(out, rules[axis].weights, axes=([axis], [0]))
    return out


def _expand(term, dims, full):
    """Broadcast a term over axes ``dims`` onto the axes ``full``."""
    if dims == ():
        return term
    index = tuple(slice(None) if i in dims else None for i in full)
    return np.asarray(term)[index]


def project_constant(g: GridFunction) -> float:
    """Grand weighted mean of the grid values."""
    return float(_marginal(g.values, g.rules, ()))


def project_main_effect(g: GridFunction, i: int) -> np.ndarray:
    """Marginal over all coordinates but i, minus the constant."""
    if not 0 <= i < g.d:
        raise ValueError(f"dimension {i} out of range for d={g.d}")
    return _marginal(g.values, g.rules, (i,)) - project_constant(g)


def project_interaction(g: GridFunction, dims) -> np.ndarray:
    """Projection term for a set of 2 or 3 coordinates.

    Subtracts every strict-subset term from the marginal, so the result
    has zero weighted mean along each of its own coordinates.
    """
    dims = tuple(sorted(int(i) for i in dims))
    if not 2 <= len(dims) <= MAX_GRID_DIMS:
        raise ValueError("interactions are computed for 2 or 3 coordinates")
    if any(not 0 <= i < g.d for i in dims) or len(set(dims)) != len(dims):
        raise ValueError(f"bad coordinate set {dims} for d={g.d}")
    return anova_terms(g, max_order=len(dims))[dims]


def anova_terms(g: GridFunction, max_order: int | None = None) -> dict:
    """All projection terms up to ``max_order``, keyed by coordinate tuple.

    The empty tuple maps to the constant; every other key maps to an
    array over its own axes with all lower-order contributions removed.
    """
    d = g.d
    if max_order is None:
        max_order = d
    terms: dict = {(): project_constant(g)}
    for size in range(1, max_order + 1):
        for dims in combinations(range(d), size):
            value = np.array(_marginal(g.values, g.rules, dims), dtype=float)
            for sub_size in range(size):
                for sub in combinations(dims, sub_size):
                    value = value - _expand(terms[sub], sub, dims)
            terms[dims] = value
    return terms


def reconstruct(g: GridFunction, terms=None) -> np.ndarray:
    """Sum all projection terms back onto the full grid."""
    if terms is None:
        terms = anova_terms(g)
    full = tuple(range(g.d))
    out = np.zeros_like(g.values)
    for dims, value in terms.items():
        out = out + _expand(value, dims, full)
    return out


def grid_mean(values, rules) -> float:
    """Weighted mean of values living on the tensor grid of ``rules``."""
    return float(_marginal(values, tuple(rules), ()))


def grid_variance(values, rules) -> float:
    """Weighted variance of values living on the tensor grid of ``rules``."""
    values = np.asarray(values, dtype=float)
    rules = tuple(rules)
    center = values - _marginal(values, rules, ())
    return float(_marginal(center * center, rules, ()))


def grid_inner(rules, dims_u, u, dims_v, v) -> float:
    """Weighted inner product of two terms broadcast onto the full grid."""
    rules = tuple(rules)
    full = tuple(range(len(rules)))
    a = _expand(np.asarray(u, dtype=float), tuple(sorted(dims_u)), full)
    b = _expand(np.asarray(v, dtype=float), tuple(sorted(dims_v)), full)
    return float(_marginal(np.asarray(a * b, dtype=float), rules, ()))
