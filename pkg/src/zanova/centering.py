"""Split a univariate kernel into a discretely centered part plus a
rank-one remainder.

Given a kernel k and a rule with nodes t_j and weights w_j, the averaged
slice r(x) = sum_j w_j k(x, t_j) represents the averaging operator inside
the kernel's function space, and

    k1(x, y) = r(x) r(y) / m,   with   m = sum_j w_j r(t_j),
    k0(x, y) = k(x, y) - k1(x, y).

k0 is again symmetric positive-definite and reproduces exactly the
functions whose discrete average vanishes, so sum_j w_j k0(x, t_j) = 0
for every x up to floating-point roundoff. When r is identically zero
the split is degenerate: k0 equals k and k1 is zero.
"""
from __future__ import annotations

import numpy as np

from .kernels import UnivariateKernel
from .measures import QuadratureRule

# m is compared against the largest diagonal kernel value; a relative
# threshold keeps the degeneracy decision invariant under rescaling k.
DEGENERACY_RTOL = 1e-14


class ZeroMeanKernel:
    """Centered/rank-one split of ``base`` with respect to ``rule``.

    Immutable after construction; the averaged slice is cached at the
    quadrature nodes and evaluated on demand anywhere else.
    """

    def __init__(self, base: UnivariateKernel, rule: QuadratureRule):
        self.base = base
        self.rule = rule
        node_gram = base.gram(rule.nodes)
        if not np.all(np.isfinite(node_gram)):
            raise ValueError("kernel produced non-finite values on the quadrature grid")
        r_nodes = node_gram @ rule.weights
        r_nodes.setflags(write=False)
        self.r_nodes = r_nodes
        self.denom = float(rule.weights @ r_nodes)
        diag_scale = float(np.max(np.diagonal(node_gram)))
        self.degenerate = self.denom <= DEGENERACY_RTOL * diag_scale

    def representer(self, x):
        """Discrete average of k(x, .): sum_j w_j k(x, t_j)."""
        x = np.asarray(x, dtype=float)
        values = self.base(x[..., None], self.rule.nodes) @ self.rule.weights
        return float(values) if x.ndim == 0 else values

    def k1(self, x, y):
        """Rank-one remainder r(x) r(y) / m; identically zero if degenerate."""
        prod = np.multiply(self.representer(x), self.representer(y))
        if self.degenerate:
            return prod * 0.0
        return prod / self.denom

    def k0(self, x, y):
        """Centered kernel value k(x, y) - k1(x, y)."""
        return self.base(x, y) - self.k1(x, y)

    def k0_gram(self, xs, ys=None) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = xs if ys is None else np.asarray(ys, dtype=float)
        out = self.base.gram(xs, ys)
        if self.degenerate or out.size == 0:
            return out
        rx = self.representer(xs)
        ry = rx if ys is xs else self.representer(ys)
        return out - np.outer(rx, ry) / self.denom

    def k1_gram(self, xs, ys=None) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = xs if ys is None else np.asarray(ys, dtype=float)
        if self.degenerate or xs.size == 0 or ys.size == 0:
            return np.zeros((xs.size, ys.size))
        rx = self.representer(xs)
        ry = rx if ys is xs else self.representer(ys)
        return np.outer(rx, ry) / self.denom

    def __repr__(self):
        return (f"ZeroMeanKernel(base={self.base!r}, n_nodes={self.rule.n}, "
                f"degenerate={self.degenerate})")


def decompose(base: UnivariateKernel, rule: QuadratureRule) -> ZeroMeanKernel:
    """Split ``base`` against ``rule``; see :class:`ZeroMeanKernel`."""
    return ZeroMeanKernel(base, rule)
