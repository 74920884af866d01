"""Multivariate product kernels assembled from univariate components.

Two bias-term assembly modes exist. In "star" mode each factor is
(1 + centered component), which makes the product expansion of the fitted
predictor coincide term-by-term with its functional-ANOVA split. In
"standard" mode the factors are (1 + raw kernel); the expansion still
exists but its terms are generally neither centered nor orthogonal, which
is exactly what the comparison diagnostics measure. A plain tensor
product without bias terms is also provided for fitting models with
ordinary separable kernels and for expansion diagnostics.
"""
from __future__ import annotations

import numpy as np

from .centering import ZeroMeanKernel
from .kernels import UnivariateKernel

MODE_STAR = "star"
MODE_STANDARD = "standard"

# 2**d terms; anything past this is a sign the full expansion is the
# wrong tool (per-subset queries have no such gate).
MAX_EXPANSION_DIMS = 12


class AnovaKernel:
    """Product kernel  scale * prod_i (1 + c_i(x_i, y_i)).

    Parameters
    ----------
    components : sequence
        One per input dimension: :class:`ZeroMeanKernel` in star mode,
        :class:`UnivariateKernel` in standard mode.
    mode : {"star", "standard"}
    scale : float
        Positive variance scale multiplying the whole product, bias terms
        included.
    rules : sequence of QuadratureRule, optional
        Per-dimension rules. Star mode derives them from the components;
        standard mode may carry them so that averaging diagnostics know
        which measure to use.
    """

    def __init__(self, components, mode: str = MODE_STAR, scale: float = 1.0, rules=None):
        components = tuple(components)
        if not components:
            raise ValueError("need at least one component")
        if mode == MODE_STAR:
            if not all(isinstance(c, ZeroMeanKernel) for c in components):
                raise TypeError("star mode expects ZeroMeanKernel components")
            rules = tuple(c.rule for c in components)
        elif mode == MODE_STANDARD:
            if not all(isinstance(c, UnivariateKernel) for c in components):
                raise TypeError("standard mode expects UnivariateKernel components")
            if rules is not None:
                rules = tuple(rules)
                if len(rules) != len(components):
                    raise ValueError("rules and components must have equal length")
        else:
            raise ValueError(f"unknown mode {mode!r}")
        if not scale > 0:
            raise ValueError(f"scale must be positive, got {scale}")
        self.components = components
        self.mode = mode
        self.scale = float(scale)
        self.rules = rules

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def supports(self):
        """Per-dimension (lo, hi) intervals, or None when unknown."""
        if self.rules is None:
            return None
        return tuple(r.support for r in self.rules)

    def component_gram(self, i: int, xs, ys=None) -> np.ndarray:
        """Gram block of dimension i's factor (centered in star mode)."""
        comp = self.components[i]
        if self.mode == MODE_STAR:
            return comp.k0_gram(xs, ys)
        return comp.gram(xs, ys)

    def __call__(self, x, y) -> float:
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if x.size != self.d or y.size != self.d:
            raise ValueError(f"expected {self.d}-vectors, got sizes {x.size} and {y.size}")
        out = self.scale
        for i in range(self.d):
            out *= 1.0 + float(self.component_gram(i, x[i:i + 1], y[i:i + 1])[0, 0])
        return out

    def gram(self, X, Y=None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.d:
            raise ValueError(f"X has {X.shape[1]} columns, kernel expects {self.d}")
        if Y is None:
            out = np.ones((len(X), len(X)))
            for i in range(self.d):
                out *= 1.0 + self.component_gram(i, X[:, i])
        else:
            Y = np.atleast_2d(np.asarray(Y, dtype=float))
            if Y.shape[1] != self.d:
                raise ValueError(f"Y has {Y.shape[1]} columns, kernel expects {self.d}")
            out = np.ones((len(X), len(Y)))
            for i in range(self.d):
                out *= 1.0 + self.component_gram(i, X[:, i], Y[:, i])
        return self.scale * out

    def component_vectors(self, X, x) -> np.ndarray:
        """Per-dimension evaluation vectors against the rows of ``X``.

        Row i holds c_i(x[i], X[j, i]) over the design rows j. These are
        the building blocks of the product expansion: 1 plus the sum over
        nonempty subsets of the elementwise products of the selected rows
        reproduces gram(x, X) / scale.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.size == 0:
            raise ValueError("design must be nonempty")
        x = np.asarray(x, dtype=float).ravel()
        if X.shape[1] != self.d or x.size != self.d:
            raise ValueError(f"design and point must both have dimension {self.d}")
        out = np.empty((self.d, len(X)))
        for i in range(self.d):
            out[i] = self.component_gram(i, x[i:i + 1], X[:, i])[0]
        return out

    def __repr__(self):
        return (f"AnovaKernel(d={self.d}, mode={self.mode!r}, scale={self.scale}, "
                f"components={list(self.components)!r})")


class TensorProductKernel:
    """Plain separable kernel  scale * prod_i k_i(x_i, y_i), no bias terms."""

    mode = "product"

    def __init__(self, kernels, scale: float = 1.0):
        kernels = tuple(kernels)
        if not kernels:
            raise ValueError("need at least one kernel")
        if not all(isinstance(k, UnivariateKernel) for k in kernels):
            raise TypeError("expects UnivariateKernel factors")
        if not scale > 0:
            raise ValueError(f"scale must be positive, got {scale}")
        self.kernels = kernels
        self.scale = float(scale)
        self.rules = None

    @property
    def d(self) -> int:
        return len(self.kernels)

    @property
    def supports(self):
        return None

    def __call__(self, x, y) -> float:
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if x.size != self.d or y.size != self.d:
            raise ValueError(f"expected {self.d}-vectors, got sizes {x.size} and {y.size}")
        out = self.scale
        for i, k in enumerate(self.kernels):
            out *= float(k.gram(x[i:i + 1], y[i:i + 1])[0, 0])
        return out

    def gram(self, X, Y=None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.d:
            raise ValueError(f"X has {X.shape[1]} columns, kernel expects {self.d}")
        if Y is None:
            out = np.ones((len(X), len(X)))
            for i, k in enumerate(self.kernels):
                out *= k.gram(X[:, i])
        else:
            Y = np.atleast_2d(np.asarray(Y, dtype=float))
            if Y.shape[1] != self.d:
                raise ValueError(f"Y has {Y.shape[1]} columns, kernel expects {self.d}")
            out = np.ones((len(X), len(Y)))
            for i, k in enumerate(self.kernels):
                out *= k.gram(X[:, i], Y[:, i])
        return self.scale * out

    def __repr__(self):
        return f"TensorProductKernel(d={self.d}, scale={self.scale})"


def decompose_product_kernel(kernels, rules, design) -> dict[tuple[int, ...], float]:
    """Expose the hidden 2**d-term structure of a plain tensor-product kernel.

    Splitting every factor into its centered and rank-one parts and
    multiplying out yields one term per assignment pattern over the
    dimensions (0 = centered factor, 1 = rank-one factor). For each
    pattern this returns the Frobenius norm of the corresponding
    elementwise-product Gram block on ``design``, which shows how much of
    the kernel's mass each interaction layer carries.
    """
    kernels = tuple(kernels)
    rules = tuple(rules)
    d = len(kernels)
    if len(rules) != d:
        raise ValueError("kernels and rules must have equal length")
    if d > MAX_EXPANSION_DIMS:
        raise ValueError(f"full expansion has 2**{d} terms; gated at d <= {MAX_EXPANSION_DIMS}")
    design = np.atleast_2d(np.asarray(design, dtype=float))
    if design.shape[1] != d:
        raise ValueError(f"design has {design.shape[1]} columns, expected {d}")
    splits = [ZeroMeanKernel(k, r) for k, r in zip(kernels, rules)]
    blocks = [(zk.k0_gram(design[:, i]), zk.k1_gram(design[:, i]))
              for i, zk in enumerate(splits)]
    out = {}
    for bits in range(1 << d):
        pattern = tuple((bits >> i) & 1 for i in range(d))
        term = np.ones((len(design), len(design)))
        for i, b in enumerate(pattern):
            term = term * blocks[i][b]
        out[pattern] = float(np.linalg.norm(term))
    return out
