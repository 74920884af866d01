"""Closed-form variance shares of the fitted surface.

For a star-mode model the variance of each submodel term is a quadratic
form in the fitted coefficients through per-dimension moment matrices of
the centered component vectors. Each subset's share is computed directly
from its own matrices; no recursion over sub-subsets and no sampling is
involved, so no numerical error propagates between subsets.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .anova import MODE_STAR
from .subsets import all_subsets, report_order, subset_dims, subset_label, subset_mask

CONSTANT_MODEL_RTOL = 1e-14
NEGATIVE_CLIP_TOL = 1e-10
FULL_ENUMERATION_MAX_DIMS = 12


def component_moment_matrices(est) -> list[np.ndarray]:
    """Per-dimension second-moment matrices of the centered component vectors.

    Entry [j, l] of matrix i is sum_q w_q c_i(t_q, X[j, i]) c_i(t_q, X[l, i])
    over dimension i's quadrature rule, i.e. the average of the outer
    product of the design's component vector with itself. Using the same
    rule that centered the components keeps the variance-share
    normalization identity exact; a different rule would silently break it.
    """
    kernel = est.kernel
    if getattr(kernel, "mode", None) != MODE_STAR:
        raise ValueError("moment matrices require a star-mode AnovaKernel")
    out = []
    for i, comp in enumerate(kernel.components):
        rule = comp.rule
        cross = comp.k0_gram(rule.nodes, est.X_[:, i])
        moment = cross.T @ (rule.weights[:, None] * cross)
        out.append((moment + moment.T) / 2.0)
    return out


def submodel_variance(est, moments, subset) -> float:
    """Variance of one submodel term: scale^2 * alpha' (prod of moments) alpha."""
    mask = subset_mask(subset, est.kernel.d)
    if mask == 0:
        raise ValueError("the constant term has no variance share; pass a nonempty subset")
    quad = np.ones_like(moments[0])
    for i in subset_dims(mask):
        quad = quad * moments[i]
    return float(est.kernel.scale**2 * (est.alpha_ @ quad @ est.alpha_))


def total_model_variance(est, moments) -> float:
    """Variance of the whole fitted surface under the product measure.

    Expanding elementwise prod_i (ones + M_i) - ones collects every
    nonempty subset's moment product in one matrix, so this equals the
    sum of all 2^d - 1 submodel variances exactly.
    """
    ones = np.ones_like(moments[0])
    quad = np.ones_like(moments[0])
    for m in moments:
        quad = quad * (ones + m)
    quad = quad - ones
    return float(est.kernel.scale**2 * (est.alpha_ @ quad @ est.alpha_))


@dataclass
class SensitivityReport:
    """Variance shares keyed by subset bitmask, plus bookkeeping.

    ``residual_mass`` is one minus the sum of the reported shares: the
    variance fraction carried by subsets that were not requested.
    ``clipped`` counts shares in [-1e-10, 0) that were snapped to zero.
    """

    total_variance: float
    indices: dict = field(default_factory=dict)
    residual_mass: float = 0.0
    clipped: int = 0

    def by_label(self) -> dict[str, float]:
        return {subset_label(m): self.indices[m] for m in report_order(self.indices)}

    def rows(self) -> list[tuple[str, float]]:
        return [(subset_label(m), self.indices[m]) for m in report_order(self.indices)]


def sobol_indices(est, subsets=None, max_order: int | None = 3, moments=None) -> SensitivityReport:
    """Variance share of each requested subset of input variables.

    With ``subsets=None`` every nonempty subset of order up to
    ``max_order`` is reported; ``max_order=None`` enumerates all 2^d - 1
    subsets and is gated at d <= 12. Shares are ratios of quadratic
    forms in alpha, hence invariant to rescaling the observations.

    Raises if the fitted surface is constant under the rules (its total
    variance is then zero and shares are undefined), or if any share is
    negative beyond roundoff, which signals a broken moment matrix.
    """
    d = est.kernel.d
    if moments is None:
        moments = component_moment_matrices(est)
    if subsets is None:
        if max_order is None and d > FULL_ENUMERATION_MAX_DIMS:
            raise ValueError(f"full enumeration is gated at d <= {FULL_ENUMERATION_MAX_DIMS}")
        masks = all_subsets(d, max_order)
    else:
        masks = []
        for s in subsets:
            mask = subset_mask(s, d)
            if mask == 0:
                raise ValueError("the empty subset has no variance share")
            if mask not in masks:
                masks.append(mask)
    total = total_model_variance(est, moments)
    alpha_scale = float(est.kernel.scale**2 * (est.alpha_ @ est.alpha_))
    if total <= CONSTANT_MODEL_RTOL * alpha_scale:
        raise ValueError("fitted model is constant under the rules; variance shares are undefined")
    indices = {}
    clipped = 0
    for mask in masks:
        share = submodel_variance(est, moments, mask) / total
        if share < -NEGATIVE_CLIP_TOL:
            raise ValueError(
                f"variance share for subset {subset_label(mask)} is {share:.3e}; a negative "
                "value of this size signals a broken moment matrix")
        if share < 0.0:
            share = 0.0
            clipped += 1
        indices[mask] = share
    return SensitivityReport(
        total_variance=total,
        indices=indices,
        residual_mass=1.0 - float(sum(indices.values())),
        clipped=clipped,
    )


def term_mean(est, subset, rules=None) -> float:
    """Average of one product-expansion term under the per-dimension rules.

    For star-mode models this is zero up to roundoff for every nonempty
    subset; for standard-mode models it is generally not, and quantifying
    that gap is the point of computing it. Standard-mode kernels built
    without rules must pass them explicitly.
    """
    kernel = est.kernel
    mask = subset_mask(subset, kernel.d)
    rules = kernel.rules if rules is None else tuple(rules)
    if mask == 0:
        return float(kernel.scale * np.sum(est.alpha_))
    if rules is None:
        raise ValueError("averaging needs per-dimension quadrature rules")
    vec = np.ones(len(est.X_))
    for i in subset_dims(mask):
        cross = kernel.component_gram(i, rules[i].nodes, est.X_[:, i])
        vec = vec * (rules[i].weights @ cross)
    return float(kernel.scale * (vec @ est.alpha_))
