"""Kriging-style regressor whose fitted surface splits exactly into a
constant, main effects, and interactions when built on a star-mode kernel.

The fit solves (gram + lam*I) alpha = y once with a Cholesky
factorization; predictions and every submodel term are then inner
products against ``alpha_``, so extracting any single interaction term
costs one pass over the design, with no recursion over sub-terms.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .anova import MODE_STAR, AnovaKernel
from .subsets import subset_dims, subset_mask

JITTER_START_RTOL = 1e-10
JITTER_MAX_RTOL = 1e-6


class SingularKernelError(np.linalg.LinAlgError):
    """The regularized Gram matrix could not be factorized."""


def _chol_with_jitter(matrix: np.ndarray):
    """Cholesky factor of ``matrix``, escalating a diagonal jitter on failure.

    The jitter starts at 1e-10 of the mean diagonal and grows tenfold up
    to 1e-6 of it; past that the system is reported as singular together
    with its smallest pivot.
    """
    mean_diag = float(np.mean(np.diagonal(matrix)))
    jitters = [0.0]
    rtol = JITTER_START_RTOL
    while rtol <= JITTER_MAX_RTOL * (1.0 + 1e-9):
        jitters.append(rtol * mean_diag)
        rtol *= 10.0
    last_err = None
    for jitter in jitters:
        shifted = matrix if jitter == 0.0 else matrix + jitter * np.eye(len(matrix))
        try:
            return cho_factor(shifted, lower=True), jitter
        except np.linalg.LinAlgError as err:
            last_err = err
    smallest = float(np.linalg.eigvalsh(matrix)[0])
    raise SingularKernelError(
        "Gram matrix is numerically singular even after jitter escalation to "
        f"{JITTER_MAX_RTOL:g} of the mean diagonal; smallest pivot {smallest:.6e}"
    ) from last_err


class AnovaGP(BaseEstimator, RegressorMixin):
    """Interpolating (lam=0) or ridge-regularized kernel regressor.

    Parameters
    ----------
    kernel : AnovaKernel or TensorProductKernel
        Covariance over the input space. Submodel extraction and
        sensitivity indices require a star-mode :class:`AnovaKernel`.
    lam : float, default 0.0
        Ridge parameter added to the Gram diagonal. Zero interpolates the
        observations exactly; a positive value matches observations
        carrying centered Gaussian noise of that variance.

    Attributes
    ----------
    X_ : ndarray of shape (n, d)
        Validated training inputs.
    y_ : ndarray of shape (n,)
        Training observations.
    alpha_ : ndarray of shape (n,)
        Solution of (gram + lam*I) alpha = y.
    jitter_used_ : float
        Diagonal boost that was needed to factorize, 0.0 in the common case.
    residual_ : float
        ||(gram + lam*I) alpha - y|| / ||y||, a solve-quality diagnostic.
    """

    def __init__(self, kernel, lam: float = 0.0):
        self.kernel = kernel
        self.lam = lam

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if X.shape[1] != self.kernel.d:
            raise ValueError(f"X has {X.shape[1]} columns but the kernel expects {self.kernel.d}")
        if self.lam < 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        if self.lam == 0 and len(np.unique(X, axis=0)) != len(X):
            raise ValueError("duplicate design rows make the Gram matrix singular at lam=0")
        self._check_support(X)
        gram = self.kernel.gram(X)
        system = gram + self.lam * np.eye(len(X)) if self.lam else gram
        factor, jitter = _chol_with_jitter(system)
        alpha = cho_solve(factor, y)
        norm_y = float(np.linalg.norm(y))
        self.X_ = X
        self.y_ = y
        self.alpha_ = alpha
        self.jitter_used_ = jitter
        self.residual_ = float(np.linalg.norm(system @ alpha - y)) / (norm_y or 1.0)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "alpha_")
        X = self._validate_points(X)
        return self.kernel.gram(X, self.X_) @ self.alpha_

    def predict_submodel(self, X, subset) -> np.ndarray:
        """Evaluate one term of the ANOVA split of the fitted surface.

        ``subset`` may be a bitmask, an iterable of 0-based dimensions,
        or a 1-based label such as "1,3". The empty subset gives the
        constant term. Coordinates of ``X`` outside the subset never
        enter the computation. Requires a star-mode kernel: with any
        other kernel the expansion terms exist but are not the ANOVA
        split, so they are refused here (see :func:`expansion_term`).
        """
        check_is_fitted(self, "alpha_")
        if getattr(self.kernel, "mode", None) != MODE_STAR:
            raise ValueError("submodel extraction requires a star-mode AnovaKernel")
        X = self._validate_points(X)
        return expansion_term(self, X, subset)

    def mean_term(self) -> float:
        """Constant term of the fitted split: scale * sum(alpha)."""
        check_is_fitted(self, "alpha_")
        if getattr(self.kernel, "mode", None) != MODE_STAR:
            raise ValueError("submodel extraction requires a star-mode AnovaKernel")
        return float(self.kernel.scale * np.sum(self.alpha_))

    def _validate_points(self, X) -> np.ndarray:
        X = check_array(X, dtype=float)
        if X.shape[1] != self.kernel.d:
            raise ValueError(f"X has {X.shape[1]} columns but the kernel expects {self.kernel.d}")
        self._check_support(X)
        return X

    def _check_support(self, X):
        supports = getattr(self.kernel, "supports", None)
        if supports is None:
            return
        for i, (lo, hi) in enumerate(supports):
            col = X[:, i]
            if col.min() < lo or col.max() > hi:
                raise ValueError(
                    f"column {i} has points outside the measure support [{lo}, {hi}]")


def expansion_term(est: AnovaGP, X, subset) -> np.ndarray:
    """Product-expansion term of the fitted predictor for one subset.

    scale * (elementwise product over the subset's component vectors) @ alpha.
    Valid in star and standard mode alike; in standard mode the terms sum
    to the predictor but are generally not centered, which is what the
    mode-comparison diagnostics measure.
    """
    kernel = est.kernel
    if not isinstance(kernel, AnovaKernel):
        raise ValueError("expansion terms are defined for AnovaKernel models only")
    mask = subset_mask(subset, kernel.d)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != kernel.d:
        raise ValueError(f"X has {X.shape[1]} columns but the kernel expects {kernel.d}")
    if mask == 0:
        return np.full(len(X), kernel.scale * float(np.sum(est.alpha_)))
    values = np.ones((len(X), len(est.X_)))
    for i in subset_dims(mask):
        values *= kernel.component_gram(i, X[:, i], est.X_[:, i])
    return kernel.scale * (values @ est.alpha_)
