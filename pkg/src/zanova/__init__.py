"""Kriging surrogates with zero-mean ANOVA kernels.

Univariate kernels are split against a discrete probability measure into
a centered part plus a rank-one remainder; products of (1 + centered
part) over the input dimensions give covariance functions whose fitted
best predictor decomposes, term by term and in closed form, into its
functional-ANOVA representation. Variance-based sensitivity indices of
the surrogate then come out of one quadratic form per subset of
variables, with no recursive integration.
"""

from .anova import (MODE_STANDARD, MODE_STAR, AnovaKernel, TensorProductKernel,
                    decompose_product_kernel)
from .centering import ZeroMeanKernel, decompose
from .config import ConfigError
from .estimator import AnovaGP, SingularKernelError, expansion_term
from .kernels import (BrownianKernel, CustomKernel, GaussianKernel, Matern32Kernel,
                      ShiftedBrownianKernel, UnivariateKernel, sqrt_diag_integral)
from .measures import (Measure, QuadratureRule, build_rule, standard_normal_measure,
                       uniform_measure)
from .oracle import (GridFunction, anova_terms, grid_inner, grid_mean, grid_variance,
                     project_constant, project_interaction, project_main_effect,
                     reconstruct)
from .sensitivity import (SensitivityReport, component_moment_matrices, sobol_indices,
                          submodel_variance, term_mean, total_model_variance)
from .subsets import all_subsets, parse_subset_label, subset_dims, subset_label, subset_mask
from .testbed import (QUADRATIC_INDICES, DoeSpec, GFunction, QuadraticFunction,
                      add_noise, design_from_spec, g_analytic_index, lhs_maximin,
                      load_design_csv, min_pairwise_distance, quadratic_analytic_term,
                      save_design_csv)

__version__ = "0.1.0"

__all__ = [
    "AnovaGP",
    "AnovaKernel",
    "BrownianKernel",
    "ConfigError",
    "CustomKernel",
    "DoeSpec",
    "GFunction",
    "GaussianKernel",
    "GridFunction",
    "Matern32Kernel",
    "Measure",
    "MODE_STANDARD",
    "MODE_STAR",
    "QUADRATIC_INDICES",
    "QuadraticFunction",
    "QuadratureRule",
    "SensitivityReport",
    "ShiftedBrownianKernel",
    "SingularKernelError",
    "TensorProductKernel",
    "UnivariateKernel",
    "ZeroMeanKernel",
    "add_noise",
    "all_subsets",
    "anova_terms",
    "build_rule",
    "component_moment_matrices",
    "decompose",
    "decompose_product_kernel",
    "design_from_spec",
    "expansion_term",
    "g_analytic_index",
    "grid_inner",
    "grid_mean",
    "grid_variance",
    "lhs_maximin",
    "load_design_csv",
    "min_pairwise_distance",
    "parse_subset_label",
    "project_constant",
    "project_interaction",
    "project_main_effect",
    "quadratic_analytic_term",
    "reconstruct",
    "save_design_csv",
    "sobol_indices",
    "sqrt_diag_integral",
    "standard_normal_measure",
    "subset_dims",
    "subset_label",
    "subset_mask",
    "submodel_variance",
    "term_mean",
    "total_model_variance",
    "uniform_measure",
]
