import numpy as np
import pytest

import zanova as z


@pytest.fixture(scope="session")
def uniform_rule_0_5():
    return z.build_rule(z.uniform_measure(0.0, 5.0), 100)


@pytest.fixture(scope="session")
def normal_rule():
    return z.build_rule(z.standard_normal_measure(), 400)


@pytest.fixture(scope="session")
def two_var_fit():
    """20-point maximin fit of the d=2 g benchmark with a star kernel whose
    components share a 60-node rule with the grid oracle."""
    rule = z.build_rule(z.uniform_measure(0.0, 1.0), 60)
    split = z.decompose(z.Matern32Kernel(1.0), rule)
    kernel = z.AnovaKernel([split, split], mode=z.MODE_STAR)
    design = z.lhs_maximin(20, [(0.0, 1.0)] * 2, seed=42, restarts=100)
    f = z.GFunction([1.0, 2.0])
    est = z.AnovaGP(kernel, 0.0).fit(design, f(design))
    return {"rule": rule, "kernel": kernel, "design": design, "f": f, "est": est}


@pytest.fixture(scope="session")
def two_var_fit_standard(two_var_fit):
    """Same data fitted with uncentered (standard-mode) factors."""
    rule = two_var_fit["rule"]
    kernel = z.AnovaKernel([z.Matern32Kernel(1.0)] * 2, mode=z.MODE_STANDARD,
                           rules=[rule, rule])
    design = two_var_fit["design"]
    est = z.AnovaGP(kernel, 0.0).fit(design, two_var_fit["f"](design))
    return {"rule": rule, "kernel": kernel, "design": design, "est": est}


def brownian_slope(x):
    """Closed-form averaged slice of min(x, s) under uniform [0, 5]."""
    x = np.asarray(x, dtype=float)
    return x - x**2 / 10.0


def brownian_centered_exact(x, y):
    """Closed-form centered part of min(x, y) under uniform [0, 5]."""
    return np.minimum(x, y) - brownian_slope(x) * brownian_slope(y) / (5.0 / 3.0)
