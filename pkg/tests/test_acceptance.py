"""Acceptance suite: one test per criterion, each printing a PASS line
with the measured quantity (run with -s to see them, -v for per-test
status). Tolerances are pinned here and nowhere else.
"""
import time

import numpy as np
import pytest

import zanova as z
from zanova import experiments
from zanova.oracle import _expand, anova_terms, grid_variance
from zanova.subsets import all_subsets

from conftest import brownian_centered_exact

SEED = 20240601


def _report(tag, detail):
    print(f"{tag} PASS: {detail}")


CATALOG_BY_MEASURE = [
    (z.BrownianKernel(), z.Measure("uniform", 0.0, 5.0)),
    (z.ShiftedBrownianKernel(), z.Measure("uniform", 0.0, 5.0)),
    (z.GaussianKernel(1.0), z.Measure("uniform", 0.0, 5.0)),
    (z.Matern32Kernel(1.0), z.Measure("uniform", 0.0, 5.0)),
    (z.BrownianKernel(), z.Measure("normal", 0.0, 8.0)),
    (z.ShiftedBrownianKernel(), z.Measure("normal", 0.0, 8.0)),
    (z.GaussianKernel(1.0), z.Measure("normal", -8.0, 8.0)),
    (z.Matern32Kernel(1.0), z.Measure("normal", -8.0, 8.0)),
]


def test_ac01_riemann_split_error_bound():
    start = time.perf_counter()
    rule = z.build_rule(z.uniform_measure(0.0, 5.0), 100)
    split = z.decompose(z.BrownianKernel(), rule)
    grid = np.linspace(0.0, 5.0, 50)
    approx = split.k0_gram(grid, grid)
    exact = brownian_centered_exact(grid[:, None], grid[None, :])
    worst = float(np.max(np.abs(approx - exact)))
    elapsed = time.perf_counter() - start
    assert worst < 0.02
    assert elapsed < 1.0
    _report("AC01", f"max split error {worst:.2e} < 0.02 in {elapsed:.3f}s")


def test_ac02_discrete_centering():
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for base, measure in CATALOG_BY_MEASURE:
        rule = z.build_rule(measure, 100)
        split = z.decompose(base, rule)
        xs = rng.uniform(measure.a, measure.b, size=100)
        averages = split.k0_gram(xs, rule.nodes) @ rule.weights
        worst = max(worst, float(np.max(np.abs(averages))))
    elapsed = time.perf_counter() - start
    assert worst < 1e-10
    assert elapsed < 1.0
    _report("AC02", f"max |centered average| {worst:.2e} < 1e-10 in {elapsed:.3f}s")


def test_ac03_centered_grams_stay_psd():
    rng = np.random.default_rng(SEED + 1)
    worst_ratio = np.inf
    for base, measure in CATALOG_BY_MEASURE:
        rule = z.build_rule(measure, 100)
        split = z.decompose(base, rule)
        pts = np.sort(rng.uniform(measure.a, measure.b, size=30))
        gram = split.k0_gram(pts, pts)
        eigs = np.linalg.eigvalsh((gram + gram.T) / 2.0)
        assert eigs[0] >= -1e-8 * eigs[-1]
        worst_ratio = min(worst_ratio, eigs[0] / eigs[-1])
    _report("AC03", f"min eigenvalue ratio {worst_ratio:.2e} >= -1e-8 on both measure kinds")


@pytest.fixture(scope="module")
def benchmark_fit():
    start = time.perf_counter()
    rule = z.build_rule(z.uniform_measure(0.0, 1.0), 60)
    split = z.decompose(z.Matern32Kernel(1.0), rule)
    kernel = z.AnovaKernel([split, split], mode=z.MODE_STAR)
    design = z.lhs_maximin(20, [(0.0, 1.0)] * 2, seed=SEED, restarts=100)
    observations = z.GFunction([1.0, 2.0])(design)
    est = z.AnovaGP(kernel, 0.0).fit(design, observations)
    return {"rule": rule, "est": est, "design": design, "observations": observations,
            "built_in": time.perf_counter() - start}


def test_ac04_submodels_match_grid_oracle(benchmark_fit):
    start = time.perf_counter()
    est = benchmark_fit["est"]
    rule = benchmark_fit["rule"]
    surface = z.GridFunction.from_function(est.predict, (rule, rule))
    projections = anova_terms(surface)
    g0, g1 = np.meshgrid(rule.nodes, rule.nodes, indexing="ij")
    pts = np.column_stack([g0.ravel(), g1.ravel()])
    closed = {(): np.full(g0.size, est.mean_term()),
              (0,): est.predict_submodel(pts, "1"),
              (1,): est.predict_submodel(pts, "2"),
              (0, 1): est.predict_submodel(pts, "1,2")}
    worst = 0.0
    for dims, values in projections.items():
        expanded = np.broadcast_to(_expand(values, dims, (0, 1)), g0.shape)
        worst = max(worst, float(np.max(np.abs(expanded.ravel() - closed[dims]))))
    assert worst < 1e-8

    means = [abs(z.term_mean(est, mask)) for mask in (1, 2, 3)]
    assert max(means) < 1e-10

    keys = [(0,), (1,), (0, 1)]
    inner = max(abs(z.grid_inner((rule, rule), u, projections[u], v, projections[v]))
                for i, u in enumerate(keys) for v in keys[i + 1:])
    assert inner < 1e-8

    elapsed = benchmark_fit["built_in"] + time.perf_counter() - start
    assert elapsed < 10.0
    _report("AC04", f"oracle gap {worst:.2e} < 1e-8, means {max(means):.2e} < 1e-10, "
                    f"inner {inner:.2e} < 1e-8 in {elapsed:.2f}s")


def test_ac05_standard_mode_terms_not_centered(benchmark_fit):
    rule = benchmark_fit["rule"]
    kernel = z.AnovaKernel([z.Matern32Kernel(1.0)] * 2, mode=z.MODE_STANDARD,
                           rules=[rule, rule])
    est = z.AnovaGP(kernel, 0.0).fit(benchmark_fit["design"], benchmark_fit["observations"])
    first_mean = abs(z.term_mean(est, 1))
    assert first_mean > 1e-3
    _report("AC05", f"standard-mode |mean of first term| {first_mean:.3f} > 1e-3")


def test_ac06_share_normalization_and_grid_ratios(benchmark_fit):
    rng = np.random.default_rng(SEED + 2)
    worst_norm = 0.0
    for d in (2, 3, 4, 5):
        rule = z.build_rule(z.uniform_measure(0.0, 1.0), 40)
        split = z.decompose(z.Matern32Kernel(1.0), rule)
        kernel = z.AnovaKernel([split] * d, mode=z.MODE_STAR)
        X = z.lhs_maximin(int(rng.integers(12, 25)), [(0.0, 1.0)] * d,
                          seed=rng, restarts=20)
        F = rng.standard_normal(len(X))
        est = z.AnovaGP(kernel, 0.0).fit(X, F)
        report = z.sobol_indices(est, max_order=None)
        worst_norm = max(worst_norm, abs(sum(report.indices.values()) - 1.0))
    assert worst_norm < 1e-8

    est2 = benchmark_fit["est"]
    rule2 = benchmark_fit["rule"]
    report2 = z.sobol_indices(est2, max_order=None)
    surface = z.GridFunction.from_function(est2.predict, (rule2, rule2))
    terms = anova_terms(surface)
    keys = [(0,), (1,), (0, 1)]
    total = sum(grid_variance(terms[k], [rule2] * len(k)) for k in keys)
    worst_ratio = 0.0
    for mask, dims in ((1, (0,)), (2, (1,)), (3, (0, 1))):
        ratio = grid_variance(terms[dims], [rule2] * len(dims)) / total
        worst_ratio = max(worst_ratio, abs(ratio - report2.indices[mask]))
    assert worst_ratio < 1e-6
    _report("AC06", f"normalization gap {worst_norm:.2e} < 1e-8 for d<=5, "
                    f"grid-ratio gap {worst_ratio:.2e} < 1e-6")


def test_ac07_g_benchmark_replication_matches_reference_rows():
    cfg = {
        "test": {"test": "g", "a": [0.2, 0.6, 0.8, 100.0, 100.0]},
        "kernels": [{"family": "matern32", "theta": 1.0}],
        "measure": {"kind": "uniform", "a": 0.0, "b": 1.0, "nodes": 100},
        "design": {"n": 50, "seed": SEED, "restarts": 100},
        "replicates": 25,
        "subsets": ["1", "2", "3", "1,2", "1,3", "2,3", "1,2,3"],
    }
    start = time.perf_counter()
    result = experiments.run_replicate_g(cfg, out_dir=None, threads=2)
    elapsed = time.perf_counter() - start
    means = result["summary"]["matern32"]
    reference = {"1": (0.44, 0.06), "2": (0.24, 0.05), "3": (0.19, 0.04)}
    for label, (center, spread) in reference.items():
        assert abs(means[label] - center) <= 2.0 * spread
    for label in ("1,2", "1,3", "2,3", "1,2,3"):
        assert means[label] <= 0.03
    assert 0.85 <= means["sum"] <= 0.95
    _report("AC07", f"first-order means ({means['1']:.3f}, {means['2']:.3f}, "
                    f"{means['3']:.3f}), sum {means['sum']:.3f} in [0.85, 0.95], "
                    f"{elapsed:.1f}s for 25 replicates")


def test_ac08_analytic_share_formula():
    a = [0.2, 0.6, 0.8, 100.0, 100.0]
    expected = {"1": 0.43, "2": 0.24, "3": 0.19, "1,2": 0.06,
                "1,3": 0.04, "2,3": 0.03, "1,2,3": 0.01}
    for label, value in expected.items():
        assert round(z.g_analytic_index(label, a), 2) == value
    first_three = sum(z.g_analytic_index(lbl, a) for lbl in ("1", "2", "3"))
    assert first_three > 0.8655
    cumulative = sum(z.g_analytic_index(lbl, a) for lbl in expected)
    assert cumulative > 0.9995
    assert cumulative == pytest.approx(0.9999, abs=5e-4)
    _report("AC08", f"seven reference shares at 2 d.p., first three {first_three:.4f}, "
                    f"cumulative {cumulative:.6f}")


def test_ac09_noise_replication_matches_reference_rows():
    cfg = {
        "test": {"test": "quadratic"},
        "kernel": {"family": "gaussian", "theta": 10.0},
        "scale": 200.0,
        "measure": {"kind": "normal", "a": -8.0, "b": 8.0, "nodes": 100},
        "design": {"n": 20, "bounds": [[-5.0, 5.0], [-5.0, 5.0]],
                   "seed": SEED, "restarts": 100},
        "lambdas": [0.0, 1.0, 4.0, 16.0],
        "replicates": 25,
        "subsets": ["1", "2", "1,2"],
    }
    start = time.perf_counter()
    result = experiments.run_replicate_noise(cfg, out_dir=None, threads=2)
    elapsed = time.perf_counter() - start
    clean = result["summary"][0.0]
    for label, value in (("1", 0.25), ("2", 0.50), ("1,2", 0.25)):
        assert abs(clean["mean"][label] - value) <= 0.01
        assert clean["std"][label] < 0.01
    noisy = result["summary"][4.0]
    reference = {"1": (0.24, 0.08), "2": (0.46, 0.06), "1,2": (0.30, 0.05)}
    for label, (center, spread) in reference.items():
        assert abs(noisy["mean"][label] - center) <= 2.0 * spread
    spreads = [result["summary"][lam]["std"]["1"] for lam in (0.0, 1.0, 4.0, 16.0)]
    assert all(spreads[i] < spreads[i + 1] for i in range(3))
    _report("AC09", f"noise-free shares ({clean['mean']['1']:.3f}, {clean['mean']['2']:.3f}, "
                    f"{clean['mean']['1,2']:.3f}), spread path {[round(s, 3) for s in spreads]}, "
                    f"{elapsed:.1f}s")


def test_ac10_interpolation_and_completeness():
    rng = np.random.default_rng(SEED + 3)
    worst_interp = 0.0
    worst_total = 0.0
    for d in (1, 2, 3, 4, 5):
        for trial in range(3):
            rule = z.build_rule(z.uniform_measure(0.0, 1.0), 30)
            base = z.Matern32Kernel(1.0) if trial % 2 == 0 else z.ShiftedBrownianKernel()
            split = z.decompose(base, rule)
            kernel = z.AnovaKernel([split] * d, mode=z.MODE_STAR)
            n = int(rng.integers(5, 25))
            X = z.lhs_maximin(n, [(0.0, 1.0)] * d, seed=rng, restarts=10)
            F = rng.standard_normal(n)
            est = z.AnovaGP(kernel, 0.0).fit(X, F)
            gap = np.max(np.abs(est.predict(X) - F)) / np.max(np.abs(F))
            worst_interp = max(worst_interp, float(gap))
            assert gap <= 1e-6
            probe = rng.uniform(0.0, 1.0, size=(5, d))
            total = est.predict_submodel(probe, 0)
            for mask in all_subsets(d):
                total = total + est.predict_submodel(probe, mask)
            completeness = float(np.max(np.abs(total - est.predict(probe))))
            worst_total = max(worst_total, completeness)
            assert completeness < 1e-10
    _report("AC10", f"interpolation gap {worst_interp:.2e} <= 1e-6, "
                    f"completeness gap {worst_total:.2e} < 1e-10 over d<=5")


def test_ac11_replicated_study_is_byte_deterministic(tmp_path):
    cfg = {
        "test": {"test": "g", "a": [0.2, 0.6, 0.8]},
        "kernels": [{"family": "matern32", "theta": 1.0},
                    {"family": "shifted-brownian"}],
        "measure": {"kind": "uniform", "a": 0.0, "b": 1.0, "nodes": 40},
        "design": {"n": 12, "seed": SEED, "restarts": 20},
        "replicates": 4,
        "subsets": ["1", "2", "3"],
    }
    experiments.run_replicate_g(dict(cfg), out_dir=tmp_path / "first", threads=1)
    experiments.run_replicate_g(dict(cfg), out_dir=tmp_path / "second", threads=3)
    first = (tmp_path / "first" / "replicate_g.csv").read_bytes()
    second = (tmp_path / "second" / "replicate_g.csv").read_bytes()
    assert first == second
    _report("AC11", f"replicate-g output byte-identical across runs ({len(first)} bytes)")
