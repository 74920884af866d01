"""Strict JSON configuration parsing for the experiment CLI.

Unknown keys are rejected and every error names the offending location
with a JSON-path anchor such as ``$.design.bounds[1]``, so a malformed
config fails before any computation starts.
"""
from __future__ import annotations

import json

import numpy as np

from .anova import MODE_STANDARD, MODE_STAR, AnovaKernel
from .centering import decompose
from .kernels import (BrownianKernel, GaussianKernel, Matern32Kernel,
                      ShiftedBrownianKernel, UnivariateKernel)
from .measures import DEFAULT_NODES, Measure, QuadratureRule, build_rule
from .subsets import parse_subset_label
from .testbed import DoeSpec, GFunction, QuadraticFunction


class ConfigError(ValueError):
    """Configuration rejected; the message carries a $.path anchor."""


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as err:
        raise ConfigError(f"$: cannot read config file {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"$: invalid JSON in {path}: {err}") from err
    if not isinstance(cfg, dict):
        raise ConfigError("$: top-level config must be a JSON object")
    return cfg


def check_keys(obj, path, required=(), optional=()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ConfigError(f"{path}: missing required keys {missing}")


def _number(obj, key, path, default=None, minimum=None, exclusive=False, integer=False):
    if key not in obj:
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
        value = int(value)
    else:
        value = float(value)
    if minimum is not None:
        if exclusive and not value > minimum:
            raise ConfigError(f"{path}.{key}: must be > {minimum}, got {value}")
        if not exclusive and not value >= minimum:
            raise ConfigError(f"{path}.{key}: must be >= {minimum}, got {value}")
    return value


KERNEL_FAMILIES = ("brownian", "shifted-brownian", "gaussian", "matern32")


def kernel_from_config(cfg, path="$.kernel") -> UnivariateKernel:
    """Build a catalog kernel from {"family": ..., "theta": ...}."""
    check_keys(cfg, path, required=("family",), optional=("theta",))
    family = cfg["family"]
    if family not in KERNEL_FAMILIES:
        raise ConfigError(f"{path}.family: unknown kernel family {family!r}; "
                          f"expected one of {list(KERNEL_FAMILIES)}")
    if family in ("brownian", "shifted-brownian"):
        if "theta" in cfg:
            raise ConfigError(f"{path}.theta: {family} takes no lengthscale")
        return BrownianKernel() if family == "brownian" else ShiftedBrownianKernel()
    theta = _number(cfg, "theta", path, default=1.0, minimum=0.0, exclusive=True)
    return GaussianKernel(theta) if family == "gaussian" else Matern32Kernel(theta)


def rule_from_config(cfg, path="$.measure", nodes_override=None) -> QuadratureRule:
    """Build a quadrature rule from {"kind", "a", "b", "nodes"}."""
    check_keys(cfg, path, required=("kind", "a", "b"), optional=("nodes",))
    kind = cfg["kind"]
    if kind not in ("uniform", "normal"):
        raise ConfigError(f"{path}.kind: expected 'uniform' or 'normal', got {kind!r}")
    a = _number(cfg, "a", path)
    b = _number(cfg, "b", path)
    nodes = nodes_override if nodes_override is not None else \
        _number(cfg, "nodes", path, default=DEFAULT_NODES, minimum=2, integer=True)
    try:
        return build_rule(Measure(kind, a, b), int(nodes))
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def anova_from_config(cfg, path="$.kernel", nodes_override=None) -> AnovaKernel:
    """Build a product kernel from its per-dimension component specs."""
    check_keys(cfg, path, required=("components",), optional=("mode", "scale"))
    mode = cfg.get("mode", MODE_STAR)
    if mode not in (MODE_STAR, MODE_STANDARD):
        raise ConfigError(f"{path}.mode: expected 'star' or 'standard', got {mode!r}")
    scale = _number(cfg, "scale", path, default=1.0, minimum=0.0, exclusive=True)
    entries = cfg["components"]
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"{path}.components: expected a non-empty list")
    components = []
    rules = []
    for idx, entry in enumerate(entries):
        epath = f"{path}.components[{idx}]"
        check_keys(entry, epath, required=("kernel", "measure"))
        base = kernel_from_config(entry["kernel"], f"{epath}.kernel")
        rule = rule_from_config(entry["measure"], f"{epath}.measure", nodes_override)
        rules.append(rule)
        if mode == MODE_STAR:
            try:
                components.append(decompose(base, rule))
            except ValueError as err:
                raise ConfigError(f"{epath}: {err}") from err
        else:
            components.append(base)
    if mode == MODE_STAR:
        return AnovaKernel(components, mode=mode, scale=scale)
    return AnovaKernel(components, mode=mode, scale=scale, rules=rules)


def benchmark_from_config(cfg, path="$.test"):
    """Build a benchmark function from {"test": "g"|"quadratic", ...}."""
    check_keys(cfg, path, required=("test",), optional=("a",))
    name = cfg["test"]
    if name == "g":
        if "a" not in cfg:
            raise ConfigError(f"{path}.a: the g benchmark needs its coefficient vector")
        a = cfg["a"]
        if not isinstance(a, list) or not a:
            raise ConfigError(f"{path}.a: expected a non-empty list of positive numbers")
        try:
            return GFunction(np.asarray(a, dtype=float))
        except (TypeError, ValueError) as err:
            raise ConfigError(f"{path}.a: {err}") from err
    if name == "quadratic":
        if "a" in cfg:
            raise ConfigError(f"{path}.a: the quadratic benchmark takes no coefficients")
        return QuadraticFunction()
    raise ConfigError(f"{path}.test: expected 'g' or 'quadratic', got {name!r}")


def doe_from_config(cfg, path="$.design", default_bounds=None, seed_override=None) -> DoeSpec:
    """Build a design spec; bounds fall back to the per-dimension supports."""
    check_keys(cfg, path, required=("n",), optional=("bounds", "seed", "restarts"))
    n = _number(cfg, "n", path, minimum=2, integer=True)
    restarts = _number(cfg, "restarts", path, default=100, minimum=1, integer=True)
    if "bounds" in cfg:
        raw = cfg["bounds"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{path}.bounds: expected a non-empty list of [lo, hi] pairs")
        bounds = []
        for idx, pair in enumerate(raw):
            if (not isinstance(pair, list)) or len(pair) != 2 or \
                    any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in pair):
                raise ConfigError(f"{path}.bounds[{idx}]: expected a [lo, hi] number pair")
            bounds.append((float(pair[0]), float(pair[1])))
        bounds = tuple(bounds)
    elif default_bounds is not None:
        bounds = tuple(default_bounds)
    else:
        raise ConfigError(f"{path}.bounds: required (no per-dimension supports to fall back on)")
    seed = seed_override
    if seed is None:
        seed = _number(cfg, "seed", path, minimum=0, integer=True)
    if seed is None:
        raise ConfigError(f"{path}.seed: a seed is required for reproducible designs")
    try:
        return DoeSpec(n=n, bounds=bounds, seed=int(seed), restarts=restarts)
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def subsets_from_config(labels, d, path="$.subsets") -> list[int]:
    if not isinstance(labels, list) or not labels:
        raise ConfigError(f"{path}: expected a non-empty list of subset labels")
    masks = []
    for idx, label in enumerate(labels):
        if not isinstance(label, str):
            raise ConfigError(f"{path}[{idx}]: expected a label string like \"1,2\"")
        try:
            mask = parse_subset_label(label, d)
        except ValueError as err:
            raise ConfigError(f"{path}[{idx}]: {err}") from err
        if mask == 0:
            raise ConfigError(f"{path}[{idx}]: the empty subset has no index")
        if mask not in masks:
            masks.append(mask)
    return masks
