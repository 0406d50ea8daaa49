"""Samplers and Monte Carlo estimators mirroring the deterministic evaluators.

The value of the cube-form polynomial is the expectation of f at a vector
of independent scaled binomial counts; the simplex form uses the first d
counts of a multinomial over d+1 categories. Derivatives replace f by its
scaled mixed differences drawn at reduced trial counts. All streams come
from a counter-based Philox generator keyed by (seed, operation tag).
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from .bernstein import (
    CUBE,
    SIMPLEX,
    Kind,
    _check_kind,
    _prepare_points,
    build_model,
    derivative,
    evaluate,
)
from .finite_diff import DiffSpec, delta_mixed
from .multiindex import as_index, modulus

# Spread below these levels is roundoff, not sampling variance: the integrand
# is constant (often zero) in exact arithmetic and the estimate is reported
# with zero standard error. The absolute floor covers annihilated derivatives
# whose values hover around zero at the noise scale of the stencil.
_NEAR_CONSTANT_REL = 1e-10
_NEAR_CONSTANT_ABS = 1e-9


@dataclass(frozen=True)
class McReport:
    """Monte Carlo estimate, its standard error, and a deterministic reference."""

    estimate: float
    std_error: float
    samples: int
    reference: float | None = None


def z_score(report: McReport) -> float:
    """(estimate - reference) / std_error, 0 for exact zero-variance agreement."""
    if report.reference is None:
        raise ValueError("report carries no reference value")
    diff = report.estimate - report.reference
    if report.std_error == 0.0:
        if abs(diff) <= 1e-12 + 1e-9 * abs(report.reference):
            return 0.0
        return math.inf if diff > 0 else -math.inf
    return diff / report.std_error


def make_stream(seed: int, tag: str) -> np.random.Generator:
    """Philox stream derived deterministically from a seed and an operation tag."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    key = zlib.crc32(tag.encode("utf8"))
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(key,))
    return np.random.Generator(np.random.Philox(ss))


def sample_binomial_vector(n, x, rng: np.random.Generator, size: int | None = None):
    """Independent per-axis binomial counts with success probabilities x.

    n may be a scalar or a per-axis array of trial counts. With size=None a
    single (d,) draw is returned, otherwise a (size, d) array.
    """
    P, _ = _prepare_points(x, CUBE, np.shape(x)[-1])
    p = P[0]
    trials = np.asarray(n, dtype=np.int64)
    if np.any(trials < 0):
        raise ValueError("trial counts must be non-negative")
    shape = (p.size,) if size is None else (int(size), p.size)
    return rng.binomial(trials, p, size=shape)


def sample_multinomial_projection(n, x, rng: np.random.Generator, size: int | None = None):
    """First d counts of n trials over d+1 categories with probabilities (x, 1-|x|).

    Drawn as sequential conditional binomials: category i receives a
    binomial share of the remaining trials with the renormalized
    probability x_i / remaining mass.
    """
    P, _ = _prepare_points(x, SIMPLEX, np.shape(x)[-1])
    p = P[0]
    n = int(n)
    if n < 0:
        raise ValueError("trial count must be non-negative")
    m = 1 if size is None else int(size)
    remaining = np.full(m, n, dtype=np.int64)
    mass = 1.0
    counts = np.zeros((m, p.size), dtype=np.int64)
    for i in range(p.size):
        if p[i] <= 0.0:
            cond = 0.0
        elif mass <= p[i]:
            cond = 1.0
        else:
            cond = p[i] / mass
        counts[:, i] = rng.binomial(remaining, cond)
        remaining -= counts[:, i]
        mass = max(mass - p[i], 0.0)
    return counts[0] if size is None else counts


def _draw_scaled_args(kind: Kind, f_dim: int, trials, n: int, p, rng, m: int):
    """(m, d) matrix of count vectors divided by the model degree n."""
    if kind.name == "cube":
        draws = rng.binomial(np.asarray(trials, dtype=np.int64), p, size=(m, f_dim))
    elif kind.name == "simplex":
        draws = sample_multinomial_projection(int(trials), p, rng, size=m)
    else:
        d1 = kind.d1
        left = sample_multinomial_projection(int(trials[0]), p[:d1], rng, size=m)
        right = rng.binomial(
            np.asarray(trials[1], dtype=np.int64), p[d1:], size=(m, f_dim - d1)
        )
        draws = np.hstack([left, right])
    return draws / float(n)


def _summarize(vals: np.ndarray, samples: int, reference: float) -> McReport:
    vmin = float(vals.min())
    vmax = float(vals.max())
    if vmin == vmax:
        return McReport(vmin, 0.0, samples, reference)
    spread = vmax - vmin
    if spread <= _NEAR_CONSTANT_REL * max(abs(vmin), abs(vmax)) or spread <= (
        _NEAR_CONSTANT_ABS * max(1.0, abs(reference))
    ):
        return McReport(float(vals.mean()), 0.0, samples, reference)
    std = float(vals.std(ddof=1) / math.sqrt(samples)) if samples >= 2 else 0.0
    return McReport(float(vals.mean()), std, samples, reference)


def mc_eval(kind: Kind, f, n: int, x, samples: int, seed: int) -> McReport:
    """Monte Carlo value estimate with the deterministic value as reference."""
    n = int(n)
    if n < 1:
        raise ValueError("degree must be positive")
    if samples < 1:
        raise ValueError("at least one sample is required")
    d = np.shape(x)[-1]
    _check_kind(kind, d)
    P, _ = _prepare_points(x, kind, d)
    p = P[0]
    rng = make_stream(seed, "mc_eval")
    if kind.name == "cube":
        trials = n
    elif kind.name == "simplex":
        trials = n
    else:
        trials = (n, np.full(d - kind.d1, n))
    args = _draw_scaled_args(kind, d, trials, n, p, rng, int(samples))
    vals = np.asarray(f(args), dtype=np.float64)
    reference = float(evaluate(build_model(f, kind, n, d), p))
    return _summarize(vals, int(samples), reference)


def mc_deriv(kind: Kind, f, k, n: int, x, samples: int, seed: int) -> McReport:
    """Monte Carlo derivative estimate with the closed form as reference.

    Draws use reduced trial counts (n - k_i per cube axis, n - |k| for a
    simplex block) so every difference stencil stays inside the domain.
    Orders that annihilate the polynomial give a zero-variance zero.
    """
    order = as_index(k)
    n = int(n)
    if n < 1:
        raise ValueError("degree must be positive")
    if samples < 1:
        raise ValueError("at least one sample is required")
    d = len(order)
    _check_kind(kind, d)
    P, _ = _prepare_points(x, kind, d)
    p = P[0]
    if kind.name == "cube":
        degenerate = any(ki > n for ki in order)
    elif kind.name == "simplex":
        degenerate = modulus(order) > n
    else:
        block = order[: kind.d1]
        tail = order[kind.d1 :]
        degenerate = modulus(block) > n or any(ki > n for ki in tail)
    if degenerate:
        return McReport(0.0, 0.0, int(samples), 0.0)

    if kind.name == "cube":
        trials = n - np.asarray(order, dtype=np.int64)
        prefactor = 1.0
        for ki in order:
            prefactor *= _fall(n, ki)
    elif kind.name == "simplex":
        trials = n - modulus(order)
        prefactor = _fall(n, modulus(order))
    else:
        trials = (n - modulus(block), n - np.asarray(tail, dtype=np.int64))
        prefactor = _fall(n, modulus(block))
        for ki in tail:
            prefactor *= _fall(n, ki)

    rng = make_stream(seed, "mc_deriv")
    args = _draw_scaled_args(kind, d, trials, n, p, rng, int(samples))
    spec = DiffSpec(order, (1.0 / n,) * d)
    vals = prefactor * np.asarray(delta_mixed(f, args, spec), dtype=np.float64)
    reference = float(derivative(kind, f, order, n, p))
    return _summarize(vals, int(samples), reference)


def _fall(n: int, k: int) -> float:
    out = 1.0
    for m in range(k):
        out *= n - m
    return out


def lln_diagnostic(kind: Kind, n_list, x, samples: int, seed: int):
    """Mean l1 deviation of scaled count vectors from x, one row per degree."""
    d = np.shape(x)[-1]
    _check_kind(kind, d)
    P, _ = _prepare_points(x, kind, d)
    p = P[0]
    rng = make_stream(seed, "lln")
    rows = []
    for n in n_list:
        n = int(n)
        if n < 1:
            raise ValueError("degrees must be positive")
        if kind.name == "cube":
            trials = n
        elif kind.name == "simplex":
            trials = n
        else:
            trials = (n, np.full(d - kind.d1, n))
        args = _draw_scaled_args(kind, d, trials, n, p, rng, int(samples))
        rows.append((n, float(np.abs(args - p).sum(axis=1).mean())))
    return rows
