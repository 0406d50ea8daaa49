"""Bernstein approximation on the unit cube, the unit simplex, and products
of a simplex block with a cube block.

A model stores the samples f(j/n) over the lattice of its domain kind in a
canonical lexicographic order. Evaluation contracts that tensor with
binomial or multinomial basis weights computed in log space, with explicit
boundary handling (0^0 = 1). Mixed partial derivatives of the polynomial
are evaluated in closed form: normalized forward differences of f over a
degree-reduced lattice, contracted with the reduced basis. An independent
oracle differentiates the basis functions instead, via repeated product-
rule passes over an explicit term expansion, and never touches the
difference path.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .multiindex import (
    LatticeKind,
    as_index,
    enumerate_lattice,
    lattice_size,
    log_binomial,
    log_multinomial,
    modulus,
)

# Points this far outside the boundary are clamped; farther out is an error.
CLAMP_TOL = 1e-12

# Intermediate arrays in chunked contractions stay below this many floats.
_CHUNK_FLOATS = 4_000_000


class DomainError(ValueError):
    """A point lies outside the model domain by more than the clamp tolerance."""


@dataclass(frozen=True)
class Kind:
    """Domain kind tag; mixed kinds carry the width d1 of the simplex block."""

    name: str
    d1: int | None = None


CUBE = Kind("cube")
SIMPLEX = Kind("simplex")


def mixed(d1: int) -> Kind:
    """Mixed domain: a d1-simplex times a cube over the remaining axes."""
    d1 = int(d1)
    if d1 < 1:
        raise ValueError("the simplex block needs at least one axis")
    return Kind("mixed", d1)


def _check_kind(kind: Kind, d: int):
    if not isinstance(kind, Kind):
        raise TypeError("kind must be a Kind")
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if kind.name in ("cube", "simplex"):
        if kind.d1 is not None:
            raise ValueError(f"{kind.name} kind does not take a block width")
    elif kind.name == "mixed":
        if kind.d1 is None or not 1 <= kind.d1 <= d:
            raise ValueError("mixed kind needs 1 <= d1 <= dim")
    else:
        raise ValueError(f"unknown kind {kind.name!r}")


def _prepare_points(x, kind: Kind, d: int):
    """Validate and clamp evaluation points; returns ((m, d) array, single?)."""
    P = np.asarray(x, dtype=np.float64)
    single = P.ndim == 1
    if single:
        P = P[None, :]
    if P.ndim != 2:
        raise ValueError("points must be a (d,) vector or an (m, d) array")
    if P.shape[1] != d:
        raise ValueError(f"point dimension {P.shape[1]} does not match domain dimension {d}")
    P = P.copy()
    if not np.all(np.isfinite(P)):
        raise DomainError("point has a non-finite coordinate")
    if np.any(P < -CLAMP_TOL):
        raise DomainError(f"coordinate {P.min()} is negative beyond tolerance")
    P[P < 0] = 0.0
    if kind.name == "cube":
        _clamp_upper(P)
    elif kind.name == "simplex":
        _clamp_block_sum(P)
    else:
        d1 = kind.d1
        _clamp_block_sum(P[:, :d1])
        if d1 < d:
            _clamp_upper(P[:, d1:])
    return P, single


def _clamp_upper(block):
    if np.any(block > 1.0 + CLAMP_TOL):
        raise DomainError(f"coordinate {block.max()} exceeds 1 beyond tolerance")
    np.minimum(block, 1.0, out=block)


def _clamp_block_sum(block):
    s = block.sum(axis=1)
    if np.any(s > 1.0 + CLAMP_TOL):
        raise DomainError(f"coordinate sum {s.max()} exceeds 1 beyond tolerance")
    over = s > 1.0
    if np.any(over):
        block[over] /= s[over, None]


@dataclass(frozen=True)
class BernsteinModel:
    """Sampled values f(j/n) over the lattice of (kind, degree, dim)."""

    kind: Kind
    degree: int
    dim: int
    samples: np.ndarray

    def __post_init__(self):
        _check_kind(self.kind, self.dim)
        if self.degree < 1:
            raise ValueError("degree must be positive")
        arr = np.array(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("samples must be a flat array in lattice order")
        expected = model_size(self.kind, self.degree, self.dim)
        if arr.size != expected:
            raise ValueError(f"expected {expected} samples, got {arr.size}")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)


def model_size(kind: Kind, n: int, d: int) -> int:
    _check_kind(kind, d)
    if kind.name == "cube":
        return lattice_size(LatticeKind.CUBE, n, d)
    if kind.name == "simplex":
        return lattice_size(LatticeKind.SIMPLEX, n, d)
    d1 = kind.d1
    return lattice_size(LatticeKind.SIMPLEX, n, d1) * (n + 1) ** (d - d1)


def model_lattice(kind: Kind, n: int, d: int) -> np.ndarray:
    """The sample lattice of the kind, lexicographic on full index tuples."""
    _check_kind(kind, d)
    if kind.name == "cube":
        return enumerate_lattice(LatticeKind.CUBE, n, d)
    if kind.name == "simplex":
        return enumerate_lattice(LatticeKind.SIMPLEX, n, d)
    d1 = kind.d1
    left = enumerate_lattice(LatticeKind.SIMPLEX, n, d1)
    if d1 == d:
        return left
    right = enumerate_lattice(LatticeKind.CUBE, n, d - d1)
    return _cross(left, right)


def _cross(left, right):
    return np.hstack(
        [np.repeat(left, right.shape[0], axis=0), np.tile(right, (left.shape[0], 1))]
    )


def build_model(f, kind: Kind, n: int, d: int) -> BernsteinModel:
    """Sample f over the lattice points j/n in canonical order."""
    _check_kind(kind, d)
    n = int(n)
    if n < 1:
        raise ValueError("degree must be positive")
    lattice = model_lattice(kind, n, d)
    pts = lattice / float(n)
    try:
        vals = np.asarray(f(pts), dtype=np.float64)
        if vals.shape != (lattice.shape[0],):
            raise ValueError("batch evaluator returned a wrong shape")
    except Exception:
        vals = _sample_pointwise(f, pts, lattice)
    return BernsteinModel(kind=kind, degree=n, dim=int(d), samples=vals)


def _sample_pointwise(f, pts, lattice):
    out = np.empty(pts.shape[0])
    for i, p in enumerate(pts):
        try:
            out[i] = float(f(p))
        except Exception as err:
            idx = tuple(int(v) for v in lattice[i])
            raise RuntimeError(f"evaluator failed at lattice index {idx}") from err
    return out


# ---------------------------------------------------------------------------
# basis weights


def _axis_weights(degree: int, xs: np.ndarray) -> np.ndarray:
    """Rows of C(degree, j) x^j (1-x)^(degree-j) for x in xs, 0^0 = 1."""
    j = np.arange(degree + 1)
    w = np.zeros((xs.size, degree + 1))
    inner = (xs > 0.0) & (xs < 1.0)
    if np.any(inner):
        xi = xs[inner]
        logw = log_binomial(degree, j) + j * np.log(xi)[:, None]
        logw += (degree - j) * np.log1p(-xi)[:, None]
        w[inner] = np.exp(logw)
    w[xs == 0.0, 0] = 1.0
    w[xs == 1.0, degree] = 1.0
    return w


def _simplex_weights(degree: int, J: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Multinomial basis weights over lattice J at points P, boundary exact.

    Factors with a zero base and positive exponent kill the term; zero
    exponents contribute nothing even on the boundary.
    """
    mod = J.sum(axis=1)
    rem = degree - mod
    logc = np.atleast_1d(log_multinomial(degree, J))
    s = P.sum(axis=1)
    r = np.maximum(1.0 - s, 0.0)
    lx = np.where(P > 0.0, np.log(np.where(P > 0.0, P, 1.0)), 0.0)
    lr = np.where(r > 0.0, np.log(np.where(r > 0.0, r, 1.0)), 0.0)
    logw = lx @ J.T + np.outer(lr, rem) + logc[None, :]
    w = np.exp(logw)
    # masking is only needed for boundary points, which most batches lack
    if np.any(P <= 0.0):
        dead = ((P <= 0.0).astype(np.float64) @ (J > 0).T.astype(np.float64)) > 0.0
        w[dead] = 0.0
    if np.any(r <= 0.0):
        w[np.outer(r <= 0.0, rem > 0)] = 0.0
    return w


def _tensor_contract(coef: np.ndarray, mats) -> np.ndarray:
    """Contract a coefficient tensor with one per-point weight row per axis."""
    m = mats[0].shape[0]
    tail = coef.size // coef.shape[0]
    step = max(1, _CHUNK_FLOATS // max(tail, 1))
    out = np.empty(m)
    flat = coef.reshape(coef.shape[0], -1)
    for lo in range(0, m, step):
        hi = min(m, lo + step)
        t = mats[0][lo:hi] @ flat
        for ax in range(1, coef.ndim):
            t = t.reshape(hi - lo, coef.shape[ax], -1)
            t = np.einsum("pj,pjr->pr", mats[ax][lo:hi], t)
        out[lo:hi] = t.reshape(-1)
    return out


def _chunked_matmul(weight_fn, coefs: np.ndarray, m: int) -> np.ndarray:
    step = max(1, _CHUNK_FLOATS // max(coefs.size, 1))
    out = np.empty(m)
    for lo in range(0, m, step):
        hi = min(m, lo + step)
        out[lo:hi] = weight_fn(lo, hi) @ coefs
    return out


# ---------------------------------------------------------------------------
# evaluation


def eval_cube(model: BernsteinModel, x):
    """Tensor-product Bernstein value at x in the unit cube."""
    if model.kind.name != "cube":
        raise ValueError("model kind is not cube")
    n, d = model.degree, model.dim
    P, single = _prepare_points(x, model.kind, d)
    coef = model.samples.reshape((n + 1,) * d)
    mats = [_axis_weights(n, P[:, i]) for i in range(d)]
    out = _tensor_contract(coef, mats)
    return float(out[0]) if single else out


def eval_simplex(model: BernsteinModel, x):
    """Multinomial Bernstein value at x in the unit simplex."""
    if model.kind.name != "simplex":
        raise ValueError("model kind is not simplex")
    n, d = model.degree, model.dim
    P, single = _prepare_points(x, model.kind, d)
    J = enumerate_lattice(LatticeKind.SIMPLEX, n, d)
    out = _chunked_matmul(
        lambda lo, hi: _simplex_weights(n, J, P[lo:hi]), model.samples, P.shape[0]
    )
    return float(out[0]) if single else out


def eval_mixed(model: BernsteinModel, x):
    """Value of the simplex-times-cube form at x in the mixed domain."""
    if model.kind.name != "mixed":
        raise ValueError("model kind is not mixed")
    n, d, d1 = model.degree, model.dim, model.kind.d1
    P, single = _prepare_points(x, model.kind, d)
    J = model_lattice(model.kind, n, d)
    cube_degrees = [n] * (d - d1)

    def weights(lo, hi):
        return _mixed_weights(P[lo:hi], d1, n, cube_degrees, J)

    out = _chunked_matmul(weights, model.samples, P.shape[0])
    return float(out[0]) if single else out


def _mixed_weights(P, d1, simplex_degree, cube_degrees, J):
    w = _simplex_weights(simplex_degree, J[:, :d1], P[:, :d1])
    for i, deg in enumerate(cube_degrees):
        ax = _axis_weights(deg, P[:, d1 + i])
        w *= ax[:, J[:, d1 + i]]
    return w


def evaluate(model: BernsteinModel, x):
    """Kind dispatch for model evaluation."""
    return {"cube": eval_cube, "simplex": eval_simplex, "mixed": eval_mixed}[
        model.kind.name
    ](model, x)


# ---------------------------------------------------------------------------
# closed-form derivatives


def _falling(n: int, k: int) -> float:
    out = 1.0
    for m in range(k):
        out *= n - m
    return out


def _cube_prefactor(n: int, order) -> float:
    # product of ratios (n - m)/n stays O(1); the n^|k| factor is restored
    # against the normalized differences
    ratio = 1.0
    for k in order:
        for m in range(k):
            ratio *= (n - m) / n
    return ratio


def _sample_full_tensor(f, n: int, d: int) -> np.ndarray:
    lattice = enumerate_lattice(LatticeKind.CUBE, n, d)
    vals = np.asarray(f(lattice / float(n)), dtype=np.float64)
    return vals.reshape((n + 1,) * d)


def _diff_tensor(T: np.ndarray, order) -> np.ndarray:
    for ax, k in enumerate(order):
        for _ in range(k):
            T = np.diff(T, axis=ax)
    return T


def _cube_deriv_core(f, order, n: int, d: int):
    """Normalized difference tensor over the reduced cube lattice, with scale."""
    T = _diff_tensor(_sample_full_tensor(f, n, d), order)
    scale = _cube_prefactor(n, order) * float(n) ** modulus(order)
    return T, scale


def deriv_cube(f, k, n: int, x):
    """Mixed partial of the cube-form polynomial of f, evaluated at x.

    Sum over indices with j_i <= n - k_i of the step-1/n mixed difference of
    f at j/n, against the basis of per-axis degree n - k_i, scaled by the
    per-axis falling factorials. Every difference stencil stays inside the
    cube because j_i + k_i <= n. Orders with any k_i > n give 0.
    """
    order = as_index(k)
    n = int(n)
    if n < 1:
        raise ValueError("degree must be positive")
    d = len(order)
    P, single = _prepare_points(x, CUBE, d)
    if any(ki > n for ki in order):
        return 0.0 if single else np.zeros(P.shape[0])
    coef, scale = _cube_deriv_core(f, order, n, d)
    mats = [_axis_weights(n - order[i], P[:, i]) for i in range(d)]
    out = scale * _tensor_contract(coef, mats)
    return float(out[0]) if single else out


def _simplex_deriv_core(f, order, n: int, d: int):
    """Difference values on the reduced simplex lattice, lattice, prefactor."""
    J = enumerate_lattice(LatticeKind.SIMPLEX, n, d)
    vals = np.asarray(f(J / float(n)), dtype=np.float64)
    full = np.full((n + 1,) * d, np.nan)
    full[tuple(J.T)] = vals
    diffed = _diff_tensor(full, order)
    reduced = enumerate_lattice(LatticeKind.SIMPLEX, n - modulus(order), d)
    delta = diffed[tuple(reduced.T)]
    if not np.all(np.isfinite(delta)):
        raise RuntimeError("difference stencil left the sample lattice")
    return delta, reduced, _falling(n, modulus(order))


def deriv_simplex(f, k, n: int, x):
    """Mixed partial of the simplex-form polynomial of f, evaluated at x.

    Sum over |j| <= n - |k| of the step-1/n mixed difference of f at j/n,
    against the multinomial basis of degree n - |k|, scaled by
    n(n-1)...(n-|k|+1). Stencils stay inside the simplex because
    |j| + |k| <= n. Orders with |k| > n give 0.
    """
    order = as_index(k)
    n = int(n)
    if n < 1:
        raise ValueError("degree must be positive")
    d = len(order)
    P, single = _prepare_points(x, SIMPLEX, d)
    if modulus(order) > n:
        return 0.0 if single else np.zeros(P.shape[0])
    delta, reduced, prefactor = _simplex_deriv_core(f, order, n, d)
    deg = n - modulus(order)
    out = prefactor * _chunked_matmul(
        lambda lo, hi: _simplex_weights(deg, reduced, P[lo:hi]), delta, P.shape[0]
    )
    return float(out[0]) if single else out


def deriv_mixed(f, k, n: int, x, d1: int):
    """Mixed partial of the simplex-times-cube polynomial (experimental).

    Composes the simplex rule over the first d1 axes with the cube rule
    over the rest. The polynomial identity is exact; uniform convergence of
    these derivatives carries no guarantee here and is only explored by the
    verification harness.
    """
    order = as_index(k)
    n = int(n)
    if n < 1:
        raise ValueError("degree must be positive")
    d = len(order)
    kind = mixed(d1)
    _check_kind(kind, d)
    P, single = _prepare_points(x, kind, d)
    block = order[:d1]
    tail = order[d1:]
    if modulus(block) > n or any(ki > n for ki in tail):
        return 0.0 if single else np.zeros(P.shape[0])
    J = model_lattice(kind, n, d)
    vals = np.asarray(f(J / float(n)), dtype=np.float64)
    full = np.full((n + 1,) * d, np.nan)
    full[tuple(J.T)] = vals
    diffed = _diff_tensor(full, order)
    left = enumerate_lattice(LatticeKind.SIMPLEX, n - modulus(block), d1)
    if d1 == d:
        reduced = left
    else:
        axes = np.meshgrid(
            *[np.arange(n - ki + 1, dtype=np.int64) for ki in tail], indexing="ij"
        )
        right = np.stack(axes, axis=-1).reshape(-1, d - d1)
        reduced = _cross(left, right)
    delta = diffed[tuple(reduced.T)]
    if not np.all(np.isfinite(delta)):
        raise RuntimeError("difference stencil left the sample lattice")
    prefactor = _falling(n, modulus(block))
    for ki in tail:
        prefactor *= _falling(n, ki)
    sdeg = n - modulus(block)
    cdegs = [n - ki for ki in tail]

    def weights(lo, hi):
        return _mixed_weights(P[lo:hi], d1, sdeg, cdegs, reduced)

    out = prefactor * _chunked_matmul(weights, delta, P.shape[0])
    return float(out[0]) if single else out


def derivative(kind: Kind, f, k, n: int, x):
    """Kind dispatch for closed-form derivative evaluation."""
    if kind.name == "cube":
        return deriv_cube(f, k, n, x)
    if kind.name == "simplex":
        return deriv_simplex(f, k, n, x)
    return deriv_mixed(f, k, n, x, kind.d1)


# ---------------------------------------------------------------------------
# differentiated-basis oracle


@functools.lru_cache(maxsize=64)
def _exact_binomial_row(n: int) -> np.ndarray:
    # integer-exact coefficients keep the oracle's terms correct to one
    # rounding each; the log-space route would cap agreement near 1e-14
    row = np.array([float(math.comb(n, j)) for j in range(n + 1)])
    row.setflags(write=False)
    return row


@functools.lru_cache(maxsize=32)
def _exact_multinomial_simplex(n: int, d: int) -> np.ndarray:
    J = enumerate_lattice(LatticeKind.SIMPLEX, n, d)
    out = np.empty(J.shape[0])
    for i, row in enumerate(J):
        rem = n
        c = 1
        for v in row:
            c *= math.comb(rem, int(v))
            rem -= int(v)
        out[i] = float(c)
    out.setflags(write=False)
    return out


def _safe_pow(base: np.ndarray, exps: np.ndarray) -> np.ndarray:
    """base[:, None] ** exps with negative exponents mapped to 0.

    Negative exponents only occur where the accompanying coefficient is an
    exact zero, so zeroing them keeps products finite without changing sums.
    """
    e = np.clip(exps, 0, None).astype(np.float64)
    out = base[:, None] ** e[None, :]
    out[:, exps < 0] = 0.0
    return out


def _cube_deriv_axis_vectors(n: int, k: int, xs: np.ndarray) -> np.ndarray:
    """k-th derivative of every degree-n basis function on one axis.

    Each basis function starts as a single term c x^a (1-x)^b; a product-
    rule pass maps a term to an x-power term and a (1-x)-power term, and k
    passes build the derivative expansion, evaluated termwise.
    """
    j = np.arange(n + 1, dtype=np.float64)
    terms = {(0, 0): _exact_binomial_row(n).copy()}
    for _ in range(k):
        nxt = {}
        for (a, b), c in terms.items():
            _bump(nxt, (a + 1, b), c * (j - a))
            _bump(nxt, (a, b + 1), -c * (n - j - b))
        terms = nxt
    out = np.zeros((xs.size, n + 1))
    one = 1.0 - xs
    idx = np.arange(n + 1)
    for (a, b), c in terms.items():
        out += c * _safe_pow(xs, idx - a) * _safe_pow(one, n - idx - b)
    return out


def _bump(table, key, value):
    if key in table:
        table[key] = table[key] + value
    else:
        table[key] = value


def _simplex_deriv_weights(n: int, order, J: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Differentiated multinomial basis over lattice J at points P.

    Terms are tracked as (per-axis power drops, barycentric-factor drop)
    groups with per-lattice coefficient vectors; each product-rule pass
    splits a group into a power-rule image and a chain-rule image.
    """
    d = J.shape[1]
    mod = J.sum(axis=1)
    coefs = _exact_multinomial_simplex(n, d)
    if coefs.size != J.shape[0]:
        raise ValueError("lattice does not match the full simplex enumeration")
    groups = {((0,) * d, 0): coefs.copy()}
    for ax, k in enumerate(order):
        for _ in range(k):
            nxt = {}
            for (drops, t), c in groups.items():
                bumped = list(drops)
                bumped[ax] += 1
                _bump(nxt, (tuple(bumped), t), c * (J[:, ax] - drops[ax]))
                _bump(nxt, (drops, t + 1), -c * (n - mod - t))
            groups = nxt
    s = P.sum(axis=1)
    r = np.maximum(1.0 - s, 0.0)
    out = np.zeros((P.shape[0], J.shape[0]))
    for (drops, t), c in groups.items():
        term = _safe_pow(r, n - mod - t)
        for ax in range(d):
            term *= _safe_pow(P[:, ax], J[:, ax] - drops[ax])
        out += c * term
    return out


def oracle_deriv(f, kind: Kind, k, n: int, x):
    """Derivative of the same polynomial via differentiated basis functions.

    Independent of the difference-based path: it consumes the original
    samples f(j/n) on the full lattice and analytic derivatives of the
    basis. Intended as a cross-check, not as the production evaluator.
    """
    order = as_index(k)
    n = int(n)
    if n < 1:
        raise ValueError("degree must be positive")
    d = len(order)
    _check_kind(kind, d)
    P, single = _prepare_points(x, kind, d)
    if kind.name == "cube":
        if any(ki > n for ki in order):
            out = np.zeros(P.shape[0])
        else:
            coef = _sample_full_tensor(f, n, d)
            mats = [_cube_deriv_axis_vectors(n, order[i], P[:, i]) for i in range(d)]
            out = _tensor_contract(coef, mats)
    elif kind.name == "simplex":
        if modulus(order) > n:
            out = np.zeros(P.shape[0])
        else:
            J = enumerate_lattice(LatticeKind.SIMPLEX, n, d)
            vals = np.asarray(f(J / float(n)), dtype=np.float64)
            out = _chunked_matmul(
                lambda lo, hi: _simplex_deriv_weights(n, order, J, P[lo:hi]),
                vals,
                P.shape[0],
            )
    else:
        out = _oracle_mixed(f, kind, order, n, d, P)
    return float(out[0]) if single else out


def _oracle_mixed(f, kind, order, n, d, P):
    d1 = kind.d1
    block = order[:d1]
    tail = order[d1:]
    if modulus(block) > n or any(ki > n for ki in tail):
        return np.zeros(P.shape[0])
    J = model_lattice(kind, n, d)
    vals = np.asarray(f(J / float(n)), dtype=np.float64)
    Js = enumerate_lattice(LatticeKind.SIMPLEX, n, d1)
    ls = Js.shape[0]
    lc = vals.size // ls
    grid = vals.reshape(ls, lc)
    Jc = (
        enumerate_lattice(LatticeKind.CUBE, n, d - d1)
        if d1 < d
        else np.zeros((1, 0), dtype=np.int64)
    )
    m = P.shape[0]
    out = np.empty(m)
    step = max(1, _CHUNK_FLOATS // max(ls * lc, 1))
    for lo in range(0, m, step):
        hi = min(m, lo + step)
        ws = _simplex_deriv_weights(n, block, Js, P[lo:hi, :d1])
        wc = np.ones((hi - lo, lc))
        for i, ki in enumerate(tail):
            vec = _cube_deriv_axis_vectors(n, ki, P[lo:hi, d1 + i])
            wc *= vec[:, Jc[:, i]]
        out[lo:hi] = np.einsum("ps,pc,sc->p", ws, wc, grid)
    return out


# ---------------------------------------------------------------------------
# separable grid paths (tensor-product grids on the cube)


def _grid_contract(coef: np.ndarray, mats) -> np.ndarray:
    subs = {1: "a,pa->p", 2: "ab,pa,qb->pq", 3: "abc,pa,qb,rc->pqr"}
    if coef.ndim not in subs:
        raise ValueError("grid contraction supports dimensions 1 to 3")
    return np.einsum(subs[coef.ndim], coef, *mats, optimize=True)


def eval_cube_grid(model: BernsteinModel, axes) -> np.ndarray:
    """Evaluate a cube model over a tensor-product grid, one array per axis.

    Returns the value tensor indexed like meshgrid(*axes, indexing="ij").
    Far cheaper than pointwise evaluation on full grids.
    """
    if model.kind.name != "cube":
        raise ValueError("model kind is not cube")
    n, d = model.degree, model.dim
    cols = _grid_axes(axes, d)
    coef = model.samples.reshape((n + 1,) * d)
    return _grid_contract(coef, [_axis_weights(n, c) for c in cols])


def deriv_cube_grid(f, k, n: int, axes) -> np.ndarray:
    """Closed-form cube derivative over a tensor-product grid."""
    order = as_index(k)
    n = int(n)
    if n < 1:
        raise ValueError("degree must be positive")
    d = len(order)
    cols = _grid_axes(axes, d)
    if any(ki > n for ki in order):
        return np.zeros(tuple(c.size for c in cols))
    coef, scale = _cube_deriv_core(f, order, n, d)
    mats = [_axis_weights(n - order[i], cols[i]) for i in range(d)]
    return scale * _grid_contract(coef, mats)


def _grid_axes(axes, d):
    cols = [np.asarray(a, dtype=np.float64) for a in axes]
    if len(cols) != d:
        raise ValueError("one coordinate array per axis is required")
    out = []
    for c in cols:
        c2, _ = _prepare_points(c[:, None], CUBE, 1)
        out.append(c2[:, 0])
    return out


# ---------------------------------------------------------------------------
# serialization


def dump_model(model: BernsteinModel) -> str:
    """Text form: header "kind n d [d1 d2]", then one sample per line."""
    head = f"{model.kind.name} {model.degree} {model.dim}"
    if model.kind.name == "mixed":
        head += f" {model.kind.d1} {model.dim - model.kind.d1}"
    lines = [head]
    lines.extend(format(v, ".17g") for v in model.samples)
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> BernsteinModel:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty model text")
    head = lines[0].split()
    if head[0] in ("cube", "simplex"):
        if len(head) != 3:
            raise ValueError("header must be 'kind n d'")
        kind = CUBE if head[0] == "cube" else SIMPLEX
        n, d = int(head[1]), int(head[2])
    elif head[0] == "mixed":
        if len(head) != 5:
            raise ValueError("mixed header must be 'mixed n d d1 d2'")
        n, d, d1, d2 = (int(v) for v in head[1:])
        if d1 + d2 != d:
            raise ValueError("mixed header blocks do not sum to the dimension")
        kind = mixed(d1)
    else:
        raise ValueError(f"unknown kind {head[0]!r} in model header")
    samples = np.array([float(v) for v in lines[1:]])
    return BernsteinModel(kind=kind, degree=n, dim=d, samples=samples)


def save_model(model: BernsteinModel, path):
    with open(path, "w", encoding="utf8") as fh:
        fh.write(dump_model(model))


def load_model(path) -> BernsteinModel:
    with open(path, "r", encoding="utf8") as fh:
        return parse_model(fh.read())
