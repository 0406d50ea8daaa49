"""Multi-index arithmetic, lattice enumeration, and log-scale coefficients."""

from __future__ import annotations

import math
from enum import Enum

import numpy as np


class LatticeKind(Enum):
    """CUBE bounds every entry by the degree; SIMPLEX bounds the entry sum."""

    CUBE = "cube"
    SIMPLEX = "simplex"


def as_index(entries) -> tuple[int, ...]:
    """Normalize a multi-index to a tuple of non-negative ints, or raise."""
    try:
        items = list(entries)
    except TypeError:
        raise ValueError("multi-index must be a sequence of integers") from None
    if not items:
        raise ValueError("multi-index needs at least one entry")
    out = []
    for e in items:
        ie = int(e)
        if ie != e:
            raise ValueError(f"multi-index entry {e!r} is not an integer")
        if ie < 0:
            raise ValueError(f"multi-index entry {e} is negative")
        out.append(ie)
    return tuple(out)


def modulus(j) -> int:
    """Sum of the entries of a multi-index."""
    return int(sum(as_index(j)))


# Cumulative table of ln(m!), grown on demand. Accumulated sums keep the
# relative error near machine precision for degrees well past 10^4.
_LOG_FACT = np.zeros(1)


def _log_factorials(n: int) -> np.ndarray:
    global _LOG_FACT
    if n >= _LOG_FACT.size:
        hi = max(n, 2 * (_LOG_FACT.size - 1))
        ext = np.log(np.arange(_LOG_FACT.size, hi + 1, dtype=np.float64))
        _LOG_FACT = np.concatenate([_LOG_FACT, _LOG_FACT[-1] + np.cumsum(ext)])
    return _LOG_FACT


def log_factorial(n):
    """ln n!, vectorized over arrays of non-negative integers."""
    arr = np.asarray(n, dtype=np.int64)
    if np.any(arr < 0):
        raise ValueError("factorial argument must be non-negative")
    table = _log_factorials(int(arr.max()) if arr.size else 0)
    out = table[arr]
    return float(out) if out.ndim == 0 else out


def log_multinomial(n: int, j):
    """ln of n! / (j_1! ... j_d! (n - |j|)!).

    Accepts a single multi-index of shape (d,) or a stack of shape (L, d);
    requires |j| <= n.
    """
    n = int(n)
    if n < 0:
        raise ValueError("degree must be non-negative")
    J = np.asarray(j, dtype=np.int64)
    if J.ndim == 0:
        J = J[None]
    if np.any(J < 0):
        raise ValueError("multi-index entries must be non-negative")
    mod = J.sum(axis=-1)
    if np.any(mod > n):
        raise ValueError("multi-index modulus exceeds the degree")
    table = _log_factorials(n)
    out = table[n] - table[J].sum(axis=-1) - table[n - mod]
    return float(out) if out.ndim == 0 else out


def log_binomial(n: int, j):
    """ln of C(n, j) for 0 <= j <= n, vectorized over j."""
    n = int(n)
    if n < 0:
        raise ValueError("degree must be non-negative")
    J = np.asarray(j, dtype=np.int64)
    if np.any(J < 0):
        raise ValueError("lower index must be non-negative")
    if np.any(J > n):
        raise ValueError("lower index exceeds the upper index")
    table = _log_factorials(n)
    out = table[n] - table[J] - table[n - J]
    return float(out) if out.ndim == 0 else out


def enumerate_lattice(kind: LatticeKind, n: int, d: int) -> np.ndarray:
    """All admissible indices as an (L, d) int array in lexicographic order."""
    if not isinstance(kind, LatticeKind):
        raise TypeError("kind must be a LatticeKind")
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if n < 0:
        raise ValueError("degree must be non-negative")
    if kind is LatticeKind.CUBE:
        axes = np.meshgrid(*([np.arange(n + 1, dtype=np.int64)] * d), indexing="ij")
        return np.stack(axes, axis=-1).reshape(-1, d)
    return _simplex_rows(n, d)


def _simplex_rows(n: int, d: int) -> np.ndarray:
    if d == 1:
        return np.arange(n + 1, dtype=np.int64)[:, None]
    blocks = []
    for first in range(n + 1):
        tail = _simplex_rows(n - first, d - 1)
        head = np.full((tail.shape[0], 1), first, dtype=np.int64)
        blocks.append(np.hstack([head, tail]))
    return np.vstack(blocks)


def lattice_size(kind: LatticeKind, n: int, d: int) -> int:
    """Closed-form cardinality of the lattice."""
    if kind is LatticeKind.CUBE:
        return (n + 1) ** d
    return math.comb(n + d, d)
