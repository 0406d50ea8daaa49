"""Test-function corpus, sup-norm error grids, and convergence tables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .bernstein import (
    Kind,
    _check_kind,
    build_model,
    deriv_cube_grid,
    derivative,
    eval_cube_grid,
    evaluate,
)
from .finite_diff import ScalarField
from .multiindex import LatticeKind, as_index, enumerate_lattice, modulus

# Rows whose sup error sits at roundoff carry no rate information.
RATE_FLOOR = 1e-13

CORPUS_NAMES = ("const1", "affine", "quad", "prodlin", "sincos", "expsum")

# every builtin has closed-form mixed partials of any order; registering past
# order four keeps deep mixed differences checkable against analytic values
CORPUS_SMOOTHNESS = 6


@dataclass(frozen=True)
class FunctionSpec:
    """A corpus entry: evaluator plus analytic mixed partials up to |k| <= smoothness."""

    name: str
    dim: int
    smoothness: int
    value: ScalarField
    partial: Mapping[tuple, ScalarField]

    def partial_field(self, k) -> ScalarField:
        key = as_index(k)
        if len(key) != self.dim:
            raise ValueError("order dimension does not match the function")
        if key not in self.partial:
            raise ValueError(
                f"no analytic partial of order {key} registered for {self.name!r}"
            )
        return self.partial[key]


def _const_field(dim, c):
    return ScalarField(lambda x: np.full(x.shape[:-1], float(c)))


def _affine_coeffs(dim):
    return np.array([(i + 1) / (dim + 1) for i in range(dim)]), 1.0 / 3.0


def _make_partial(name, dim, k):
    total = sum(k)
    if name == "const1":
        return _const_field(dim, 1.0 if total == 0 else 0.0)
    if name == "affine":
        a, b = _affine_coeffs(dim)
        if total == 0:
            return ScalarField(lambda x: x @ a + b)
        if total == 1:
            return _const_field(dim, a[k.index(1)])
        return _const_field(dim, 0.0)
    if name == "quad":
        if total == 0:
            return ScalarField(lambda x: (x**2).sum(axis=-1))
        if total == 1:
            axis = k.index(1)
            return ScalarField(lambda x, i=axis: 2.0 * x[..., i])
        if total == 2 and max(k) == 2:
            return _const_field(dim, 2.0)
        return _const_field(dim, 0.0)
    if name == "prodlin":
        if max(k) >= 2:
            return _const_field(dim, 0.0)
        keep = [i for i in range(dim) if k[i] == 0]

        def ev(x, keep=tuple(keep)):
            out = np.ones(x.shape[:-1])
            for i in keep:
                out = out * x[..., i]
            return out

        return ScalarField(ev)
    if name == "sincos":
        # odd axes carry sin(pi x), even axes cos(pi x), counted from axis 1
        shifts = np.asarray(k, dtype=np.float64) * (np.pi / 2.0)
        scale = np.pi ** total

        def ev(x, shifts=shifts, scale=scale):
            out = np.full(x.shape[:-1], scale)
            for i in range(shifts.size):
                phase = np.pi * x[..., i] + shifts[i]
                out = out * (np.sin(phase) if i % 2 == 0 else np.cos(phase))
            return out

        return ScalarField(ev)
    if name == "expsum":
        factor = (1.0 / dim) ** total
        return ScalarField(lambda x, c=factor: c * np.exp(x.mean(axis=-1)))
    raise ValueError(f"unknown corpus function {name!r}")


def corpus_member(name: str, dim: int, smoothness: int = CORPUS_SMOOTHNESS) -> FunctionSpec:
    """Build one corpus entry with partials registered for all |k| <= smoothness."""
    if name not in CORPUS_NAMES:
        raise ValueError(
            f"unknown function {name!r}; available: {', '.join(CORPUS_NAMES)}"
        )
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    table = {}
    for row in enumerate_lattice(LatticeKind.SIMPLEX, smoothness, dim):
        k = tuple(int(v) for v in row)
        table[k] = _make_partial(name, dim, k)
    value = table[(0,) * dim]
    return FunctionSpec(name=name, dim=dim, smoothness=smoothness, value=value, partial=table)


def builtin_corpus(dims=(1, 2, 3)) -> list[FunctionSpec]:
    """Corpus entries for every builtin function at every requested dimension."""
    return [corpus_member(name, d) for d in dims for name in CORPUS_NAMES]


@dataclass(frozen=True)
class GridSpec:
    """Deterministic evaluation grid: per-axis uniform points inset from the boundary."""

    kind: Kind
    points_per_axis: int = 33
    inset: float = 0.0

    def __post_init__(self):
        if self.points_per_axis < 2:
            raise ValueError("at least two points per axis are required")
        if not 0.0 <= self.inset < 0.5:
            raise ValueError("inset must lie in [0, 0.5)")


def grid_axis(grid: GridSpec) -> np.ndarray:
    return np.linspace(grid.inset, 1.0 - grid.inset, grid.points_per_axis)


def grid_points(grid: GridSpec, dim: int) -> np.ndarray:
    """Full grid as an (m, d) array; simplex blocks filter the cube grid."""
    _check_kind(grid.kind, dim)
    axis = grid_axis(grid)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = np.stack(mesh, axis=-1).reshape(-1, dim)
    if grid.kind.name == "simplex":
        pts = pts[pts.sum(axis=1) <= 1.0 - grid.inset]
    elif grid.kind.name == "mixed":
        pts = pts[pts[:, : grid.kind.d1].sum(axis=1) <= 1.0 - grid.inset]
    return pts


def sup_error(kind: Kind, spec: FunctionSpec, k, n: int, grid: GridSpec) -> float:
    """Max over the grid of |approximation derivative - analytic partial|.

    Order zero compares plain evaluation. Cube models use the separable
    tensor-grid path when the dimension allows it.
    """
    order = as_index(k)
    if len(order) != spec.dim:
        raise ValueError("order dimension does not match the function")
    if grid.kind.name != kind.name or grid.kind.d1 != kind.d1:
        raise ValueError("grid kind does not match the model kind")
    target = spec.partial_field(order)
    if kind.name == "cube" and spec.dim <= 3:
        axes = [grid_axis(grid)] * spec.dim
        if modulus(order) == 0:
            vals = eval_cube_grid(build_model(spec.value, kind, n, spec.dim), axes)
        else:
            vals = deriv_cube_grid(spec.value, order, n, axes)
        vals = vals.reshape(-1)
        pts = grid_points(grid, spec.dim)
    else:
        pts = grid_points(grid, spec.dim)
        if modulus(order) == 0:
            vals = evaluate(build_model(spec.value, kind, n, spec.dim), pts)
        else:
            vals = derivative(kind, spec.value, order, n, pts)
    ref = np.asarray(target(pts), dtype=np.float64)
    return float(np.max(np.abs(vals - ref)))


@dataclass(frozen=True)
class ConvergenceReport:
    """Sup errors over increasing degrees with a fitted log-log rate."""

    function: str
    kind: Kind
    k: tuple[int, ...]
    rows: tuple[tuple[int, float], ...]
    fitted_rate: float | None


def _min_degree(kind: Kind, order) -> int:
    if kind.name == "cube":
        return max(order) + 1
    if kind.name == "simplex":
        return modulus(order) + 1
    block = modulus(order[: kind.d1])
    tail = order[kind.d1 :]
    return max([block] + list(tail)) + 1


def convergence_table(kind: Kind, spec: FunctionSpec, k, n_list, grid: GridSpec) -> ConvergenceReport:
    """One sup_error row per degree, plus the least-squares slope in log-log."""
    order = as_index(k)
    degrees = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ValueError("degrees must be strictly increasing")
    floor = _min_degree(kind, order)
    if degrees[0] < floor:
        raise ValueError(f"degrees must be at least {floor} for this order")
    rows = tuple((n, sup_error(kind, spec, order, n, grid)) for n in degrees)
    kept = [(n, e) for n, e in rows if e >= RATE_FLOOR]
    if len(kept) >= 2:
        ln_n = np.log([n for n, _ in kept])
        ln_e = np.log([e for _, e in kept])
        rate = float(np.polyfit(ln_n, ln_e, 1)[0])
    else:
        rate = None
    return ConvergenceReport(
        function=spec.name, kind=kind, k=order, rows=rows, fitted_rate=rate
    )


def report_to_json(report: ConvergenceReport) -> dict:
    """JSON-ready dict with the exact field names used by the CLI."""
    return {
        "function": report.function,
        "kind": report.kind.name,
        "k": list(report.k),
        "rows": [[n, e] for n, e in report.rows],
        "fitted_rate": report.fitted_rate,
    }


def report_to_csv(report: ConvergenceReport) -> str:
    """CSV with '#' metadata comments, a header line, and one row per degree."""
    rate = "na" if report.fitted_rate is None else repr(report.fitted_rate)
    lines = [
        f"# function={report.function}",
        f"# kind={report.kind.name}",
        "# k=" + ",".join(str(v) for v in report.k),
        f"# fitted_rate={rate}",
        "n,sup_error",
    ]
    lines.extend(f"{n},{e!r}" for n, e in report.rows)
    return "\n".join(lines) + "\n"
