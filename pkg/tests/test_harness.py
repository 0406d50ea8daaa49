import json
import math

import numpy as np
import pytest

import mvbernstein as mv
from mvbernstein.harness import (
    CORPUS_NAMES,
    GridSpec,
    builtin_corpus,
    convergence_table,
    corpus_member,
    grid_axis,
    grid_points,
    report_to_csv,
    report_to_json,
    sup_error,
)

# errors below this sit at roundoff; monotonicity is only meaningful above it
NOISE_FLOOR = 1e-12


class TestCorpus:
    def test_names_and_shape(self):
        members = builtin_corpus()
        assert {m.name for m in members} == set(CORPUS_NAMES)
        assert {m.dim for m in members} == {1, 2, 3}
        assert all(m.smoothness >= 4 for m in members)

    def test_partials_complete_to_registered_order(self):
        spec = corpus_member("expsum", 3)
        count = sum(1 for k in spec.partial)
        assert spec.smoothness >= 4
        assert count == math.comb(spec.smoothness + 3, 3)
        assert all(sum(k) <= spec.smoothness for k in spec.partial)

    def test_zero_partial_is_value(self):
        for name in CORPUS_NAMES:
            spec = corpus_member(name, 2)
            pts = np.random.default_rng(0).random((10, 2)) / 2
            assert np.array_equal(spec.value(pts), spec.partial_field((0, 0))(pts))

    def test_const1_partials(self):
        spec = corpus_member("const1", 2)
        pts = np.random.default_rng(1).random((5, 2))
        assert np.all(spec.partial_field((1, 0))(pts) == 0.0)
        assert np.all(spec.value(pts) == 1.0)

    def test_quad_second_partial(self):
        spec = corpus_member("quad", 3)
        pts = np.random.default_rng(2).random((5, 3))
        assert np.all(spec.partial_field((2, 0, 0))(pts) == 2.0)
        assert np.all(spec.partial_field((1, 1, 0))(pts) == 0.0)

    def test_sincos_first_partial_at_zero(self):
        spec = corpus_member("sincos", 1)
        got = spec.partial_field((1,))(np.array([0.0]))
        assert got == pytest.approx(math.pi, rel=1e-14)

    def test_sincos_partials_by_finite_differences(self):
        spec = corpus_member("sincos", 2)
        x = np.array([0.23, 0.41])
        h = 1e-5
        for k in [(1, 0), (0, 1), (1, 1), (2, 0)]:
            dspec = mv.DiffSpec(k, (h, h))
            approx = mv.delta_mixed(spec.value, x, dspec) / h ** sum(k)
            exact = float(spec.partial_field(k)(x + np.array(k) * h / 2))
            # forward differences carry O(h) bias; compare loosely at midpoint
            assert approx == pytest.approx(exact, rel=5e-4, abs=5e-4)

    def test_expsum_partial_scaling(self):
        spec = corpus_member("expsum", 2)
        x = np.array([0.3, 0.5])
        base = float(spec.value(x))
        assert spec.partial_field((2, 1))(x) == pytest.approx(base / 8, rel=1e-14)

    def test_prodlin_partials(self):
        spec = corpus_member("prodlin", 3)
        x = np.array([0.2, 0.5, 0.7])
        assert spec.partial_field((1, 1, 0))(x) == pytest.approx(0.7)
        assert spec.partial_field((2, 0, 0))(x) == 0.0

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="available"):
            corpus_member("cubic", 2)

    def test_missing_partial(self):
        spec = corpus_member("quad", 2)
        with pytest.raises(ValueError, match="no analytic partial"):
            spec.partial_field((spec.smoothness + 1, 0))


class TestGrids:
    def test_axis_and_determinism(self):
        g = GridSpec(mv.CUBE, 5, 0.0)
        assert np.array_equal(grid_axis(g), np.linspace(0, 1, 5))
        assert np.array_equal(grid_points(g, 2), grid_points(g, 2))

    def test_simplex_filters_cube(self):
        g = GridSpec(mv.SIMPLEX, 5, 0.0)
        pts = grid_points(g, 2)
        assert np.all(pts.sum(axis=1) <= 1.0)
        full = GridSpec(mv.CUBE, 5, 0.0)
        assert pts.shape[0] < grid_points(full, 2).shape[0]

    def test_inset(self):
        g = GridSpec(mv.CUBE, 4, 0.1)
        pts = grid_points(g, 1)
        assert pts.min() == pytest.approx(0.1)
        assert pts.max() == pytest.approx(0.9)

    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(mv.CUBE, 1, 0.0)
        with pytest.raises(ValueError):
            GridSpec(mv.CUBE, 5, 0.5)

    def test_mixed_grid(self):
        g = GridSpec(mv.mixed(2), 4, 0.0)
        pts = grid_points(g, 3)
        assert np.all(pts[:, :2].sum(axis=1) <= 1.0)


class TestSupError:
    def test_affine_floor(self):
        spec = corpus_member("affine", 2)
        g = GridSpec(mv.CUBE, 9, 0.0)
        for k in [(0, 0), (1, 0), (0, 1)]:
            assert sup_error(mv.CUBE, spec, k, 12, g) <= 1e-10

    def test_const_floor(self):
        spec = corpus_member("const1", 2)
        g = GridSpec(mv.SIMPLEX, 9, 0.0)
        assert sup_error(mv.SIMPLEX, spec, (0, 0), 10, g) <= 1e-12

    def test_quad_closed_form_maximum(self):
        # error of the degree-n fit of x^2 is x(1-x)/n, peaking at 1/4n
        spec = corpus_member("quad", 1)
        g = GridSpec(mv.CUBE, 33, 0.0)
        got = sup_error(mv.CUBE, spec, (0,), 10, g)
        assert got == pytest.approx(0.025, abs=1e-9)

    def test_grid_kind_must_match(self):
        spec = corpus_member("quad", 2)
        with pytest.raises(ValueError):
            sup_error(mv.CUBE, spec, (0, 0), 8, GridSpec(mv.SIMPLEX, 5, 0.0))

    def test_cube_fast_path_matches_pointwise(self):
        spec = corpus_member("sincos", 2)
        g = GridSpec(mv.CUBE, 7, 0.0)
        fast = sup_error(mv.CUBE, spec, (1, 1), 9, g)
        pts = grid_points(g, 2)
        slow = float(
            np.max(
                np.abs(
                    mv.deriv_cube(spec.value, (1, 1), 9, pts)
                    - spec.partial_field((1, 1))(pts)
                )
            )
        )
        assert fast == pytest.approx(slow, rel=1e-12)


class TestConvergenceTable:
    def test_quad_one_dimension_rate(self):
        spec = corpus_member("quad", 1)
        g = GridSpec(mv.CUBE, 33, 0.0)
        rep = convergence_table(mv.CUBE, spec, (0,), (10, 20, 40, 80), g)
        errors = [e for _, e in rep.rows]
        assert errors == pytest.approx([0.025, 0.0125, 0.00625, 0.003125], abs=1e-9)
        assert rep.fitted_rate == pytest.approx(-1.0, abs=1e-3)

    def test_affine_rate_not_applicable(self):
        spec = corpus_member("affine", 2)
        g = GridSpec(mv.SIMPLEX, 9, 0.0)
        rep = convergence_table(mv.SIMPLEX, spec, (1, 0), (8, 16), g)
        assert rep.fitted_rate is None

    def test_sincos_cross_derivative_bracket(self):
        spec = corpus_member("sincos", 2)
        g = GridSpec(mv.CUBE, 33, 0.0)
        rep = convergence_table(mv.CUBE, spec, (1, 1), (8, 16, 32, 64), g)
        errors = [e for _, e in rep.rows]
        assert all(b < a for a, b in zip(errors, errors[1:]))
        assert -1.4 <= rep.fitted_rate <= -0.6

    def test_degree_preconditions(self):
        spec = corpus_member("quad", 2)
        g = GridSpec(mv.SIMPLEX, 9, 0.0)
        with pytest.raises(ValueError):
            convergence_table(mv.SIMPLEX, spec, (1, 1), (2, 4), g)
        with pytest.raises(ValueError):
            convergence_table(mv.SIMPLEX, spec, (0, 0), (8, 8), g)

    @pytest.mark.parametrize("kind", [mv.CUBE, mv.SIMPLEX])
    @pytest.mark.parametrize("dim", [1, 2])
    def test_monotone_convergence_across_corpus(self, kind, dim):
        g = GridSpec(kind, 17, 0.0)
        orders = [(0,) * dim, (1,) + (0,) * (dim - 1)]
        if dim == 2:
            orders += [(1, 1), (2, 0)]
        for name in CORPUS_NAMES:
            spec = corpus_member(name, dim)
            for k in orders:
                rep = convergence_table(kind, spec, k, (8, 16, 32, 64), g)
                floored = [max(e, NOISE_FLOOR) for _, e in rep.rows]
                assert all(
                    b <= a for a, b in zip(floored, floored[1:])
                ), f"{name} {kind.name} {k}: {rep.rows}"


class TestReports:
    def test_json_fields(self):
        spec = corpus_member("quad", 1)
        rep = convergence_table(
            mv.CUBE, spec, (0,), (10, 20), GridSpec(mv.CUBE, 9, 0.0)
        )
        payload = report_to_json(rep)
        assert set(payload) == {"function", "kind", "k", "rows", "fitted_rate"}
        json.dumps(payload)

    def test_csv_layout(self):
        spec = corpus_member("quad", 1)
        rep = convergence_table(
            mv.CUBE, spec, (0,), (10, 20), GridSpec(mv.CUBE, 9, 0.0)
        )
        lines = report_to_csv(rep).splitlines()
        comments = [ln for ln in lines if ln.startswith("#")]
        assert len(comments) == 4
        assert lines[4] == "n,sup_error"
        n, err = lines[5].split(",")
        assert int(n) == 10 and float(err) > 0
