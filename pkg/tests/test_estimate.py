import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scdt import (DegenerateDesign, DomainError, Grid, GridSearchSpec, PartMismatch, Scdt,
                  WarpModel, apply_warp, compose_scdt, convexity_audit, cost_surface,
                  covering_grid, design_matrix, estimate_warp, gabor, scdt, solve_stacked_lsq)

from conftest import reference


def normal_equations(X, y, w):
    W = np.diag(w)
    return np.linalg.inv(X.T @ W @ X) @ X.T @ W @ y


def warped(g, n=2048):
    s = gabor(Grid(0, 1, n))
    return apply_warp(s, g, covering_grid(s, g)), s


class TestDesignMatrix:
    def test_degree_zero(self, gab, s0):
        X = design_matrix(scdt(gab, s0), "polynomial", 0)
        assert X.shape == (2 * s0.grid.n, 1) and np.all(X == 1)

    def test_affine_on_identity(self, s0):
        X = design_matrix(scdt(s0, s0), "affine")
        np.testing.assert_allclose(X[:-1, 0], s0.t[:-1], atol=1e-12)
        assert np.all(X[:, 1] == 1)

    def test_cubic_columns_independent(self, gab, s0):
        X = design_matrix(scdt(gab, s0), "polynomial", 3)
        sv = np.linalg.svd(X, compute_uv=False)
        assert X.shape[1] == 4 and np.isfinite(sv[0] / sv[-1])

    def test_stacks_positive_over_negative(self, gab, s0):
        x = scdt(gab, s0)
        X = design_matrix(x, "affine")
        np.testing.assert_array_equal(X[:s0.grid.n, 0], x.pos_map)
        np.testing.assert_array_equal(X[s0.grid.n:, 0], x.neg_map)

    def test_constant_map_is_degenerate(self, s0):
        n = s0.grid.n
        x = Scdt(np.full(n, 0.5), 1.0, np.zeros(n), 0.0, s0.grid)
        with pytest.raises(DegenerateDesign):
            design_matrix(x, "affine")

    def test_exponential_needs_positive_maps(self):
        g = Grid(-1, 1, 512)
        s = gabor(g, center=0.0)
        with pytest.raises(DomainError):
            design_matrix(scdt(s, reference(512)), "exponential")


class TestSolve:
    def test_identity_basis(self, rng):
        y = rng.normal(size=6)
        np.testing.assert_allclose(solve_stacked_lsq(np.eye(6), y), y, atol=1e-14)

    def test_exact_line(self):
        t = np.linspace(0, 1, 50)
        X = np.column_stack([t, np.ones_like(t)])
        np.testing.assert_allclose(solve_stacked_lsq(X, 3 * t + 2), [3, 2], atol=1e-12)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30)
    def test_normal_equation_oracle(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(200, 4))
        y = rng.normal(size=200)
        w = rng.uniform(0.1, 2.0, 200)
        np.testing.assert_allclose(solve_stacked_lsq(X, y, w), normal_equations(X, y, w),
                                   rtol=1e-10, atol=1e-12)

    def test_rank_deficient(self):
        X = np.column_stack([np.ones(10), 2 * np.ones(10)])
        with pytest.raises(DegenerateDesign):
            solve_stacked_lsq(X, np.arange(10.0))


class TestEstimateWarp:
    def test_identity(self, gab, s0):
        res = estimate_warp(gab, gab, s0, "polynomial", 1)
        np.testing.assert_allclose(res.model.coefficients, [0, 1], atol=1e-6)

    def test_shift_affine(self, s0):
        r, s = warped(WarpModel.polynomial(0.1, 1.0))
        res = estimate_warp(r, s, s0, "affine")
        np.testing.assert_allclose(res.model.coefficients, [1, 0.1], atol=1e-2)

    def test_cubic(self, s0):
        true = (0.1, 0.01, 1.0, 2.0)
        r, s = warped(WarpModel.polynomial(*true))
        res = estimate_warp(r, s, s0, "polynomial", 3)
        np.testing.assert_allclose(res.model.coefficients, true, rtol=0.05)
        lo, hi = res.monotone_on
        assert lo < hi

    @pytest.mark.parametrize("g", [
        WarpModel.quadratic_dispersion(2.0, 0.1),
        WarpModel.exponential(1.0, -1.0),
        WarpModel.logarithmic(1.5, 1.0),
    ])
    def test_nonpolynomial_families(self, g, s0):
        r, s = warped(g)
        res = estimate_warp(r, s, s0, g.family)
        np.testing.assert_allclose(res.model.coefficients, g.coefficients, rtol=1e-4)

    def test_part_mismatch(self, gab, s0):
        pos = gab.__class__(gab.grid, np.abs(gab.values))
        with pytest.raises(PartMismatch):
            estimate_warp(pos, gab, s0, "affine")

    def test_error_shrinks_with_resolution(self):
        # this warp's increasing branch reaches below the template's support,
        # so the continuum problem is exact
        true = np.array([0.01, 0.1, 1.0])
        errs = []
        for n in (512, 2048, 8192):
            r, s = warped(WarpModel.polynomial(*true), n)
            res = estimate_warp(r, s, reference(n), "polynomial", 2)
            errs.append(np.abs(np.array(res.model.coefficients) - true))
        assert np.all(errs[0] > errs[1]) and np.all(errs[1] > errs[2])

    def test_lemma_prediction_matches(self, s0):
        g = WarpModel.affine(1.2, -0.1)
        r, s = warped(g)
        res = estimate_warp(r, s, s0, "affine")
        pred = compose_scdt(res.model.inverse, scdt(s, s0))
        r_hat = scdt(r, s0)
        inner = slice(1, -1)
        assert np.max(np.abs(pred.pos_map - r_hat.pos_map)[inner]) < 5 * s0.grid.dt


@pytest.fixture(scope="module")
def surface():
    s0 = reference(2048)
    r, s = warped(WarpModel.affine(1.2, -0.1))
    spec = GridSearchSpec.of((0.8, 1.8, 51), (-0.5, 0.5, 51))
    return cost_surface(r, s, s0, "affine", spec)


class TestCostSurface:
    def test_minimum_at_truth(self, surface):
        i, j = surface.argmin()
        assert surface.p1[i] == pytest.approx(1.2) and surface.p2[j] == pytest.approx(-0.1)

    def test_exact_quadratic(self, surface):
        P1, P2 = np.meshgrid(surface.p1, surface.p2, indexing="ij")
        A = np.column_stack([np.ones(P1.size), P1.ravel(), P2.ravel(),
                             P1.ravel() ** 2, P1.ravel() * P2.ravel(), P2.ravel() ** 2])
        coef, *_ = np.linalg.lstsq(A, surface.values.ravel(), rcond=None)
        assert np.max(np.abs(A @ coef - surface.values.ravel())) <= 1e-9
        H = np.array([[2 * coef[3], coef[4]], [coef[4], 2 * coef[5]]])
        assert np.all(np.linalg.eigvalsh(H) >= -1e-9)

    def test_convex(self, surface):
        assert convexity_audit(surface.values)

    def test_rejects_polynomial_family(self, gab, s0):
        with pytest.raises(ValueError):
            cost_surface(gab, gab, s0, "polynomial", GridSearchSpec.of((0, 1, 3), (0, 1, 3)))
