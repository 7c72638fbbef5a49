import numpy as np
import pytest

from scdt import (Grid, PartMismatch, ReferenceMismatch, gaussian, normalize_l1, scdt,
                  signed_distance, transform_distance, uniform, wasserstein2)
from scdt.transform import METHODS

from conftest import random_signed, reference


def gaussian_w2(m1, s1, m2, s2):
    """Closed-form W2 between two normal laws."""
    return np.hypot(m1 - m2, s1 - s2)


def abs_signal(s):
    return s.__class__(s.grid, np.abs(s.values))


class TestWasserstein:
    def test_self_distance(self, gab, s0):
        p = normalize_l1(abs_signal(gab))
        assert wasserstein2(p, p, s0) == 0.0

    @pytest.mark.parametrize("method", METHODS)
    def test_translation(self, method):
        # grid spacing 2**-12 so the shift is an exact number of samples
        g = Grid(-1.0, 3.0, 16385)
        a = 41 * g.dt
        s0 = reference(16385)
        d = wasserstein2(uniform(g, 0, 1), uniform(g, a, a + 1), s0, method)
        assert d == pytest.approx(a, abs=1e-6)

    @pytest.mark.parametrize("method", METHODS)
    def test_top_level_error_model(self, method):
        # both maps hit t_max at the top reference level, losing a^2 / n
        n = 2049
        g = Grid(-1.0, 3.0, n)
        a = 37 * g.dt
        d = wasserstein2(uniform(g, 0, 1), uniform(g, a, a + 1), reference(n), method)
        assert d == pytest.approx(a * np.sqrt(1 - 1 / n), rel=1e-9)

    @pytest.mark.parametrize("method", METHODS)
    def test_stretch(self, method):
        g = Grid(-1.0, 3.0, 8192)
        d = wasserstein2(uniform(g, 0, 1), uniform(g, 0, 2), reference(8192), method)
        assert d == pytest.approx(1 / np.sqrt(3), abs=1e-4)

    @pytest.mark.parametrize("m1,s1,m2,s2", [(0.4, 0.05, 0.6, 0.05), (0.5, 0.04, 0.5, 0.09),
                                             (0.35, 0.06, 0.55, 0.03)])
    def test_gaussians_closed_form(self, m1, s1, m2, s2):
        g = Grid(0, 1, 4096)
        p = normalize_l1(gaussian(g, m1, s1))
        q = normalize_l1(gaussian(g, m2, s2))
        assert wasserstein2(p, q, reference(4096)) == pytest.approx(
            gaussian_w2(m1, s1, m2, s2), abs=5e-4)


class TestSignedDistance:
    def test_self(self, gab, s0):
        assert signed_distance(gab, gab, s0) == 0.0

    def test_nonnegative_reduces_to_w2(self, s0, unit_grid):
        r = normalize_l1(gaussian(unit_grid, 0.4, 0.05))
        s = normalize_l1(gaussian(unit_grid, 0.55, 0.07))
        assert signed_distance(r, s, s0) == pytest.approx(wasserstein2(r, s, s0), rel=1e-12)

    def test_pure_mass_gap(self, s0):
        assert signed_distance(s0, 2 * s0, s0) == pytest.approx(1.0, abs=1e-12)

    def test_part_mismatch(self, gab, s0):
        with pytest.raises(PartMismatch):
            signed_distance(gab, abs_signal(gab), s0)

    def test_translation(self, unit_grid, s0):
        s = normalize_l1(gaussian(unit_grid, 0.45, 0.05))
        for tau in (0.01, 0.05, 0.1):
            shifted = normalize_l1(gaussian(unit_grid, 0.45 + tau, 0.05))
            assert signed_distance(s, shifted, s0) == pytest.approx(tau, abs=2 * unit_grid.dt)


class TestTransformDistance:
    def test_self(self, gab, s0):
        x = scdt(gab, s0)
        assert transform_distance(x, x, s0) == 0.0

    def test_reference_mismatch(self, gab):
        x = scdt(gab, reference(2048))
        y = scdt(gab, reference(1024))
        with pytest.raises(ReferenceMismatch):
            transform_distance(x, y, reference(2048))

    def test_method_mismatch(self, gab, s0):
        with pytest.raises(ReferenceMismatch):
            transform_distance(scdt(gab, s0, "spline"), scdt(gab, s0, "riemann"), s0)

    def test_stretch_through_transforms(self):
        g = Grid(-1.0, 3.0, 8192)
        s0 = reference(8192)
        x, y = scdt(uniform(g, 0, 1), s0), scdt(uniform(g, 0, 2), s0)
        assert transform_distance(x, y, s0) == pytest.approx(1 / np.sqrt(3), abs=1e-4)

    def test_isometry(self, unit_grid, s0, rng):
        for _ in range(10):
            r, s = random_signed(unit_grid, rng), random_signed(unit_grid, rng)
            d = transform_distance(scdt(r, s0), scdt(s, s0), s0)
            assert d == pytest.approx(signed_distance(r, s, s0), abs=1e-6)

    def test_masses_optional(self, s0):
        x, y = scdt(s0, s0), scdt(2 * s0, s0)
        assert transform_distance(x, y, s0, include_masses=False) == 0.0
        assert transform_distance(x, y, s0) == pytest.approx(1.0)


class TestMetricAxioms:
    def test_symmetry_and_triangle(self, unit_grid, s0, rng):
        sig = [random_signed(unit_grid, rng) for _ in range(3)]
        hats = [scdt(s, s0) for s in sig]
        for i in range(3):
            for j in range(3):
                assert signed_distance(sig[i], sig[j], s0) == signed_distance(sig[j], sig[i], s0)
        a, b, c = sig
        assert signed_distance(a, c, s0) <= (signed_distance(a, b, s0)
                                             + signed_distance(b, c, s0) + 1e-9)
        x, y, z = hats
        assert transform_distance(x, z, s0) <= (transform_distance(x, y, s0)
                                                + transform_distance(y, z, s0) + 1e-9)

    def test_zero_distance_means_equal(self, unit_grid, s0, rng):
        r = random_signed(unit_grid, rng)
        assert signed_distance(r, r + 0 * r, s0) == 0.0
