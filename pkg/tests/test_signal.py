import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from scdt import (Grid, NonMonotoneWarp, Signal, WarpModel, ZeroMass, apply_warp, covering_grid,
                  gabor, jordan_decompose, l1_norm, normalize_l1, read_signal_csv, support,
                  uniform, write_signal_csv)

finite = st.floats(-1e3, 1e3, allow_nan=False)


class TestGrid:
    def test_spacing(self):
        g = Grid(0.0, 1.0, 11)
        assert g.dt == pytest.approx(0.1)
        np.testing.assert_allclose(g.t, np.linspace(0, 1, 11))

    @pytest.mark.parametrize("args", [(1.0, 0.0, 10), (0.0, 1.0, 1), (0.0, np.inf, 10)])
    def test_rejects_bad(self, args):
        with pytest.raises(ValueError):
            Grid(*args)

    def test_dict_round_trip(self):
        g = Grid(-0.25, 3.5, 77)
        assert Grid.from_dict(g.to_dict()) == g


class TestSignal:
    def test_values_read_only(self):
        s = Signal(Grid(0, 1, 4), [1, 2, 3, 4])
        with pytest.raises(ValueError):
            s.values[0] = 9

    def test_length_must_match(self):
        with pytest.raises(ValueError):
            Signal(Grid(0, 1, 4), [1, 2, 3])

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            Signal(Grid(0, 1, 3), [0, np.nan, 1])

    def test_arithmetic(self):
        g = Grid(0, 1, 3)
        a, b = Signal(g, [1, 2, 3]), Signal(g, [1, 1, 1])
        np.testing.assert_array_equal((a - b).values, [0, 1, 2])
        np.testing.assert_array_equal((2 * a).values, [2, 4, 6])
        np.testing.assert_array_equal((-a).values, [-1, -2, -3])

    def test_zero_outside_grid(self):
        s = Signal(Grid(0, 1, 3), [1, 1, 1])
        np.testing.assert_array_equal(s(np.array([-0.1, 0.5, 1.1])), [0, 1, 0])


class TestJordan:
    def test_small_example(self):
        jp = jordan_decompose(Signal(Grid(0, 2, 3), [1, -2, 0]))
        np.testing.assert_array_equal(jp.pos.values, [1, 0, 0])
        np.testing.assert_array_equal(jp.neg.values, [0, 2, 0])

    def test_nonnegative_has_trivial_neg(self):
        jp = jordan_decompose(Signal(Grid(0, 1, 5), [0, 1, 2, 1, 0]))
        assert jp.neg_mass == 0
        assert not jp.neg.values.any()

    def test_sine_masses(self):
        g = Grid(0, 1, 1001)
        jp = jordan_decompose(Signal(g, np.sin(2 * np.pi * g.t)))
        assert jp.pos_mass == pytest.approx(1 / np.pi, abs=1e-5)
        assert jp.neg_mass == pytest.approx(1 / np.pi, abs=1e-5)

    @given(arrays(float, st.integers(2, 50), elements=finite))
    def test_reconstruction(self, v):
        s = Signal(Grid(0, 1, v.size), v)
        jp = jordan_decompose(s)
        np.testing.assert_array_equal(jp.pos.values - jp.neg.values, v)
        assert np.all(jp.pos.values * jp.neg.values == 0)
        assert jp.pos_mass + jp.neg_mass == pytest.approx(l1_norm(s))


class TestNormalize:
    def test_constant(self):
        s = normalize_l1(Signal(Grid(0, 1, 101), np.full(101, 2.0)))
        np.testing.assert_allclose(s.values, 1 / (101 * 0.01))

    def test_hand_example(self):
        s = normalize_l1(Signal(Grid(0, 1.5, 4), [0, 4, 0, 0]))
        np.testing.assert_allclose(s.values, [0, 2, 0, 0])

    def test_zero_mass(self):
        with pytest.raises(ZeroMass):
            normalize_l1(Signal(Grid(0, 1, 4), np.zeros(4)))

    @given(arrays(float, st.integers(2, 40), elements=finite))
    def test_idempotent(self, v):
        s = Signal(Grid(0, 1, v.size), v)
        if l1_norm(s) < 1e-6:
            return
        once = normalize_l1(s)
        assert l1_norm(once) == pytest.approx(1.0)
        np.testing.assert_allclose(normalize_l1(once).values, once.values, rtol=1e-12)


class TestGabor:
    def test_center_is_one(self, unit_grid):
        s = gabor(Grid(0, 1, 3))
        assert s.values[1] == pytest.approx(1.0)

    def test_off_center_value(self):
        s = gabor(Grid(0.525, 1.525, 2))
        assert s.values[0] == pytest.approx(-np.exp(-0.075), abs=1e-12)
        assert s.values[0] == pytest.approx(-0.92774, abs=1e-5)

    def test_wide_envelope_decays(self):
        s = gabor(Grid(0, 1, 101), width=1e5)
        assert np.max(np.abs(s.values[np.abs(s.t - 0.5) > 0.05])) < 1e-50


class TestApplyWarp:
    def test_identity(self, gab):
        out = apply_warp(gab, WarpModel.identity())
        np.testing.assert_allclose(out.values, gab.values, atol=1e-12)

    def test_translation_preserves_part_masses(self, gab):
        g = WarpModel.polynomial(0.1, 1.0)
        out = apply_warp(gab, g, covering_grid(gab, g))
        a, b = jordan_decompose(out), jordan_decompose(gab)
        assert a.pos_mass == pytest.approx(b.pos_mass, abs=1e-3)
        assert a.neg_mass == pytest.approx(b.neg_mass, abs=1e-3)

    def test_dilation_of_indicator(self):
        grid = Grid(0, 1, 2001)
        s = uniform(grid)
        out = apply_warp(s, WarpModel.polynomial(0, 2), grid, kind="linear")
        inside = grid.t < 0.499
        outside = grid.t > 0.501
        np.testing.assert_allclose(out.values[inside], 2 * s.values[0])
        np.testing.assert_allclose(out.values[outside], 0.0)
        assert l1_norm(out) == pytest.approx(1.0, abs=2e-3)

    def test_non_monotone_rejected(self, gab):
        with pytest.raises(NonMonotoneWarp):
            apply_warp(gab, WarpModel.polynomial(0, 0, -1), Grid(0.1, 1, 10))

    def test_plain_callable(self, gab):
        out = apply_warp(gab, lambda t: t + 0.05, Grid(-0.05, 0.95, 2048))
        ref = apply_warp(gab, WarpModel.polynomial(0.05, 1.0), Grid(-0.05, 0.95, 2048))
        np.testing.assert_allclose(out.values, ref.values, atol=1e-6)


class TestCoveringGrid:
    @pytest.mark.parametrize("g", [
        WarpModel.polynomial(0.1, 1.0),
        WarpModel.polynomial(0.1, 0.01, 1.0, 2.0),
        WarpModel.affine(1.2, -0.1),
        WarpModel.exponential(1.0, -1.0),
        WarpModel.logarithmic(1.5, 1.0),
    ])
    def test_image_covers_support(self, gab, g):
        grid = covering_grid(gab, g)
        lo, hi = support(gab)
        assert g(grid.t_min) <= lo + 1e-12 or g(grid.t_min) <= 0.0 + 1e-12
        assert g(grid.t_max) == pytest.approx(1.0)
        assert g(grid.t_max) >= hi


class TestCsv:
    def test_round_trip(self, tmp_path, gab):
        p = tmp_path / "s.csv"
        write_signal_csv(gab, p)
        back = read_signal_csv(p)
        assert back.grid == gab.grid
        np.testing.assert_array_equal(back.values, gab.values)

    def test_rejects_uneven_spacing(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("t,value\n0,1\n0.1,1\n0.5,1\n")
        with pytest.raises(ValueError):
            read_signal_csv(p)
