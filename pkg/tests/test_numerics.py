import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beltrami_lab.numerics import (
    ComplexField,
    GridSpec,
    IntegrandNonFinite,
    QuadratureConfig,
    QuadratureNonConvergence,
    adaptive_integral_1d,
    unit_ball_volume,
    unit_sphere_area,
    wirtinger_at_point,
    wirtinger_derivatives,
)


class TestGridSpec:
    def test_square_geometry(self):
        g = GridSpec.square(512, 2.0)
        assert g.nx == g.ny == 512
        assert g.x_min == g.y_min == -2.0
        assert g.dx == g.dy == pytest.approx(4.0 / 511, rel=1e-15)
        assert g.x_max == pytest.approx(2.0, abs=1e-13)
        assert g.cell_area == pytest.approx(g.dx * g.dy)
        zz = g.zz()
        assert zz.shape == (512, 512)
        assert zz[0, 0] == pytest.approx(-2.0 - 2.0j)

    def test_covers_disk(self):
        assert GridSpec.square(64, 2.0).covers_disk(1.0, margin=0.5)
        assert not GridSpec.square(64, 1.0).covers_disk(1.0, margin=0.1)

    @pytest.mark.parametrize("n", [1, 4, 7])
    def test_too_small_rejected(self, n):
        with pytest.raises(ValueError):
            GridSpec.square(n)

    def test_bad_half_width(self):
        with pytest.raises(ValueError):
            GridSpec.square(64, -1.0)


class TestComplexField:
    def test_shape_mismatch(self):
        g = GridSpec.square(16)
        with pytest.raises(ValueError):
            ComplexField(g, np.zeros((8, 16)))

    def test_nonfinite_rejected_unless_extended(self):
        g = GridSpec.square(16)
        data = np.zeros((16, 16), dtype=complex)
        data[3, 3] = np.inf
        with pytest.raises(ValueError):
            ComplexField(g, data)
        fld = ComplexField(g, data, extended=True)
        assert np.isinf(fld.data[3, 3].real)


class TestWirtinger:
    def test_exact_on_affine(self):
        g = GridSpec.square(32)
        zz = g.zz()
        fld = ComplexField(g, 2.0 + (3.0 - 1.0j) * zz + (0.25 + 2.0j) * np.conj(zz))
        fz, fzb = wirtinger_derivatives(fld)
        assert np.max(np.abs(fz.data - (3.0 - 1.0j))) < 1e-12
        assert np.max(np.abs(fzb.data - (0.25 + 2.0j))) < 1e-12

    def test_exact_on_quadratics(self):
        # centered and one-sided second-order stencils are both exact for
        # polynomials of degree two
        g = GridSpec.square(32)
        zz = g.zz()
        fld = ComplexField(g, zz**2 + 3.0 * np.conj(zz))
        fz, fzb = wirtinger_derivatives(fld)
        assert np.max(np.abs(fz.data - 2.0 * zz)) < 1e-9
        assert np.max(np.abs(fzb.data - 3.0)) < 1e-9

    def test_pointwise_derivatives(self):
        def f(z):
            return z**3 + 2.0 * np.conj(z) ** 2

        z0 = 0.4 - 0.3j
        fz, fzb = wirtinger_at_point(f, z0)
        assert fz == pytest.approx(3.0 * z0**2, abs=2e-9)
        assert fzb == pytest.approx(4.0 * np.conj(z0), abs=2e-9)

    def test_minimum_grid_accepted(self):
        g = GridSpec(nx=8, ny=8, x_min=0.0, y_min=0.0, dx=1.0, dy=1.0)
        fld = ComplexField(g, np.zeros((8, 8)))
        fz, _ = wirtinger_derivatives(fld)
        assert fz.data.shape == (8, 8)


class TestQuadrature:
    def test_polynomial_exact(self):
        res = adaptive_integral_1d(lambda x: x * x, 0.0, 1.0)
        assert res.value == pytest.approx(1.0 / 3.0, abs=1e-14)
        assert res.error_bound < 1e-12

    def test_endpoint_log_singularity(self):
        res = adaptive_integral_1d(lambda x: -math.log(x), 0.0, 1.0)
        assert res.value == pytest.approx(1.0, abs=1e-9)

    def test_breakpoint_makes_kink_exact(self):
        res = adaptive_integral_1d(
            lambda x: abs(x - 1.0 / 3.0), 0.0, 1.0, breakpoints=(1.0 / 3.0,)
        )
        assert res.value == pytest.approx(5.0 / 18.0, abs=1e-13)

    def test_divergent_integral_raises(self):
        with pytest.raises(QuadratureNonConvergence) as err:
            adaptive_integral_1d(lambda x: 1.0 / x, 0.0, 1.0)
        assert math.isfinite(err.value.estimate)
        assert err.value.evaluations > 0

    def test_nonfinite_integrand_flagged(self):
        def bad(x):
            return math.inf if 0.4 < x < 0.6 else 1.0

        with pytest.raises(IntegrandNonFinite) as err:
            adaptive_integral_1d(bad, 0.0, 1.0)
        assert 0.4 < err.value.x < 0.6

    def test_config_validation(self):
        with pytest.raises(ValueError):
            QuadratureConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(max_depth=0)

    def test_reversed_interval_rejected(self):
        with pytest.raises(ValueError):
            adaptive_integral_1d(lambda x: x, 1.0, 0.0)

    @settings(deadline=None, max_examples=40, derandomize=True)
    @given(
        a=st.floats(-2.0, 2.0),
        width=st.floats(0.1, 3.0),
        c3=st.floats(-4.0, 4.0),
        c1=st.floats(-4.0, 4.0),
        c0=st.floats(-4.0, 4.0),
    )
    def test_cubic_matches_antiderivative(self, a, width, c3, c1, c0):
        b = a + width

        def f(x):
            return c3 * x**3 + c1 * x + c0

        def F(x):
            return c3 * x**4 / 4.0 + c1 * x**2 / 2.0 + c0 * x

        res = adaptive_integral_1d(f, a, b)
        assert res.value == pytest.approx(F(b) - F(a), abs=1e-9, rel=1e-9)

    @settings(deadline=None, max_examples=25, derandomize=True)
    @given(split=st.floats(0.1, 0.9))
    def test_interval_additivity(self, split):
        def f(x):
            return math.exp(-x) * math.sin(5.0 * x)

        whole = adaptive_integral_1d(f, 0.0, 1.0).value
        left = adaptive_integral_1d(f, 0.0, split).value
        right = adaptive_integral_1d(f, split, 1.0).value
        assert whole == pytest.approx(left + right, abs=1e-10)


class TestSphereConstants:
    @pytest.mark.parametrize(
        "n,area,volume",
        [
            (2, 2.0 * math.pi, math.pi),
            (3, 4.0 * math.pi, 4.0 * math.pi / 3.0),
            (4, 2.0 * math.pi**2, math.pi**2 / 2.0),
        ],
    )
    def test_known_values(self, n, area, volume):
        assert unit_sphere_area(n) == pytest.approx(area, rel=1e-13)
        assert unit_ball_volume(n) == pytest.approx(volume, rel=1e-13)

    @pytest.mark.parametrize("n", [2, 3, 5, 7])
    def test_area_volume_relation(self, n):
        assert unit_sphere_area(n) == pytest.approx(n * unit_ball_volume(n), rel=1e-12)
