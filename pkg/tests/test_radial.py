import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beltrami_lab.numerics import unit_sphere_area
from beltrami_lab.radial import (
    Example2Profile,
    IdentityProfile,
    InverseProfile,
    LimitStretchProfile,
    RadialWeight,
    annulus_modulus,
    example1_weight,
    inverse_poletsky_check,
    kip_integral_image_route,
    kip_integral_source_route,
    lehto_integral,
    power_weight,
    radial_K_Ip,
    radial_map_eval,
    radial_map_invert,
    radial_stretch_factors,
    rho_profile,
    spherical_mean,
    truncated_power_weight,
    unit_weight,
    weight_from_function,
)


class TestProfiles:
    def test_limit_stretch_closed_form(self):
        p = LimitStretchProfile(2)
        assert p.value(1.0) == pytest.approx(1.0, abs=1e-15)
        assert p.value(0.5) == pytest.approx(math.exp((0.25 - 1.0) / 2.0), rel=1e-14)
        assert p.rho_at_zero == pytest.approx(math.exp(-0.5), rel=1e-14)
        # derivative against a centered difference
        h = 1e-6
        fd = (p.value(0.7 + h) - p.value(0.7 - h)) / (2.0 * h)
        assert p.derivative(0.7) == pytest.approx(fd, rel=1e-8)

    def test_example2_continuity_at_cut(self):
        p = Example2Profile(2, 2.0)
        cut = 0.5
        assert p.kink_radii == (cut,)
        assert p.value(cut - 1e-12) == pytest.approx(p.value(cut + 1e-12), abs=1e-11)
        # one-sided derivatives differ at the kink
        assert p.derivative(cut, side=-1) != pytest.approx(p.derivative(cut, side=+1))

    def test_example2_m1_is_identity(self):
        p = Example2Profile(2, 1.0)
        assert p.kink_radii == ()
        for r in (0.1, 0.5, 0.9, 1.0):
            assert p.value(r) == pytest.approx(r, rel=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 5])
    @pytest.mark.parametrize("m", [1.0, 2.0, 5.0])
    def test_round_trip(self, n, m):
        p = Example2Profile(n, m)
        rng = np.random.default_rng(17)
        for r in rng.uniform(1e-3, 1.0, size=100):
            assert abs(p.inverse(p.value(r)) - r) <= 1e-10

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_numeric_profile_matches_closed_form(self, n):
        num = rho_profile(power_weight(n))
        ref = LimitStretchProfile(n)
        for r in np.linspace(0.02, 1.0, 25):
            assert num.value(float(r)) == pytest.approx(ref.value(float(r)), abs=1e-8)

    def test_numeric_profile_from_truncated_weight(self):
        num = rho_profile(truncated_power_weight(2, 2.0))
        ref = Example2Profile(2, 2.0)
        for r in np.linspace(0.05, 1.0, 20):
            assert num.value(float(r)) == pytest.approx(ref.value(float(r)), abs=1e-8)

    def test_inverse_profile_wraps_base(self):
        base = Example2Profile(2, 2.0)
        inv = InverseProfile(base)
        assert inv.value(base.value(0.3)) == pytest.approx(0.3, abs=1e-11)
        assert inv.kink_radii == (base.value(0.5),)

    def test_out_of_domain_radius(self):
        p = IdentityProfile(2)
        with pytest.raises(ValueError):
            p.value(1.5)
        with pytest.raises(ValueError):
            p.value(0.0)

    @settings(deadline=None, max_examples=40, derandomize=True)
    @given(
        r1=st.floats(0.01, 0.98),
        gap=st.floats(0.01, 0.5),
        m=st.floats(1.0, 8.0),
    )
    def test_profile_strictly_increasing(self, r1, gap, m):
        r2 = min(r1 + gap, 1.0)
        p = Example2Profile(2, m)
        assert p.value(r2) >= p.value(r1)
        if r2 > r1 + 1e-9:
            assert p.value(r2) > p.value(r1)


class TestWeightsAndMeans:
    def test_spherical_mean_of_square_norm(self):
        # mean of |y|^2 over S(y0, r) is |y0|^2 + r^2
        Q = lambda y: float(np.dot(y, y))
        for y0 in ((0.3, -0.2), (0.0, 0.0)):
            got = spherical_mean(Q, np.array(y0), 0.45, 2)
            want = float(np.dot(np.array(y0), np.array(y0))) + 0.45**2
            assert got == pytest.approx(want, rel=1e-9)

    def test_spherical_mean_marked_radial_higher_dimension(self):
        def Q(y):
            return float(np.dot(y, y))

        Q.radial_about_origin = True
        assert spherical_mean(Q, None, 0.45, 3) == pytest.approx(0.45**2, rel=1e-12)
        with pytest.raises(ValueError):
            spherical_mean(lambda y: 1.0, None, 0.45, 3)

    def test_weight_from_function_matches_radial(self):
        w = weight_from_function(lambda y: 1.0 / float(np.dot(y, y)), n=2)
        for r in (0.1, 0.35, 0.8):
            assert w.q(r) == pytest.approx(r**-2, rel=1e-9)

    def test_example1_weight_branches(self):
        w = example1_weight(2)
        # power branch on [1/(2k), 1/(2k-1)], unit branch in between
        assert w.q(0.75) == pytest.approx(0.75**-2, rel=1e-12)
        assert w.q(0.4) == pytest.approx(1.0, rel=1e-12)
        assert w.q(0.3) == pytest.approx(0.3**-2, rel=1e-12)
        assert w.q(0.22) == pytest.approx(1.0, rel=1e-12)


class TestLehtoIntegral:
    def test_unit_weight_log(self):
        got = lehto_integral(unit_weight(2), 0.1, 0.9)
        assert got == pytest.approx(math.log(9.0), rel=1e-12)

    def test_power_weight_quadratic(self):
        got = lehto_integral(power_weight(2), 0.2, 0.8)
        assert got == pytest.approx((0.64 - 0.04) / 2.0, rel=1e-10)

    def test_truncated_weight_piecewise(self):
        # integrand is t above the cut 1/2 and 1/t below it
        got = lehto_integral(truncated_power_weight(2, 2.0), 0.25, 0.75)
        want = math.log(0.5 / 0.25) + (0.75**2 - 0.5**2) / 2.0
        assert got == pytest.approx(want, rel=1e-10)

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            lehto_integral(unit_weight(2), 0.9, 0.1)


class TestModulus:
    def test_planar_ring(self):
        assert annulus_modulus(2, 0.5, 1.0) == pytest.approx(
            2.0 * math.pi / math.log(2.0), rel=1e-13
        )

    def test_three_dimensional_ring(self):
        assert annulus_modulus(3, 0.5, 1.0) == pytest.approx(
            unit_sphere_area(3) / math.log(2.0) ** 2, rel=1e-13
        )

    def test_degenerate_radii(self):
        with pytest.raises(ValueError):
            annulus_modulus(2, 1.0, 0.5)


class TestPoletsky:
    def test_identity_extremal_equality(self):
        rep = inverse_poletsky_check(IdentityProfile(2), unit_weight(2), 0.3, 0.8)
        assert rep.holds
        assert rep.lhs == pytest.approx(rep.rhs, rel=1e-12)

    def test_worked_pair_limit_profile(self):
        rep = inverse_poletsky_check(
            LimitStretchProfile(2), power_weight(2), 0.9, 1.0
        )
        # closed forms: preimage radii (sqrt(1 + 2 ln 0.9), 1) and Lehto
        # integral (1 - 0.81)/2
        s1 = math.sqrt(1.0 + 2.0 * math.log(0.9))
        lhs_want = 2.0 * math.pi / math.log(1.0 / s1)
        rhs_want = 2.0 * math.pi / ((1.0 - 0.81) / 2.0)
        assert rep.lhs == pytest.approx(lhs_want, rel=1e-9)
        assert rep.rhs == pytest.approx(rhs_want, rel=1e-9)
        assert rep.lhs < rep.rhs
        assert rep.holds

    @pytest.mark.parametrize(
        "profile,weight",
        [
            (IdentityProfile(2), unit_weight(2)),
            (LimitStretchProfile(2), power_weight(2)),
            (Example2Profile(2, 2.0), truncated_power_weight(2, 2.0)),
            (LimitStretchProfile(3), power_weight(3)),
        ],
    )
    def test_holds_on_random_pairs(self, profile, weight):
        rng = np.random.default_rng(5)
        # image radii must lie inside the map's range, which starts at
        # rho(0+) for profiles that compress the origin
        lo = (profile.rho_at_zero or 0.0) + 0.02
        for _ in range(5):
            r1 = float(rng.uniform(lo, 0.9))
            r2 = float(rng.uniform(r1 + 0.02, 1.0))
            rep = inverse_poletsky_check(profile, weight, r1, r2)
            assert rep.holds

    def test_bad_radii(self):
        with pytest.raises(ValueError):
            inverse_poletsky_check(IdentityProfile(2), unit_weight(2), 0.8, 0.3)


class TestStretchAndKip:
    def test_identity_factors(self):
        fac = radial_stretch_factors(IdentityProfile(2), 0.5)
        assert fac.tangential == pytest.approx(1.0)
        assert fac.radial == pytest.approx(1.0)
        assert radial_K_Ip(IdentityProfile(2), 0.5, 1.5) == pytest.approx(1.0)

    def test_linear_branch_kip(self):
        # inside the cut the map is a pure scaling by c, where the order-p
        # inner dilatation is c^(2-p)
        p = Example2Profile(2, 2.0)
        c = p.derivative(0.1)
        got = radial_K_Ip(p, 0.1, 1.5)
        assert got == pytest.approx(c ** (2.0 - 1.5), rel=1e-12)

    def test_order_two_matches_classical(self):
        p = LimitStretchProfile(2)
        s = 0.6
        fac = radial_stretch_factors(p, s)
        classical = max(fac.tangential, fac.radial) / min(fac.tangential, fac.radial)
        assert radial_K_Ip(p, s, 2.0) == pytest.approx(classical, rel=1e-12)

    def test_kip_routes_agree(self):
        g = Example2Profile(2, 4.0)
        f = InverseProfile(g)
        image = kip_integral_image_route(g, 1.5)
        source = kip_integral_source_route(f, 1.5)
        assert image == pytest.approx(source, rel=1e-8)

    def test_identity_energy_is_disk_area(self):
        # both routes collapse to the plain disk area for the identity
        assert kip_integral_image_route(IdentityProfile(2), 1.5) == pytest.approx(
            math.pi, rel=1e-10
        )
        assert kip_integral_source_route(IdentityProfile(2), 1.5) == pytest.approx(
            math.pi, rel=1e-10
        )


class TestRadialMapHelpers:
    def test_eval_and_invert(self):
        p = Example2Profile(2, 2.0)
        x = np.array([0.3, -0.4])
        y = radial_map_eval(p, x)
        assert np.linalg.norm(y) == pytest.approx(p.value(0.5), rel=1e-12)
        back = radial_map_invert(p, y)
        assert np.allclose(back, x, atol=1e-10)

    def test_origin_fixed(self):
        p = LimitStretchProfile(2)
        assert np.allclose(radial_map_eval(p, np.zeros(2)), np.zeros(2))

    @settings(deadline=None, max_examples=30, derandomize=True)
    @given(
        ang=st.floats(0.0, 2.0 * math.pi),
        r=st.floats(0.05, 1.0),
        m=st.floats(1.0, 6.0),
    )
    def test_rotation_equivariance(self, ang, r, m):
        p = Example2Profile(2, m)
        x = np.array([r * math.cos(ang), r * math.sin(ang)])
        y = radial_map_eval(p, x)
        assert np.linalg.norm(y) == pytest.approx(p.value(r), rel=1e-11)
        # image direction equals source direction
        assert np.dot(x, y) == pytest.approx(
            np.linalg.norm(x) * np.linalg.norm(y), rel=1e-11
        )
