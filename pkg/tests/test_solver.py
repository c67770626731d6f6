import math

import numpy as np
import pytest

from beltrami_lab.dilatation import MuSpec, truncate_mu
from beltrami_lab.numerics import ComplexField, GridSpec, wirtinger_derivatives
from beltrami_lab.solver import (
    ContractionError,
    PaddingError,
    SolveConfig,
    SolveNonConvergence,
    beurling_norm_estimate,
    beurling_transform,
    cauchy_transform,
    grid_kip_integral,
    grid_kip_integral_image_route,
    residual_report,
    solve_principal,
    sup_distance,
    thread_count,
    truncation_scheme,
)


def _disk_indicator(grid):
    zz = grid.zz()
    return ComplexField(grid, np.where(np.abs(zz) < 1.0, 1.0 + 0.0j, 0.0j))


def _disk_indicator_averaged(grid, sub=16):
    """Indicator of the unit disk with cell-averaged boundary values.

    Each node carries the fraction of its grid cell inside the disk,
    which is the right sampling of a jump for a band-limited method."""
    zz = grid.zz()
    offsets = (np.arange(sub) + 0.5) / sub - 0.5
    acc = np.zeros(zz.shape)
    for ox in offsets:
        for oy in offsets:
            acc += np.abs(zz + ox * grid.dx + 1j * oy * grid.dy) < 1.0
    return ComplexField(grid, (acc / sub**2).astype(complex))


def _near(field, z0):
    """Field value at the grid node closest to z0."""
    g = field.grid
    ix = int(round((z0.real - g.x_min) / g.dx))
    iy = int(round((z0.imag - g.y_min) / g.dy))
    return field.data[iy, ix], g.xs()[ix] + 1j * g.ys()[iy]


class TestCauchyTransform:
    def test_disk_indicator_brute_force_oracle(self):
        # Riemann-sum check of the closed form C(chi_disk)(z) = conj(z)
        # inside the disk, entirely independent of the FFT path
        n = 900
        xs = np.linspace(-1.0, 1.0, n)
        X, Y = np.meshgrid(xs, xs)
        W = X + 1j * Y
        inside = np.abs(W) < 1.0
        z0 = 0.5 + 0.0j
        denom = W - z0
        denom[np.abs(denom) < 1e-12] = np.inf  # drop the singular cell
        cell = (xs[1] - xs[0]) ** 2
        integral = -np.sum(inside / denom) * cell / math.pi
        assert integral == pytest.approx(0.5, abs=5e-3)

    def test_disk_indicator_matches_conjugate(self):
        g = GridSpec.square(256, 2.0)
        out = cauchy_transform(_disk_indicator(g))
        zz = g.zz()
        mask = np.abs(zz) <= 0.7
        err = np.max(np.abs(out.data - np.conj(zz))[mask])
        assert err < 5e-3

    def test_zero_field(self):
        g = GridSpec.square(64, 2.0)
        out = cauchy_transform(ComplexField(g, np.zeros((64, 64))))
        assert np.max(np.abs(out.data)) == 0.0

    def test_boundary_support_rejected(self):
        g = GridSpec.square(64, 2.0)
        data = np.zeros((64, 64), dtype=complex)
        data[:, 0] = 1.0
        with pytest.raises(PaddingError):
            cauchy_transform(ComplexField(g, data))


class TestBeurlingTransform:
    def test_disk_indicator_closed_form(self):
        # S(chi_disk) vanishes inside the disk and equals -1/z^2 outside
        g = GridSpec.square(256, 2.0)
        out = beurling_transform(_disk_indicator_averaged(g))
        zz = g.zz()
        inner = np.abs(zz) <= 0.6
        assert np.max(np.abs(out.data[inner])) < 1e-2
        for z0 in (1.4 + 0.2j, -1.1 - 0.9j, 0.3 + 1.5j):
            got, z_node = _near(out, z0)
            assert got == pytest.approx(-1.0 / z_node**2, abs=1e-2)

    def test_intertwines_derivatives_on_gaussian(self):
        # S maps dbar(g) to dz(g); both derivatives of the modulated
        # Gaussian are available in closed form
        g = GridSpec.square(256, 2.0)
        zz = g.zz()
        bump = np.exp(-4.0 * np.abs(zz) ** 2)
        dbar = (1.0 - 4.0 * np.abs(zz) ** 2) * bump
        dz = -4.0 * np.conj(zz) ** 2 * bump
        out = beurling_transform(ComplexField(g, dbar))
        mask = np.abs(zz) <= 1.0
        assert np.max(np.abs(out.data - dz)[mask]) < 5e-3

    def test_operator_norm_at_most_one(self):
        est = beurling_norm_estimate(iterations=20, seed=1)
        assert est <= 1.0 + 1e-6
        assert est > 0.9


class TestSolvePrincipal:
    def test_zero_mu_is_identity(self):
        cfg = SolveConfig(grid=GridSpec.square(128, 2.0))
        res = solve_principal(MuSpec.constant(0.0), cfg)
        zz = cfg.grid.zz()
        assert res.iterations == 1
        assert np.max(np.abs(res.f.data - zz)) < 1e-10
        assert res.residual_linf_on_disk < 1e-10

    def test_constant_mu_closed_form(self):
        c = 0.4 + 0.1j
        cfg = SolveConfig(grid=GridSpec.square(256, 2.0))
        res = solve_principal(MuSpec.constant(c), cfg)
        zz = cfg.grid.zz()
        mask = np.abs(zz) <= 0.8
        err = np.max(np.abs(res.f.data - (zz + c * np.conj(zz)))[mask])
        assert err < 5e-3
        rep = residual_report(res)
        assert rep.linf < 2e-2
        assert abs(rep.worst_point) <= 0.951

    def test_residual_decreases_with_resolution(self):
        spec = MuSpec.constant(0.3)
        res_lo = solve_principal(spec, SolveConfig(grid=GridSpec.square(128, 2.0)))
        res_hi = solve_principal(spec, SolveConfig(grid=GridSpec.square(256, 2.0)))
        assert res_lo.residual_linf_on_disk / res_hi.residual_linf_on_disk >= 1.5

    def test_iteration_counts_track_contraction(self):
        cfg = SolveConfig(grid=GridSpec.square(128, 2.0), max_iter=400)
        counts = {}
        for c in (0.1, 0.5, 0.9):
            res = solve_principal(MuSpec.constant(c), cfg)
            predicted = math.log(cfg.fix_tol) / math.log(c)
            counts[c] = res.iterations / predicted
        assert counts[0.1] == pytest.approx(0.8, abs=0.3)
        assert counts[0.5] == pytest.approx(0.8, abs=0.3)
        assert counts[0.9] == pytest.approx(0.8, abs=0.3)

    def test_contraction_violation(self):
        g = GridSpec.square(64, 2.0)
        zz = g.zz()
        data = np.where(np.abs(zz) < 0.5, 1.0 + 0.0j, 0.0j)
        with pytest.raises(ContractionError):
            solve_principal(MuSpec.from_grid(ComplexField(g, data)),
                            SolveConfig(grid=g))

    def test_non_convergence_carries_partial(self):
        cfg = SolveConfig(grid=GridSpec.square(64, 2.0), max_iter=3)
        with pytest.raises(SolveNonConvergence) as err:
            solve_principal(MuSpec.constant(0.6), cfg)
        assert err.value.iterations == 3
        assert err.value.partial is not None
        assert err.value.last_delta > 0.0

    def test_grid_must_cover_padded_disk(self):
        with pytest.raises(ValueError):
            SolveConfig(grid=GridSpec.square(64, 1.2))

    def test_solution_dilatation_recovery(self):
        # finite differences of the solved map reproduce the capped field
        spec = truncate_mu(MuSpec.example3(0.5), 10.0)
        cfg = SolveConfig(grid=GridSpec.square(256, 2.0))
        res = solve_principal(spec, cfg)
        fz, fzb = wirtinger_derivatives(res.f)
        zz = cfg.grid.zz()
        h = cfg.grid.dx
        mask = (np.abs(zz) <= 0.9) & (np.abs(np.abs(zz) - 0.625) > 2.0 * h)
        mu_fd = fzb.data[mask] / fz.data[mask]
        mu_exact = spec.mu(zz[mask])
        assert np.max(np.abs(mu_fd - mu_exact)) < 8e-2

    def test_jacobian_positive_off_band(self):
        spec = truncate_mu(MuSpec.example3(0.5), 10.0)
        cfg = SolveConfig(grid=GridSpec.square(256, 2.0))
        res = solve_principal(spec, cfg)
        zz = cfg.grid.zz()
        h = cfg.grid.dx
        mask = (np.abs(zz) <= 0.9) & (np.abs(np.abs(zz) - 0.625) > 2.0 * h)
        jac = np.abs(res.f_z.data) ** 2 - np.abs(res.f_zbar.data) ** 2
        assert np.min(jac[mask]) > 0.0

    def test_sup_distance_symmetric(self):
        spec = MuSpec.constant(0.2)
        res_a = solve_principal(spec, SolveConfig(grid=GridSpec.square(128, 2.0)))
        res_b = solve_principal(spec, SolveConfig(grid=GridSpec.square(128, 2.0)))
        assert sup_distance(res_a.f, res_b.f) == 0.0


class TestGridKipIntegrals:
    def test_constant_mu_routes_match_closed_form(self):
        # for mu = m the p-energy over the disk is pi (1 + m)^p and the
        # image-route integrand collapses to the same constant
        m = 0.3
        res = solve_principal(MuSpec.constant(m),
                              SolveConfig(grid=GridSpec.square(256, 2.0)))
        want = math.pi * (1.0 + m) ** 1.5
        direct = grid_kip_integral(res, 1.5)
        image = grid_kip_integral_image_route(res, 1.5)
        assert direct == pytest.approx(want, rel=2e-2)
        assert image == pytest.approx(want, rel=2e-2)
        assert direct == pytest.approx(image, rel=5e-3)

    def test_order_validation(self):
        res = solve_principal(MuSpec.constant(0.1),
                              SolveConfig(grid=GridSpec.square(64, 2.0)))
        with pytest.raises(ValueError):
            grid_kip_integral(res, 2.5)


class TestTruncationScheme:
    def test_monotone_schedule_results(self):
        run = truncation_scheme(
            MuSpec.example4(), (4.0, 8.0), 1.5,
            SolveConfig(grid=GridSpec.square(128, 2.0)),
        )
        assert len(run.per_k) == 2
        assert run.KIp_integrals[0] < run.KIp_integrals[1]
        assert run.bound_M is None and run.bound_ok is None
        assert len(run.pairwise_sup_dist) == 1
        assert run.pairwise_sup_dist[0] > 0.0

    def test_bound_checked(self):
        run = truncation_scheme(
            MuSpec.example4(), (4.0, 8.0), 1.5,
            SolveConfig(grid=GridSpec.square(128, 2.0)),
            bound_M=5.0 * math.pi,
        )
        assert run.bound_ok == (True, True)

    def test_bad_schedule(self):
        cfg = SolveConfig(grid=GridSpec.square(64, 2.0))
        with pytest.raises(ValueError):
            truncation_scheme(MuSpec.example4(), (8.0, 4.0), 1.5, cfg)
        with pytest.raises(ValueError):
            truncation_scheme(MuSpec.example4(), (0.5, 4.0), 1.5, cfg)


class TestThreads:
    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("BELTRAMI_LAB_THREADS", "2")
        assert thread_count() == 2
        monkeypatch.setenv("BELTRAMI_LAB_THREADS", "0")
        assert thread_count() >= 1
        monkeypatch.delenv("BELTRAMI_LAB_THREADS")
        assert thread_count() >= 1
