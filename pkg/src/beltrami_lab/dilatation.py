"""Complex dilatation fields, truncation, and dilatation functionals.

The registry holds two degenerate dilatation families supported in the
unit disk (zero outside), both radial in modulus with an e^{2i theta}
phase:

* ``example3``: |mu| climbs to 1 at the circle |z| = 1/2, parametrized by
  0 < alpha < 2; the maximal dilatation is K(z) = 2|z| / (alpha (2|z|-1)).
* ``example4``: |mu| climbs to 1 at |z| = e^{-1/2}; K(z) = 1/(1 + 2 ln|z|).

Truncation at level k zeroes mu wherever K exceeds k, which for these
families empties a concentric disk; the resulting fields are uniformly
elliptic (ess sup |mu_k| <= (k-1)/(k+1)) and feed the solver.  Closed-form
solutions for both families and their inverses live here too, as grid-free
oracles for everything the solver produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .numerics import (
    ComplexField,
    IntegrandNonFinite,
    QuadratureConfig,
    QuadratureNonConvergence,
    adaptive_integral_1d,
    unit_sphere_area,
)
from .radial import Example2Profile, RadialWeight, power_weight, spherical_mean

__all__ = [
    "mu_example3",
    "mu_example4",
    "MuSpec",
    "K_mu",
    "truncate_mu",
    "mu_of_inverse",
    "K_Ip_field",
    "L1Report",
    "l1_norm",
    "IntegrabilityScan",
    "spherical_integrability_scan",
    "DilatationReport",
    "build_dilatation_report",
    "solution_example3",
    "solution_example4",
    "inverse_example3",
    "inverse_example4",
    "example3_truncation_radius",
    "example4_truncation_radius",
    "example3_image_weight",
    "example4_image_weight",
    "named_map",
]


def _as_complex(z):
    return np.asarray(z, dtype=np.complex128)


def mu_example3(z, alpha: float):
    """Registry example 3 dilatation on the open unit disk.

    Zero for |z| <= 1/2; on the annulus the modulus is
    (2r - alpha(2r-1)) / (2r + alpha(2r-1)), which tends to 1 at r = 1/2.
    """
    if not (0.0 < alpha < 2.0):
        raise ValueError("alpha must lie in (0, 2)")
    zz = _as_complex(z)
    r = np.abs(zz)
    if np.any(r >= 1.0):
        raise ValueError("mu_example3 is defined on the open unit disk only")
    out = np.zeros_like(zz)
    ann = r > 0.5
    if np.any(ann):
        ra = r[ann]
        za = zz[ann]
        num = 2.0 * ra - alpha * (2.0 * ra - 1.0)
        den = 2.0 * ra + alpha * (2.0 * ra - 1.0)
        out[ann] = (za * za) / (ra * ra) * (num / den)
    return out if out.shape else complex(out)


def mu_example4(z):
    """Registry example 4 dilatation: -e^{2i theta} ln r / (1 + ln r) on
    e^{-1/2} < r < 1, zero inside."""
    zz = _as_complex(z)
    r = np.abs(zz)
    if np.any(r >= 1.0):
        raise ValueError("mu_example4 is defined on the open unit disk only")
    out = np.zeros_like(zz)
    ann = r > math.exp(-0.5)
    if np.any(ann):
        ra = r[ann]
        za = zz[ann]
        lr = np.log(ra)
        out[ann] = -(za * za) / (ra * ra) * (lr / (1.0 + lr))
    return out if out.shape else complex(out)


def example3_truncation_radius(alpha: float, k: float) -> float:
    """Radius below which truncation at level k zeroes example 3 (clipped to 1)."""
    if k * alpha <= 1.0:
        return 1.0
    return min(1.0, k * alpha / (2.0 * (k * alpha - 1.0)))


def example4_truncation_radius(k: float) -> float:
    """Radius below which truncation at level k zeroes example 4."""
    if k < 1.0:
        raise ValueError("truncation level must be >= 1")
    return math.exp((1.0 - k) / (2.0 * k))


@dataclass(frozen=True)
class MuSpec:
    """A dilatation field: registry kind plus an optional truncation cap.

    ``mu`` evaluates the field anywhere in the plane (zero outside the
    unit disk); ``k_cap`` applies truncation pointwise, keeping values with
    maximal dilatation <= k_cap and zeroing the rest.
    """

    kind: str
    alpha: float | None = None
    c: complex | None = None
    grid_field: ComplexField | None = None
    k_cap: float = math.inf

    def __post_init__(self) -> None:
        if self.kind == "example3":
            if self.alpha is None or not (0.0 < self.alpha < 2.0):
                raise ValueError("example3 needs alpha in (0, 2)")
        elif self.kind == "example4":
            pass
        elif self.kind == "constant":
            if self.c is None or abs(self.c) >= 1.0:
                raise ValueError("constant dilatation needs |c| < 1")
        elif self.kind == "grid":
            if self.grid_field is None:
                raise ValueError("grid dilatation needs a sampled field")
            if np.any(np.abs(self.grid_field.data) > 1.0):
                raise ValueError("grid dilatation samples must satisfy |mu| <= 1")
        else:
            raise ValueError(f"unknown dilatation kind {self.kind!r}")
        if not (self.k_cap >= 1.0):
            raise ValueError("truncation level must be >= 1")

    @classmethod
    def example3(cls, alpha: float) -> "MuSpec":
        return cls(kind="example3", alpha=alpha)

    @classmethod
    def example4(cls) -> "MuSpec":
        return cls(kind="example4")

    @classmethod
    def constant(cls, c: complex) -> "MuSpec":
        return cls(kind="constant", c=complex(c))

    @classmethod
    def from_grid(cls, field: ComplexField) -> "MuSpec":
        zz = field.grid.zz()
        data = np.where(np.abs(zz) < 1.0, field.data, 0.0)
        return cls(kind="grid", grid_field=ComplexField(field.grid, data))

    def mu(self, z):
        zz = _as_complex(z)
        r = np.abs(zz)
        inside = r < 1.0
        out = np.zeros_like(zz)
        if self.kind == "constant":
            out[inside] = self.c
        elif self.kind == "example3":
            out[inside] = np.asarray(mu_example3(zz[inside], self.alpha))
        elif self.kind == "example4":
            out[inside] = np.asarray(mu_example4(zz[inside]))
        else:
            out[inside] = self._interp_grid(zz[inside])
        if math.isfinite(self.k_cap):
            thr = (self.k_cap - 1.0) / (self.k_cap + 1.0)
            out = np.where(np.abs(out) <= thr, out, 0.0)
        return out if out.shape else complex(out)

    def _interp_grid(self, pts: np.ndarray) -> np.ndarray:
        g = self.grid_field.grid
        d = self.grid_field.data
        fx = np.clip((pts.real - g.x_min) / g.dx, 0.0, g.nx - 1.0)
        fy = np.clip((pts.imag - g.y_min) / g.dy, 0.0, g.ny - 1.0)
        ix = np.minimum(fx.astype(int), g.nx - 2)
        iy = np.minimum(fy.astype(int), g.ny - 2)
        tx = fx - ix
        ty = fy - iy
        return (
            d[iy, ix] * (1 - tx) * (1 - ty)
            + d[iy, ix + 1] * tx * (1 - ty)
            + d[iy + 1, ix] * (1 - tx) * ty
            + d[iy + 1, ix + 1] * tx * ty
        )

    def sample(self, grid) -> ComplexField:
        return ComplexField(grid, self.mu(grid.zz()))

    def sup_abs_bound(self) -> float:
        """Essential sup of |mu| after the cap (analytic where known)."""
        if self.kind == "constant":
            raw = abs(self.c)
        elif self.kind == "grid":
            raw = float(np.max(np.abs(self.grid_field.data)))
        else:
            raw = 1.0
        if math.isfinite(self.k_cap):
            return min(raw, (self.k_cap - 1.0) / (self.k_cap + 1.0))
        return raw

    def truncation_radius(self) -> float | None:
        """Radius of the disk emptied by the cap, for the registry kinds."""
        if not math.isfinite(self.k_cap):
            return None
        if self.kind == "example3":
            return example3_truncation_radius(self.alpha, self.k_cap)
        if self.kind == "example4":
            return example4_truncation_radius(self.k_cap)
        return None

    def jump_radii(self) -> tuple:
        """Circles where the field is discontinuous (finite-difference
        comparisons exclude small bands around these)."""
        if self.kind == "constant":
            return (1.0,) if self.c != 0 else ()
        if self.kind == "example3":
            inner = self.truncation_radius() or 0.5
            return (inner, 1.0) if inner < 1.0 else ()
        if self.kind == "example4":
            inner = self.truncation_radius() or math.exp(-0.5)
            return (inner,) if inner < 1.0 else ()
        return (1.0,)


def K_mu(mu_value):
    """Maximal dilatation (1 + |mu|) / (1 - |mu|); inf where |mu| = 1."""
    m = np.abs(np.asarray(mu_value))
    if np.any(m > 1.0 + 1e-12):
        raise ValueError("|mu| exceeds 1")
    m = np.minimum(m, 1.0)
    with np.errstate(divide="ignore"):
        out = np.where(m < 1.0, (1.0 + m) / (1.0 - m), np.inf)
    return out if out.shape else float(out)


def truncate_mu(spec: MuSpec, k: float) -> MuSpec:
    """Zero the field wherever its maximal dilatation exceeds k."""
    if k < 1.0:
        raise ValueError("truncation level must be >= 1")
    return replace(spec, k_cap=min(spec.k_cap, float(k)))


def mu_of_inverse(f_z, f_zbar):
    """Dilatation of the inverse map at the image point:
    mu_g(f(z)) = -f_zbar / conj(f_z); same modulus as mu_f."""
    fz = np.asarray(f_z, dtype=np.complex128)
    fzb = np.asarray(f_zbar, dtype=np.complex128)
    if np.any(np.abs(fz) <= np.abs(fzb)):
        raise ValueError("degenerate derivative pair: need |f_z| > |f_zbar|")
    out = -fzb / np.conj(fz)
    return out if out.shape else complex(out)


def K_Ip_field(fz: ComplexField, fzbar: ComplexField, order_p: float) -> ComplexField:
    """Pointwise inner dilatation of order p from Wirtinger derivative fields.

    (|f_z|^2 - |f_zbar|^2) / (|f_z| - |f_zbar|)^p, with value 1 where both
    derivatives vanish and inf where the Jacobian is non-positive without
    both vanishing.  Returns a real-valued extended field.
    """
    if not (1.0 < order_p <= 2.0):
        raise ValueError("order p must lie in (1, 2]")
    if fz.grid != fzbar.grid:
        raise ValueError("derivative fields live on different grids")
    az = np.abs(fz.data)
    ab = np.abs(fzbar.data)
    if not (np.all(np.isfinite(az)) and np.all(np.isfinite(ab))):
        if not (fz.extended and fzbar.extended):
            raise ValueError("non-finite derivative samples in a non-extended field")
    both_zero = (az + ab) == 0.0
    diff = az - ab
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = (az * az - ab * ab) / np.where(diff > 0.0, diff, 1.0) ** order_p
    out = np.where(both_zero, 1.0, np.where(diff > 0.0, vals, np.inf))
    return ComplexField(fz.grid, out.astype(np.complex128), extended=True)


# ---------------------------------------------------------------------------
# mass integrals and scans


@dataclass(frozen=True)
class L1Report:
    value: float
    divergent: bool
    partial: float
    shell_edges: tuple
    shell_values: tuple


def l1_norm(
    weight: RadialWeight,
    cfg: QuadratureConfig | None = None,
    max_shells: int = 40,
    growth_factor: float = 6.0,
) -> L1Report:
    """Mass of the weight over the unit ball, by dyadic radial shells.

    Shell terms c_j integrate omega_{n-1} q(s) s^{n-1} over
    [2^{-j-1}, 2^{-j}].  The sum is declared convergent once the last three
    terms decay geometrically (ratio <= 0.6) and the geometric tail estimate
    drops below tolerance; it is flagged divergent (value = inf, partial sum
    reported) once at least 8 shells are in, the last three terms stay above
    5% of the largest term, and the partial sum exceeds ``growth_factor``
    times the largest single term.
    """
    cfg = cfg or QuadratureConfig(abs_tol=1e-10, rel_tol=1e-10)
    omega = unit_sphere_area(weight.n)
    expn = weight.n - 1.0

    def integrand(s: float) -> float:
        return omega * weight.q(s) * s**expn

    edges: list[tuple[float, float]] = []
    terms: list[float] = []
    partial = 0.0
    for j in range(max_shells):
        hi = 2.0**-j
        lo = 2.0 ** -(j + 1)
        try:
            res = adaptive_integral_1d(
                integrand, lo, hi, cfg, breakpoints=weight.breakpoints(lo, hi)
            )
            term = res.value
        except IntegrandNonFinite:
            return L1Report(math.inf, True, math.inf, tuple(edges), tuple(terms))
        edges.append((lo, hi))
        terms.append(term)
        partial += term
        if len(terms) >= 3:
            c1, c2, c3 = terms[-3], terms[-2], terms[-1]
            if c2 <= 0.6 * c1 and c3 <= 0.6 * c2:
                ratio = 0.0 if c2 == 0.0 else min(c3 / c2, 0.9)
                tail = c3 * ratio / (1.0 - ratio)
                if tail <= max(cfg.abs_tol, cfg.rel_tol * partial):
                    return L1Report(
                        partial + tail, False, partial, tuple(edges), tuple(terms)
                    )
        biggest = max(terms)
        if (
            len(terms) >= 8
            and min(terms[-3:]) >= 0.05 * biggest
            and partial >= growth_factor * biggest
        ):
            return L1Report(math.inf, True, partial, tuple(edges), tuple(terms))
    if partial >= growth_factor * max(terms):
        return L1Report(math.inf, True, partial, tuple(edges), tuple(terms))
    raise QuadratureNonConvergence(partial, math.inf, 0)


@dataclass(frozen=True)
class IntegrabilityScan:
    radii: tuple
    means: tuple
    finite: tuple
    finite_measure_estimate: float


def spherical_integrability_scan(
    Q,
    y0,
    radii: Sequence[float],
    n: int = 2,
    cfg: QuadratureConfig | None = None,
) -> IntegrabilityScan:
    """Per-radius finiteness of the spherical mean of Q about y0, plus a
    trapezoid estimate of the measure of the radius set with finite mean."""
    rs = sorted(float(r) for r in radii)
    if not rs or rs[0] <= 0.0:
        raise ValueError("radii must be positive")
    means = []
    for r in rs:
        if isinstance(Q, RadialWeight):
            means.append(float(Q.q(r)))
        else:
            means.append(spherical_mean(Q, y0, r, n, cfg))
    flags = [math.isfinite(v) for v in means]
    measure = 0.0
    for i in range(len(rs) - 1):
        seg = rs[i + 1] - rs[i]
        measure += seg * 0.5 * (flags[i] + flags[i + 1])
    return IntegrabilityScan(tuple(rs), tuple(means), tuple(flags), measure)


@dataclass(frozen=True)
class DilatationReport:
    kind: str
    k_cap: float
    k_sup_probe: float
    ess_sup_mu: float
    l1: L1Report | None
    scan: IntegrabilityScan | None


def build_dilatation_report(
    spec: MuSpec,
    weight: RadialWeight | None = None,
    scan_radii: Sequence[float] | None = None,
    probe: int = 400,
) -> DilatationReport:
    """Assemble the standard diagnostics for a dilatation field."""
    ts = (np.arange(probe) + 0.5) / probe
    pts = 0.97 * np.sqrt(ts) * np.exp(2j * math.pi * ts * 29.0)
    kvals = np.asarray(K_mu(spec.mu(pts)))
    l1 = l1_norm(weight) if weight is not None else None
    scan = None
    if weight is not None and scan_radii is not None:
        scan = spherical_integrability_scan(weight, None, scan_radii, weight.n)
    return DilatationReport(
        kind=spec.kind,
        k_cap=spec.k_cap,
        k_sup_probe=float(np.max(kvals[np.isfinite(kvals)], initial=1.0)),
        ess_sup_mu=spec.sup_abs_bound(),
        l1=l1,
        scan=scan,
    )


# ---------------------------------------------------------------------------
# closed-form solutions for the registry examples


def solution_example3(z, alpha: float, k: float = math.inf):
    """Closed-form normalized solution for example 3 (optionally truncated
    at level k): the radial stretch (z/|z|) (2|z|-1)^(1/alpha) outside the
    truncation radius, a linear map inside (the limit k = inf collapses the
    inner disk to 0)."""
    if not (0.0 < alpha < 2.0):
        raise ValueError("alpha must lie in (0, 2)")
    zz = _as_complex(z)
    r = np.abs(zz)
    if np.any(r > 1.0 + 1e-12):
        raise ValueError("solution_example3 is defined on the closed unit disk")
    out = np.zeros_like(zz)
    if math.isinf(k):
        r_t = 0.5
        c_in = 0.0
    else:
        r_t = example3_truncation_radius(alpha, k)
        c_in = (
            1.0
            if r_t >= 1.0
            else (1.0 / (k * alpha - 1.0)) ** (1.0 / alpha) / r_t
        )
    outer = r > r_t
    inner = ~outer
    out[inner] = c_in * zz[inner]
    if np.any(outer):
        ro = r[outer]
        out[outer] = zz[outer] / ro * (2.0 * ro - 1.0) ** (1.0 / alpha)
    return out if out.shape else complex(out)


def solution_example4(z, k: float = math.inf):
    """Closed-form normalized solution for example 4 (optionally truncated):
    (z/|z|) (2 ln|z| + 1)^(1/2) outside the truncation radius, linear inside."""
    zz = _as_complex(z)
    r = np.abs(zz)
    if np.any(r > 1.0 + 1e-12):
        raise ValueError("solution_example4 is defined on the closed unit disk")
    out = np.zeros_like(zz)
    if math.isinf(k):
        r_t = math.exp(-0.5)
        c_in = 0.0
    else:
        r_t = example4_truncation_radius(k)
        c_in = math.exp((k - 1.0) / (2.0 * k)) / math.sqrt(k)
    outer = r > r_t
    inner = ~outer
    out[inner] = c_in * zz[inner]
    if np.any(outer):
        ro = r[outer]
        out[outer] = zz[outer] / ro * np.sqrt(2.0 * np.log(ro) + 1.0)
    return out if out.shape else complex(out)


def inverse_example3(y, alpha: float, k: float = math.inf):
    """Inverse of the example-3 solution: y (|y|^alpha + 1) / (2 |y|) on the
    outer branch, linear on the inner branch (k finite)."""
    if not (0.0 < alpha < 2.0):
        raise ValueError("alpha must lie in (0, 2)")
    yy = _as_complex(y)
    s = np.abs(yy)
    if np.any(s > 1.0 + 1e-12):
        raise ValueError("inverse_example3 is defined on the closed unit disk")
    if np.any(s == 0.0) and math.isinf(k):
        raise ValueError("0 is not in the image of the limit map")
    out = np.zeros_like(yy)
    if math.isinf(k):
        s_t = 0.0
        c_in = math.nan
    else:
        r_t = example3_truncation_radius(alpha, k)
        if r_t >= 1.0:
            return yy if yy.shape else complex(yy)
        s_t = (1.0 / (k * alpha - 1.0)) ** (1.0 / alpha)
        c_in = s_t / r_t
    outer = s > s_t
    inner = ~outer & (s > 0.0)
    if np.any(inner):
        out[inner] = yy[inner] / c_in
    if np.any(outer):
        so = s[outer]
        out[outer] = yy[outer] * (so**alpha + 1.0) / (2.0 * so)
    return out if out.shape else complex(out)


def inverse_example4(y, k: float = math.inf):
    """Inverse of the example-4 solution: (y/|y|) e^{(|y|^2 - 1)/2} on the
    outer branch, linear on the inner branch (k finite)."""
    yy = _as_complex(y)
    s = np.abs(yy)
    if np.any(s > 1.0 + 1e-12):
        raise ValueError("inverse_example4 is defined on the closed unit disk")
    if np.any(s == 0.0) and math.isinf(k):
        raise ValueError("0 is not in the image of the limit map")
    out = np.zeros_like(yy)
    s_t = 0.0 if math.isinf(k) else 1.0 / math.sqrt(k)
    outer = s > s_t
    inner = ~outer & (s > 0.0)
    if np.any(inner):
        c_in = math.exp((k - 1.0) / (2.0 * k)) / math.sqrt(k)
        out[inner] = yy[inner] / c_in
    if np.any(outer):
        so = s[outer]
        out[outer] = yy[outer] / so * np.exp((so * so - 1.0) / 2.0)
    return out if out.shape else complex(out)


def example3_image_weight(alpha: float) -> RadialWeight:
    """Majorant weight for the inverse dilatation of truncated example 3:
    q(s) = (s^alpha + 1) / (alpha s^alpha); integrable in degree q iff
    alpha < 2/q."""
    if not (0.0 < alpha < 2.0):
        raise ValueError("alpha must lie in (0, 2)")

    def q(s: float) -> float:
        if s <= 0.0:
            return math.inf
        return (s**alpha + 1.0) / (alpha * s**alpha)

    return RadialWeight(2, q, name=f"example3-image(alpha={alpha:g})")


def example4_image_weight() -> RadialWeight:
    """Majorant weight for the inverse dilatation of truncated example 4:
    q(s) = 1/s^2."""
    w = power_weight(2)
    return RadialWeight(2, w.q, name="example4-image")


def named_map(name: str, alpha: float | None = None, k: float | None = None,
              m: float | None = None):
    """Closed-form map registry for scans: returns (evaluator on complex
    arrays, branch radii).  Names: identity, example3, example4, example2."""
    kk = math.inf if k is None else float(k)
    if name == "identity":
        return (lambda z: _as_complex(z)), ()
    if name == "example3":
        a = 0.5 if alpha is None else alpha
        r_t = 0.5 if math.isinf(kk) else example3_truncation_radius(a, kk)
        radii = (r_t,) if r_t < 1.0 else ()
        return (lambda z: solution_example3(z, a, kk)), radii
    if name == "example4":
        r_t = math.exp(-0.5) if math.isinf(kk) else example4_truncation_radius(kk)
        return (lambda z: solution_example4(z, kk)), (r_t,)
    if name == "example2":
        mm = 2.0 if m is None else float(m)
        prof = Example2Profile(2, mm)

        def ev(z):
            zz = _as_complex(z)
            r = np.abs(zz)
            if np.any(r > 1.0 + 1e-12):
                raise ValueError("map defined on the closed unit disk")
            out = np.zeros_like(zz)
            pos = r > 0.0
            rp = r[pos]
            vals = np.array([prof.value(t) for t in rp])
            out[pos] = zz[pos] / rp * vals
            return out if out.shape else complex(out)

        return ev, prof.kink_radii
    raise ValueError(f"unknown map name {name!r}")
