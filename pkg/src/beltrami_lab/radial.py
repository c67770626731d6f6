"""Radial stretch maps, spherical means, Lehto integrals and ring moduli.

A radial map sends x to (x/|x|) * rho(|x|) for an increasing profile rho on
(0, 1] with rho(1) = 1.  Profiles either come from a closed-form registry
(identity, the truncated power-weight family ``example2``, and its m -> inf
limit ``example4-limit``) or are generated numerically from a radial weight
q through

    rho(r) = exp( - integral_r^1 dt / (t * q(t)^(1/(n-1))) ).

The generating integral is the Lehto integral; its divergence as r -> 0 is
what the degeneracy scans in :mod:`beltrami_lab.verify` probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .numerics import (
    IntegrandNonFinite,
    QuadratureConfig,
    QuadratureNonConvergence,
    adaptive_integral_1d,
    unit_sphere_area,
)

__all__ = [
    "RadialWeight",
    "unit_weight",
    "power_weight",
    "example1_weight",
    "truncated_power_weight",
    "weight_from_function",
    "spherical_mean",
    "lehto_integral",
    "RadialProfile",
    "IdentityProfile",
    "Example2Profile",
    "LimitStretchProfile",
    "NumericProfile",
    "TableProfile",
    "InverseProfile",
    "rho_profile",
    "radial_map_eval",
    "radial_map_invert",
    "StretchFactors",
    "radial_stretch_factors",
    "radial_K_Ip",
    "annulus_modulus",
    "PoletskyReport",
    "inverse_poletsky_check",
    "kip_integral_image_route",
    "kip_integral_source_route",
]


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class RadialWeight:
    """Spherical mean profile r -> q(r) of a nonnegative weight about a center.

    ``q`` may return ``math.inf``.  ``breakpoints_in(a, b)`` lists radii in
    (a, b) where q jumps, so quadrature can split there.
    """

    n: int
    q: Callable[[float], float]
    name: str = "custom"
    breakpoints_in: Callable[[float, float], tuple] | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("weight dimension must be at least 2")

    def breakpoints(self, a: float, b: float) -> tuple:
        if self.breakpoints_in is None:
            return ()
        return tuple(self.breakpoints_in(a, b))


def unit_weight(n: int = 2) -> RadialWeight:
    return RadialWeight(n, lambda t: 1.0, name="unit")


def power_weight(n: int = 2) -> RadialWeight:
    """q(t) = t^(-n), the borderline non-integrable weight."""
    return RadialWeight(n, lambda t: t ** (-float(n)), name=f"power{n}")


def _example1_phi(t: float, n: int) -> float:
    # alternating annuli: q = t^(-n) on [1/(2k), 1/(2k-1)], q = 1 on
    # (1/(2k+1), 1/(2k)); the power branch holds iff floor(1/t) is odd or
    # 1/t is an integer.
    if t <= 0.0:
        return math.inf
    if t >= 1.0:
        return t ** (-float(n)) if t == 1.0 else 1.0
    s = 1.0 / t
    j = math.floor(s)
    if s == j or (j % 2 == 1):
        return t ** (-float(n))
    return 1.0


def example1_weight(n: int = 2) -> RadialWeight:
    """Registry example 1: power-law annuli alternating with unit annuli.

    The weight equals t^(-n) on [1/(2k), 1/(2k-1)] and 1 in between; both
    its mass integral and the Lehto integral from 0 diverge, each through
    a harmonic-type series over the annuli.
    """

    def breakpoints(a: float, b: float, _n: int = n) -> tuple:
        if b <= a or b <= 0.0:
            return ()
        j_lo = max(2, math.ceil(1.0 / b))
        j_hi = math.floor(1.0 / a) if a > 0.0 else 4000
        j_hi = min(j_hi, j_lo + 4000)
        return tuple(
            1.0 / j for j in range(j_lo, j_hi + 1) if a < 1.0 / j < b
        )

    return RadialWeight(
        n, lambda t: _example1_phi(t, n), name="example1", breakpoints_in=breakpoints
    )


def truncated_power_weight(n: int, m: float) -> RadialWeight:
    """q(t) = t^(-n) outside radius 1/m, 1 inside (registry example 2)."""
    if m < 1.0:
        raise ValueError("truncation parameter m must be >= 1")
    cut = 1.0 / m

    def q(t: float) -> float:
        return 1.0 if t <= cut else t ** (-float(n))

    def breakpoints(a: float, b: float) -> tuple:
        return (cut,) if a < cut < b else ()

    return RadialWeight(n, q, name=f"example2(n={n},m={m:g})", breakpoints_in=breakpoints)


def spherical_mean(
    Q: Callable,
    y0,
    r: float,
    n: int = 2,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Average of Q over the sphere S(y0, r).

    Q takes a point as a length-n array.  For n = 2 the mean is an adaptive
    angular quadrature; for other n the function must be marked radial
    about the origin (attribute ``radial_about_origin``) with y0 = 0, in
    which case the mean is the direct evaluation Q(r * e1).  An infinite
    integrand at any quadrature node makes the mean ``inf``.
    """
    if r <= 0.0:
        raise ValueError("sphere radius must be positive")
    y0 = np.zeros(n) if y0 is None else np.asarray(y0, dtype=float)
    if y0.shape != (n,):
        raise ValueError(f"center must be a point of R^{n}")
    if getattr(Q, "radial_about_origin", False) and not np.any(y0):
        e1 = np.zeros(n)
        e1[0] = r
        return float(Q(e1))
    if n != 2:
        raise ValueError(
            "spherical means for n != 2 need a weight marked radial about 0"
        )

    def integrand(theta: float) -> float:
        p = y0 + r * np.array([math.cos(theta), math.sin(theta)])
        return float(Q(p))

    try:
        res = adaptive_integral_1d(integrand, 0.0, 2.0 * math.pi, cfg)
    except IntegrandNonFinite:
        return math.inf
    return res.value / (2.0 * math.pi)


def lehto_integral(
    w: RadialWeight,
    r_lo: float,
    r_hi: float,
    cfg: QuadratureConfig | None = None,
) -> float:
    """integral_{r_lo}^{r_hi} dt / (t * q(t)^(1/(n-1))).

    Conventions: the integrand is 0 where q = inf and inf where q = 0 (an
    infinite node makes the whole integral inf).  Divergence toward 0 is
    never probed here; shrink r_lo through the scan operations instead.
    """
    if r_lo < 0.0 or not math.isfinite(r_lo) or not math.isfinite(r_hi):
        raise ValueError("radii must be finite and nonnegative")
    if r_lo == 0.0:
        raise ValueError("lower radius must be positive; use a divergence scan for 0")
    if r_hi < r_lo:
        raise ValueError("need r_hi >= r_lo")
    if r_hi == r_lo:
        return 0.0
    expo = 1.0 / (w.n - 1.0)

    def integrand(t: float) -> float:
        qt = w.q(t)
        if qt == math.inf:
            return 0.0
        if qt <= 0.0:
            return math.inf
        return 1.0 / (t * qt**expo)

    try:
        res = adaptive_integral_1d(
            integrand, r_lo, r_hi, cfg, breakpoints=w.breakpoints(r_lo, r_hi)
        )
    except IntegrandNonFinite:
        return math.inf
    return res.value


# ---------------------------------------------------------------------------
# profiles


class RadialProfile:
    """Increasing profile rho on (0, 1] with rho(1) = 1 (or the map's range cap)."""

    n: int = 2
    kind: str = "abstract"
    kink_radii: tuple = ()

    def value(self, r: float) -> float:
        raise NotImplementedError

    def derivative(self, r: float, side: int = 0) -> float:
        """rho'(r); ``side`` -1/+1 picks a one-sided value at a kink."""
        raise NotImplementedError

    def inverse(self, s: float) -> float:
        raise NotImplementedError

    @property
    def rho_at_zero(self) -> float | None:
        """Limit of rho at 0+ when known (None for numeric profiles)."""
        return None

    def _check_radius(self, r: float) -> None:
        if not (0.0 < r <= 1.0 + 1e-12):
            raise ValueError(f"profile radius {r!r} outside (0, 1]")


@dataclass(frozen=True)
class IdentityProfile(RadialProfile):
    n: int = 2
    kind: str = "identity"
    kink_radii: tuple = ()

    def value(self, r: float) -> float:
        self._check_radius(r)
        return min(float(r), 1.0)

    def derivative(self, r: float, side: int = 0) -> float:
        self._check_radius(r)
        return 1.0

    def inverse(self, s: float) -> float:
        if not (0.0 <= s <= 1.0 + 1e-12):
            raise ValueError(f"value {s!r} outside the profile range")
        return min(float(s), 1.0)

    @property
    def rho_at_zero(self) -> float:
        return 0.0


class LimitStretchProfile(RadialProfile):
    """rho(r) = exp(((n-1)/n) (r^(n/(n-1)) - 1)), the m -> inf limit of
    the truncated family; for n = 2 this is exp((r^2 - 1)/2)."""

    kind = "example4-limit"

    def __init__(self, n: int = 2):
        if n < 2:
            raise ValueError("dimension must be at least 2")
        self.n = n
        self._a = (n - 1.0) / n
        self._b = n / (n - 1.0)
        self.kink_radii = ()

    def value(self, r: float) -> float:
        self._check_radius(r)
        r = min(float(r), 1.0)
        return math.exp(self._a * (r**self._b - 1.0))

    def derivative(self, r: float, side: int = 0) -> float:
        self._check_radius(r)
        r = min(float(r), 1.0)
        return self.value(r) * r ** (self._b - 1.0)

    def inverse(self, s: float) -> float:
        if not (0.0 < s <= 1.0 + 1e-12):
            raise ValueError(f"value {s!r} outside the profile range")
        s = min(float(s), 1.0)
        t = 1.0 + math.log(s) / self._a
        if t <= 0.0:
            raise ValueError(
                f"value {s!r} below the profile range (rho(0+) = {self.rho_at_zero:g})"
            )
        return t ** (1.0 / self._b)

    @property
    def rho_at_zero(self) -> float:
        return math.exp(-self._a)


class Example2Profile(RadialProfile):
    """Truncated power-weight profile: linear scaling inside radius 1/m,
    the limit-stretch branch outside.  m = 1 degenerates to the identity."""

    kind = "example2"

    def __init__(self, n: int = 2, m: float = 2.0):
        if n < 2:
            raise ValueError("dimension must be at least 2")
        if m < 1.0:
            raise ValueError("truncation parameter m must be >= 1")
        self.n = n
        self.m = float(m)
        self._outer = LimitStretchProfile(n)
        self._cut = 1.0 / self.m
        # inner slope: continuity at 1/m gives rho = m * slope0 * r there
        self._slope = self.m * self._outer.value(self._cut)
        self.kink_radii = (self._cut,) if self.m > 1.0 else ()

    def value(self, r: float) -> float:
        self._check_radius(r)
        r = min(float(r), 1.0)
        if r <= self._cut:
            return self._slope * r
        return self._outer.value(r)

    def derivative(self, r: float, side: int = 0) -> float:
        self._check_radius(r)
        r = min(float(r), 1.0)
        at_cut = abs(r - self._cut) <= 1e-12 * self._cut
        if r < self._cut or (at_cut and side < 0):
            return self._slope
        if at_cut and side == 0 and self.m > 1.0:
            # branch point belongs to the outer branch
            return self._outer.derivative(self._cut)
        return self._outer.derivative(max(r, self._cut))

    def inverse(self, s: float) -> float:
        if not (0.0 <= s <= 1.0 + 1e-12):
            raise ValueError(f"value {s!r} outside the profile range")
        s = min(float(s), 1.0)
        top = self._slope * self._cut
        if s <= top:
            return s / self._slope
        return self._outer.inverse(s)

    @property
    def rho_at_zero(self) -> float:
        return 0.0


class NumericProfile(RadialProfile):
    """Profile generated from a weight by quadrature of the Lehto integrand.

    Suffix integrals down from r = 1 are cached at a fixed node set; an
    evaluation at arbitrary r adds one short quadrature from r to the next
    node, so values agree with a from-scratch quadrature to the working
    tolerance and the profile is strictly increasing by construction.
    """

    kind = "numeric"

    def __init__(
        self,
        weight: RadialWeight,
        r_floor: float = 1e-3,
        cfg: QuadratureConfig | None = None,
    ):
        if not (0.0 < r_floor < 0.5):
            raise ValueError("r_floor must lie in (0, 0.5)")
        self.n = weight.n
        self.weight = weight
        self.r_floor = float(r_floor)
        self._cfg = cfg or QuadratureConfig(abs_tol=1e-12, rel_tol=1e-12)
        expo = 1.0 / (weight.n - 1.0)

        def g(t: float) -> float:
            qt = weight.q(t)
            if qt == math.inf:
                return 0.0
            if qt <= 0.0:
                return math.inf
            return 1.0 / (t * qt**expo)

        self._g = g
        lo_part = np.geomspace(self.r_floor, 0.1, 49)
        hi_part = np.linspace(0.1, 1.0, 181)
        nodes = set(np.concatenate([lo_part, hi_part]).tolist())
        nodes.update(weight.breakpoints(self.r_floor, 1.0))
        self._nodes = np.array(sorted(nodes))
        segs = []
        for lo, hi in zip(self._nodes[:-1], self._nodes[1:]):
            res = adaptive_integral_1d(
                g, lo, hi, self._cfg, breakpoints=weight.breakpoints(lo, hi)
            )
            segs.append(res.value)
        segs = np.array(segs)
        if np.any(segs <= 0.0):
            raise ValueError(
                "weight is infinite on a whole segment; profile would not be "
                "strictly increasing"
            )
        # suffix sums: tail[i] = integral from node i to 1
        self._tails = np.concatenate([np.cumsum(segs[::-1])[::-1], [0.0]])
        self.kink_radii = tuple(weight.breakpoints(self.r_floor, 1.0))

    def _tail_from(self, r: float) -> float:
        """integral_r^1 of the generating integrand; may raise on divergence."""
        if r >= 1.0:
            return 0.0
        i = int(np.searchsorted(self._nodes, r, side="left"))
        if i >= len(self._nodes):
            return 0.0
        node = float(self._nodes[i])
        tail = float(self._tails[i])
        if node > r:
            res = adaptive_integral_1d(
                self._g, r, node, self._cfg, breakpoints=self.weight.breakpoints(r, node)
            )
            tail += res.value
        return tail

    def value(self, r: float) -> float:
        v, degenerate = self.value_flagged(r)
        return v

    def value_flagged(self, r: float) -> tuple[float, bool]:
        """(rho(r), degenerate) where degenerate means the generating
        integral overflowed and rho is reported as 0."""
        self._check_radius(r)
        r = min(float(r), 1.0)
        try:
            tail = self._tail_from(r)
        except QuadratureNonConvergence as exc:
            if exc.estimate > 50.0:
                return 0.0, True
            raise
        if tail > 700.0:
            return 0.0, True
        return math.exp(-tail), False

    def derivative(self, r: float, side: int = 0) -> float:
        self._check_radius(r)
        r = min(float(r), 1.0)
        rho = self.value(r)
        if side == 0:
            return self._g(r) * rho
        # one-sided value just off a weight jump
        return self._g(r * (1.0 + side * 1e-13)) * rho

    def inverse(self, s: float) -> float:
        if not (0.0 < s <= 1.0 + 1e-12):
            raise ValueError(f"value {s!r} outside the profile range")
        s = min(float(s), 1.0)
        lo, hi = self.r_floor, 1.0
        flo = self.value(lo)
        if s < flo:
            # extend the bracket below the node floor
            while s < flo:
                if lo < 1e-9:
                    raise ValueError(
                        f"value {s!r} below the resolvable profile range"
                    )
                hi, lo = lo, lo * 0.25
                flo, _ = self.value_flagged(lo)
                if flo == 0.0:
                    break
        return _monotone_root(self.value, lo, hi, s)

    @property
    def table(self) -> tuple[np.ndarray, np.ndarray]:
        """Monotone sample table (r_i, rho(r_i)) at the cached nodes."""
        return self._nodes.copy(), np.exp(-self._tails)


class TableProfile(RadialProfile):
    """Profile interpolated from a user-supplied monotone table.

    Uses shape-preserving piecewise-cubic interpolation, so monotonicity of
    the table carries over to the interpolant with no overshoot.
    """

    kind = "numeric"

    def __init__(self, n: int, radii: Sequence[float], values: Sequence[float]):
        from scipy.interpolate import PchipInterpolator

        rs = np.asarray(radii, dtype=float)
        vs = np.asarray(values, dtype=float)
        if rs.ndim != 1 or rs.shape != vs.shape or rs.size < 4:
            raise ValueError("table needs matching 1-D arrays with >= 4 rows")
        if np.any(np.diff(rs) <= 0.0) or np.any(np.diff(vs) <= 0.0):
            raise ValueError("table must be strictly increasing in r and rho")
        if not (0.0 <= rs[0] and abs(rs[-1] - 1.0) <= 1e-9):
            raise ValueError("table radii must end at 1")
        if abs(vs[-1] - 1.0) > 1e-8:
            raise ValueError("profile table must satisfy rho(1) = 1")
        self.n = n
        self._rs = rs
        self._vs = vs
        self._interp = PchipInterpolator(rs, vs)
        self._dinterp = self._interp.derivative()
        self.kink_radii = ()

    def value(self, r: float) -> float:
        self._check_radius(r)
        r = min(float(r), 1.0)
        if r < self._rs[0]:
            raise ValueError(f"radius {r!r} below the table range")
        return float(self._interp(r))

    def derivative(self, r: float, side: int = 0) -> float:
        self._check_radius(r)
        return float(self._dinterp(min(float(r), 1.0)))

    def inverse(self, s: float) -> float:
        if not (self._vs[0] - 1e-12 <= s <= 1.0 + 1e-12):
            raise ValueError(f"value {s!r} outside the table range")
        s = min(max(float(s), self._vs[0]), 1.0)
        return _monotone_root(self.value, float(self._rs[0]), 1.0, s)

    @property
    def table(self) -> tuple[np.ndarray, np.ndarray]:
        return self._rs.copy(), self._vs.copy()


class InverseProfile(RadialProfile):
    """Profile of the inverse map of a strictly increasing base profile."""

    def __init__(self, base: RadialProfile):
        if abs(base.value(1.0) - 1.0) > 1e-9:
            raise ValueError("inverse profile needs rho(1) = 1 on the base")
        self.base = base
        self.n = base.n
        self.kind = f"inverse:{base.kind}"
        self.kink_radii = tuple(base.value(t) for t in base.kink_radii)

    def value(self, r: float) -> float:
        self._check_radius(r)
        return self.base.inverse(min(float(r), 1.0))

    def derivative(self, r: float, side: int = 0) -> float:
        self._check_radius(r)
        t = self.base.inverse(min(float(r), 1.0))
        return 1.0 / self.base.derivative(t, side=side)

    def inverse(self, s: float) -> float:
        return self.base.value(s)

    @property
    def rho_at_zero(self) -> float | None:
        z = self.base.rho_at_zero
        return 0.0 if z == 0.0 else None


def _monotone_root(fn: Callable[[float], float], lo: float, hi: float, target: float) -> float:
    """Solve fn(r) = target for increasing fn by bisection with a secant
    polish; terminates at 1e-12 absolute in the radius."""
    flo, fhi = fn(lo), fn(hi)
    if target <= flo:
        return lo
    if target >= fhi:
        return hi
    for _ in range(80):
        if hi - lo <= 1e-13:
            break
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm < target:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    if fhi > flo:
        r = lo + (target - flo) * (hi - lo) / (fhi - flo)
        return min(max(r, lo), hi)
    return 0.5 * (lo + hi)


def rho_profile(
    w: RadialWeight,
    cfg: QuadratureConfig | None = None,
    r_floor: float = 1e-3,
) -> NumericProfile:
    """Numeric profile generated from a radial weight."""
    return NumericProfile(w, r_floor=r_floor, cfg=cfg)


# ---------------------------------------------------------------------------
# maps built from profiles


def radial_map_eval(p: RadialProfile, x) -> np.ndarray:
    """Evaluate the radial map (x/|x|) rho(|x|) at a point of the closed unit ball."""
    x = np.asarray(x, dtype=float)
    if x.shape != (p.n,):
        raise ValueError(f"point must lie in R^{p.n}")
    r = float(np.linalg.norm(x))
    if r == 0.0:
        return np.zeros(p.n)
    if r > 1.0 + 1e-12:
        raise ValueError(f"|x| = {r!r} outside the closed unit ball")
    return (x / r) * p.value(min(r, 1.0))


def radial_map_invert(p: RadialProfile, y) -> np.ndarray:
    """Invert the radial map at y; |y| must lie in the profile's range."""
    y = np.asarray(y, dtype=float)
    if y.shape != (p.n,):
        raise ValueError(f"point must lie in R^{p.n}")
    s = float(np.linalg.norm(y))
    if s == 0.0:
        if p.rho_at_zero == 0.0:
            return np.zeros(p.n)
        raise ValueError("0 is not in the image of this radial map")
    if s > 1.0 + 1e-12:
        raise ValueError(f"|y| = {s!r} outside the closed unit ball")
    r = p.inverse(min(s, 1.0))
    return (y / s) * r


class StretchFactors(NamedTuple):
    tangential: float
    radial: float
    at_kink: bool = False
    radial_sides: tuple | None = None


def radial_stretch_factors(p: RadialProfile, s: float) -> StretchFactors:
    """(rho(s)/s, rho'(s)) at radius s.

    At a profile kink the radial factor is two-valued; the returned
    ``radial`` is the outer-branch (right) value, with both one-sided
    values in ``radial_sides`` and ``at_kink`` set.
    """
    if not (0.0 < s <= 1.0):
        raise ValueError(f"radius {s!r} outside (0, 1]")
    tangential = p.value(s) / s
    for t in p.kink_radii:
        if abs(s - t) <= 1e-12 * max(t, 1.0):
            left = p.derivative(s, side=-1)
            right = p.derivative(s, side=+1)
            return StretchFactors(tangential, right, True, (left, right))
    return StretchFactors(tangential, p.derivative(s))


def radial_K_Ip(p: RadialProfile, s: float, order_p: float) -> float:
    """Inner dilatation of order p of the radial map at radius s:
    (tangential * radial) / min(tangential, radial)^p, with the
    conventions 1 when both stretch factors vanish and inf when exactly
    one does."""
    if not (1.0 < order_p <= 2.0):
        raise ValueError("order p must lie in (1, 2]")
    f = radial_stretch_factors(p, s)
    dt, dr = f.tangential, f.radial
    if dt < 0.0 or dr < 0.0:
        raise ValueError("stretch factors must be nonnegative")
    if dt == 0.0 and dr == 0.0:
        return 1.0
    lo = min(dt, dr)
    if lo == 0.0:
        return math.inf
    return dt * dr / lo**order_p


def annulus_modulus(n: int, r1: float, r2: float) -> float:
    """Conformal modulus of the ring r1 < |x| < r2 in R^n."""
    if not (0.0 < r1 < r2):
        raise ValueError("need 0 < r1 < r2")
    return unit_sphere_area(n) / math.log(r2 / r1) ** (n - 1.0)


@dataclass(frozen=True)
class PoletskyReport:
    lhs: float
    rhs: float
    holds: bool
    lehto_value: float
    preimage_radii: tuple
    degenerate: bool


def inverse_poletsky_check(
    p: RadialProfile,
    w: RadialWeight,
    r1: float,
    r2: float,
    cfg: QuadratureConfig | None = None,
) -> PoletskyReport:
    """Modulus bound for the inverse map on the ring r1 < |y| < r2.

    lhs is the modulus of the preimage ring (radii rho^-1(r1), rho^-1(r2));
    rhs is omega_{n-1} / I^{n-1} with I the Lehto integral of the weight
    over (r1, r2).  ``holds`` allows a 1e-9 relative slack; a vanishing I
    makes the rhs infinite and the check degenerate.
    """
    if not (0.0 < r1 < r2 <= 1.0 + 1e-12):
        raise ValueError("need image radii 0 < r1 < r2 <= 1")
    n = p.n
    if w.n != n:
        raise ValueError("profile and weight dimensions differ")
    s1 = p.inverse(min(r1, 1.0))
    s2 = p.inverse(min(r2, 1.0))
    lhs = annulus_modulus(n, s1, s2)
    lehto = lehto_integral(w, r1, min(r2, 1.0), cfg)
    if lehto <= 0.0:
        return PoletskyReport(lhs, math.inf, True, lehto, (s1, s2), True)
    rhs = unit_sphere_area(n) / lehto ** (n - 1.0)
    holds = lhs <= rhs * (1.0 + 1e-9)
    return PoletskyReport(lhs, rhs, holds, lehto, (s1, s2), False)


# ---------------------------------------------------------------------------
# plane integrals of the inner dilatation (n = 2 maps)


def kip_integral_image_route(
    g_profile: RadialProfile,
    order_p: float,
    cfg: QuadratureConfig | None = None,
) -> float:
    """integral over the unit disk of K_Ip(y, g) dm(y) for the radial map g,
    computed as 2 pi * int_0^1 K_Ip(s) s ds."""

    def integrand(s: float) -> float:
        return radial_K_Ip(g_profile, s, order_p) * s

    res = adaptive_integral_1d(
        integrand, 1e-12, 1.0, cfg, breakpoints=g_profile.kink_radii
    )
    return 2.0 * math.pi * res.value


def kip_integral_source_route(
    f_profile: RadialProfile,
    order_p: float,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Same integral through the change of variables w = f(z): the p-energy
    2 pi * int_0^1 max(tangential, radial)^p s ds of the forward map f."""

    def integrand(s: float) -> float:
        fac = radial_stretch_factors(f_profile, s)
        return max(fac.tangential, fac.radial) ** order_p * s

    res = adaptive_integral_1d(
        integrand, 1e-12, 1.0, cfg, breakpoints=f_profile.kink_radii
    )
    return 2.0 * math.pi * res.value


def weight_from_function(
    Q: Callable,
    n: int = 2,
    center=None,
    cfg: QuadratureConfig | None = None,
    name: str = "mean",
) -> RadialWeight:
    """Radial weight r -> spherical mean of Q over S(center, r)."""
    y0 = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    cache: dict[float, float] = {}

    def q(r: float) -> float:
        v = cache.get(r)
        if v is None:
            v = spherical_mean(Q, y0, r, n, cfg)
            if len(cache) < 65536:
                cache[r] = v
        return v

    return RadialWeight(n, q, name=name)
