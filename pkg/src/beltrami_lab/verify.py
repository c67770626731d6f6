"""Continuity and degeneracy harnesses for maps of the unit disk.

Three empirical checks live here:

* the log-continuity product |f(x) - f(y)| ln^{1/n}(1 + r0 / (2|x-y|)),
  scanned over random point pairs at dyadic separations; for maps built
  from integrable dilatation weights the per-scale maxima stay bounded,
* a divergence classifier for the integral of dt / (t q(t)) near 0, which
  separates weights that admit homeomorphic solutions from those that do
  not,
* the mean-oscillation statistic of a weight over shrinking balls.

None of the unknown constants in the continuity bounds are assumed; the
scans only test boundedness and report the empirical constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .numerics import (
    IntegrandNonFinite,
    QuadratureConfig,
    QuadratureNonConvergence,
    adaptive_integral_1d,
    unit_ball_volume,
    unit_sphere_area,
)
from .radial import RadialWeight, lehto_integral, spherical_mean

__all__ = [
    "HolderConfig",
    "HolderReport",
    "holder_product",
    "holder_scan",
    "LehtoScan",
    "lehto_divergence_scan",
    "FmoEntry",
    "fmo_statistic",
]


@dataclass(frozen=True)
class HolderConfig:
    """Sampling plan for the continuity scan.

    The compact is {|z| <= compact_radius}; r0 is its distance to the unit
    circle.  Scales are the pair separations, decreasing.
    """

    compact_radius: float = 0.75
    r0: float = 0.25
    dyadic_scales: tuple = tuple(2.0**-j for j in range(3, 15))
    pairs_per_scale: int = 2000
    n: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.compact_radius < 1.0):
            raise ValueError("compact_radius must lie in (0, 1)")
        if not (self.r0 > 0.0):
            raise ValueError("r0 must be positive")
        if self.compact_radius + self.r0 > 1.0 + 1e-12:
            raise ValueError("compact must fit in the unit disk: radius + r0 <= 1")
        sc = self.dyadic_scales
        if not sc or any(b >= a for a, b in zip(sc, sc[1:])):
            raise ValueError("scales must be strictly decreasing")
        if sc[0] >= 2.0 * self.compact_radius or sc[-1] <= 0.0:
            raise ValueError("scales must lie in (0, 2 * compact_radius)")
        if self.pairs_per_scale < 1:
            raise ValueError("pairs_per_scale must be positive")
        if self.n < 2:
            raise ValueError("dimension must be >= 2")


@dataclass(frozen=True)
class HolderReport:
    scales: tuple
    per_scale_max_product: tuple
    empirical_C: float
    q_l1: float
    bounded_flag: bool


def _log_factor(dist, r0: float, n: int):
    return np.log1p(r0 / (2.0 * dist)) ** (1.0 / n)


def holder_product(f: Callable, x: complex, y: complex, r0: float, n: int = 2) -> float:
    """|f(x) - f(y)| ln^{1/n}(1 + r0/(2|x - y|)); 0 at x = y (the
    continuous extension)."""
    if not (r0 > 0.0):
        raise ValueError("r0 must be positive")
    if x == y:
        return 0.0
    vals = np.asarray(f(np.array([x, y], dtype=np.complex128)))
    dist = abs(x - y)
    return float(abs(vals[0] - vals[1]) * _log_factor(dist, r0, n))


def _generic_pairs(rng, count: int, radius: float, scale: float):
    inner = max(radius - scale, 0.0)
    r = inner * np.sqrt(rng.uniform(size=count))
    phi = rng.uniform(0.0, 2.0 * math.pi, size=count)
    x = r * np.exp(1j * phi)
    theta = rng.uniform(0.0, 2.0 * math.pi, size=count)
    y = x + scale * np.exp(1j * theta)
    return x, y


def _branch_pairs(rng, count: int, radius: float, scale: float, circles: Sequence[float]):
    rc = np.array([circles[i % len(circles)] for i in range(count)])
    center = rc + rng.uniform(-1.0, 1.0, size=count) * scale
    center = np.clip(center, scale, radius - scale)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=count)
    psi = rng.uniform(0.0, 2.0 * math.pi, size=count)
    mid = center * np.exp(1j * phi)
    half = 0.5 * scale * np.exp(1j * psi)
    return mid - half, mid + half


def holder_scan(
    f: Callable,
    cfg: HolderConfig | None = None,
    Q: RadialWeight | float | None = None,
    branch_radii: Sequence[float] = (),
) -> HolderReport:
    """Max continuity product over random pairs at each scale.

    Half the pairs straddle the supplied branch circles (where the example
    maps are least regular); the rest are uniform over the compact.  The
    scan is deterministic given cfg.seed.  bounded_flag is false only when
    the maxima at the three finest scales grow monotonically by more than
    5% overall.
    """
    cfg = cfg or HolderConfig()
    if isinstance(Q, RadialWeight):
        from .dilatation import l1_norm

        q_l1 = l1_norm(Q).value
    elif Q is None:
        q_l1 = math.nan
    else:
        q_l1 = float(Q)
    rng = np.random.default_rng(cfg.seed)
    usable = [rc for rc in branch_radii if 0.0 < rc < cfg.compact_radius]
    maxima = []
    for scale in cfg.dyadic_scales:
        m = cfg.pairs_per_scale
        if usable and scale < cfg.compact_radius / 2.0:
            nb = m // 2
            bx, by = _branch_pairs(rng, nb, cfg.compact_radius, scale, usable)
            gx, gy = _generic_pairs(rng, m - nb, cfg.compact_radius, scale)
            xs = np.concatenate([bx, gx])
            ys = np.concatenate([by, gy])
        else:
            xs, ys = _generic_pairs(rng, m, cfg.compact_radius, scale)
        vals = np.asarray(f(np.concatenate([xs, ys])))
        diffs = np.abs(vals[: len(xs)] - vals[len(xs):])
        dist = np.abs(xs - ys)
        prods = diffs * _log_factor(dist, cfg.r0, cfg.n)
        maxima.append(float(prods.max()))
    a, b, c = maxima[-3], maxima[-2], maxima[-1]
    growing = c > b > a and c >= 1.05 * a
    top = max(maxima)
    emp = top / q_l1 ** (1.0 / cfg.n) if math.isfinite(q_l1) else math.nan
    return HolderReport(
        scales=tuple(cfg.dyadic_scales),
        per_scale_max_product=tuple(maxima),
        empirical_C=emp,
        q_l1=q_l1,
        bounded_flag=not growing,
    )


@dataclass(frozen=True)
class LehtoScan:
    delta: float
    cutoffs: tuple
    values: tuple
    increments: tuple
    normalized_increments: tuple
    classification: str
    diagnostics: str | None = None


def lehto_divergence_scan(
    w: RadialWeight,
    w0,
    delta: float,
    cutoffs: Sequence[float],
    cfg: QuadratureConfig | None = None,
) -> LehtoScan:
    """Values of the integral of dt/(t q(t)) from each cutoff up to delta,
    with a growth classification as the cutoff shrinks.

    Increments between successive cutoffs are normalized by the log of the
    cutoff ratio; the scan reports "divergent" when the last three
    normalized increments agree to within 25% of their mean (the signature
    of logarithmic growth), "convergent" when the raw increments decay
    geometrically (ratio <= 0.7) or vanish, else "inconclusive".
    """
    if w.n != 2:
        raise ValueError("scan expects a planar weight (n = 2)")
    if w0 not in (None, 0, 0.0, 0j):
        raise ValueError("weights are radial about their own center; w0 must be 0")
    cuts = [float(c) for c in cutoffs]
    if not cuts or any(b >= a for a, b in zip(cuts, cuts[1:])):
        raise ValueError("cutoffs must be strictly decreasing")
    if cuts[0] >= delta or cuts[-1] <= 0.0:
        raise ValueError("cutoffs must lie in (0, delta)")
    values = []
    increments = []
    normalized = []
    try:
        total = lehto_integral(w, cuts[0], delta, cfg)
        values.append(total)
        for prev, cur in zip(cuts, cuts[1:]):
            seg = lehto_integral(w, cur, prev, cfg)
            increments.append(seg)
            normalized.append(seg / math.log(prev / cur))
            total += seg
            values.append(total)
    except (QuadratureNonConvergence, IntegrandNonFinite) as exc:
        return LehtoScan(
            delta=delta,
            cutoffs=tuple(cuts),
            values=tuple(values),
            increments=tuple(increments),
            normalized_increments=tuple(normalized),
            classification="inconclusive",
            diagnostics=f"quadrature failure: {exc}",
        )
    if len(increments) < 3:
        cls = "inconclusive"
    else:
        d3 = increments[-3:]
        u3 = normalized[-3:]
        ratios = [b / a if a > 0 else math.inf for a, b in zip(d3, d3[1:])]
        mean_u = sum(u3) / 3.0
        if all(r <= 0.7 for r in ratios) or all(d <= 1e-13 for d in d3):
            cls = "convergent"
        elif mean_u > 0 and max(abs(u - mean_u) for u in u3) <= 0.25 * mean_u:
            cls = "divergent"
        else:
            cls = "inconclusive"
    return LehtoScan(
        delta=delta,
        cutoffs=tuple(cuts),
        values=tuple(values),
        increments=tuple(increments),
        normalized_increments=tuple(normalized),
        classification=cls,
    )


@dataclass(frozen=True)
class FmoEntry:
    eps: float
    value: float
    divergent: bool


def _ball_integral(mean_at, eps: float, n: int, cfg: QuadratureConfig | None,
                   breakpoints=()) -> float:
    omega = unit_sphere_area(n)

    def integrand(r: float) -> float:
        return omega * r ** (n - 1) * mean_at(r)

    return adaptive_integral_1d(integrand, 0.0, eps, cfg, breakpoints=breakpoints).value


def fmo_statistic(
    Q,
    x0,
    eps_list: Sequence[float],
    n: int = 2,
    cfg: QuadratureConfig | None = None,
) -> list[FmoEntry]:
    """Mean oscillation of Q over balls B(x0, eps): the ball average of
    |Q - ball mean|, both integrals by the same radial quadrature.  A
    non-integrable ball yields value inf with the divergent flag set."""
    epses = [float(e) for e in eps_list]
    if not epses or any(e <= 0 for e in epses) or any(
        b >= a for a, b in zip(epses, epses[1:])
    ):
        raise ValueError("eps_list must be positive and strictly decreasing")
    if isinstance(Q, RadialWeight):
        if x0 not in (None, 0, 0.0, 0j):
            raise ValueError("radial weights are centered; x0 must be 0")
        if Q.n != n:
            raise ValueError("weight dimension does not match n")
        mean_q = Q.q
        breaks = Q.breakpoints
    else:
        def mean_q(r: float) -> float:
            return spherical_mean(Q, x0, r, n, cfg)

        def breaks(a: float, b: float):
            return ()

    out = []
    for eps in epses:
        vol = unit_ball_volume(n) * eps**n
        bps = breaks(0.0, eps)
        try:
            ball_mean = _ball_integral(mean_q, eps, n, cfg, bps) / vol
            if not math.isfinite(ball_mean):
                raise IntegrandNonFinite(0.0, ball_mean)
            if isinstance(Q, RadialWeight):
                def osc_at(r: float, m=ball_mean) -> float:
                    return abs(Q.q(r) - m)
            else:
                def osc_at(r: float, m=ball_mean) -> float:
                    return spherical_mean(
                        lambda pts: np.abs(np.asarray(Q(pts)) - m), x0, r, n, cfg
                    )
            osc = _ball_integral(osc_at, eps, n, cfg, bps) / vol
            if not math.isfinite(osc):
                raise IntegrandNonFinite(0.0, osc)
            out.append(FmoEntry(eps=eps, value=osc, divergent=False))
        except (QuadratureNonConvergence, IntegrandNonFinite):
            out.append(FmoEntry(eps=eps, value=math.inf, divergent=True))
    return out
