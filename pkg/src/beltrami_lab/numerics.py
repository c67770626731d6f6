"""Uniform grids, complex-valued fields, difference operators and 1-D quadrature.

Conventions fixed here and relied on by the rest of the package:

* field samples are stored row-major with y as the outer index, so
  ``data[iy, ix]`` sits at ``(x_min + ix*dx, y_min + iy*dy)``;
* Wirtinger derivatives use centered second-order differences in the
  interior and one-sided second-order stencils at the edges, which makes
  them exact (up to rounding) on affine fields;
* the 1-D integrator is an adaptive Gauss-Kronrod (G7/K15) scheme; the
  rule is open, so integrands singular at an interval endpoint can still
  be evaluated.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "GridSpec",
    "ComplexField",
    "QuadratureConfig",
    "QuadratureResult",
    "QuadratureNonConvergence",
    "IntegrandNonFinite",
    "wirtinger_derivatives",
    "wirtinger_at_point",
    "adaptive_integral_1d",
    "unit_sphere_area",
    "unit_ball_volume",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform rectangular sampling of a box in the plane."""

    nx: int
    ny: int
    x_min: float
    y_min: float
    dx: float
    dy: float

    def __post_init__(self) -> None:
        if self.nx < 8 or self.ny < 8:
            raise ValueError(f"grid must be at least 8x8, got {self.nx}x{self.ny}")
        if not (self.dx > 0.0 and self.dy > 0.0):
            raise ValueError("grid spacings must be positive")

    @classmethod
    def square(cls, n: int, half_width: float = 2.0) -> "GridSpec":
        """Centered n-by-n grid over [-half_width, half_width]^2, endpoints included."""
        if half_width <= 0.0:
            raise ValueError("half_width must be positive")
        if n < 8:
            raise ValueError(f"grid must be at least 8x8, got {n}x{n}")
        step = 2.0 * half_width / (n - 1)
        return cls(nx=n, ny=n, x_min=-half_width, y_min=-half_width, dx=step, dy=step)

    @property
    def x_max(self) -> float:
        return self.x_min + (self.nx - 1) * self.dx

    @property
    def y_max(self) -> float:
        return self.y_min + (self.ny - 1) * self.dy

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def xs(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.nx)

    def ys(self) -> np.ndarray:
        return self.y_min + self.dy * np.arange(self.ny)

    def zz(self) -> np.ndarray:
        """Complex coordinates z = x + iy, shape (ny, nx)."""
        return self.xs()[None, :] + 1j * self.ys()[:, None]

    def covers_disk(self, radius: float = 1.0, margin: float = 0.0) -> bool:
        r = radius + margin
        return (
            self.x_min < -r and self.x_max > r and self.y_min < -r and self.y_max > r
        )


@dataclass
class ComplexField:
    """Complex samples on a :class:`GridSpec`.

    ``extended=True`` marks fields that may legitimately hold ``inf``
    entries (pointwise dilatation quotients); otherwise non-finite data is
    rejected at construction.
    """

    grid: GridSpec
    data: np.ndarray
    extended: bool = False

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.data.shape != (self.grid.ny, self.grid.nx):
            raise ValueError(
                f"data shape {self.data.shape} does not match grid "
                f"({self.grid.ny}, {self.grid.nx})"
            )
        if not self.extended and not np.all(np.isfinite(self.data)):
            raise ValueError("non-finite samples in a field not flagged as extended")

    def copy_with(self, data: np.ndarray, extended: bool | None = None) -> "ComplexField":
        return ComplexField(self.grid, data, self.extended if extended is None else extended)


def wirtinger_derivatives(field: ComplexField) -> tuple[ComplexField, ComplexField]:
    """Discrete (f_z, f_zbar) of a sampled field.

    Centered second-order differences in the interior, one-sided
    second-order at the edges.  Exact for affine fields a + b*z + c*zbar up
    to rounding.
    """
    if field.grid.nx < 3 or field.grid.ny < 3:
        raise ValueError("wirtinger_derivatives needs at least a 3x3 grid")
    fx = np.gradient(field.data, field.grid.dx, axis=1, edge_order=2)
    fy = np.gradient(field.data, field.grid.dy, axis=0, edge_order=2)
    fz = 0.5 * (fx - 1j * fy)
    fzbar = 0.5 * (fx + 1j * fy)
    return field.copy_with(fz), field.copy_with(fzbar)


def wirtinger_at_point(
    f: Callable[[complex], complex], z: complex, step: float = 1e-5
) -> tuple[complex, complex]:
    """Pointwise (f_z, f_zbar) of a map by centered differences of size ``step``."""
    fx = (f(z + step) - f(z - step)) / (2.0 * step)
    fy = (f(z + 1j * step) - f(z - 1j * step)) / (2.0 * step)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


# ---------------------------------------------------------------------------
# adaptive quadrature


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 48

    def __post_init__(self) -> None:
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("quadrature tolerances must be positive")
        if not (0 < self.max_depth <= 60):
            raise ValueError("max_depth must lie in 1..60")


class QuadratureResult(NamedTuple):
    value: float
    error_bound: float
    evaluations: int


class QuadratureNonConvergence(RuntimeError):
    """Raised when max_depth is exhausted; carries the partial estimate."""

    def __init__(self, estimate: float, error_bound: float, evaluations: int):
        super().__init__(
            f"quadrature did not converge: estimate={estimate!r} "
            f"error_bound={error_bound!r}"
        )
        self.estimate = estimate
        self.error_bound = error_bound
        self.evaluations = evaluations


class IntegrandNonFinite(RuntimeError):
    """Raised when the integrand returns inf/nan at a quadrature node."""

    def __init__(self, x: float, value: float):
        super().__init__(f"integrand is non-finite at x={x!r}: {value!r}")
        self.x = x
        self.value = value


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (positive half; nodes are
# strictly interior, so the rule never evaluates interval endpoints).
_K15_NODES = np.array(
    [
        0.991455371120813,
        0.949107912342759,
        0.864864423359769,
        0.741531185599394,
        0.586087235467691,
        0.405845151377397,
        0.207784955007898,
        0.0,
    ]
)
_K15_WEIGHTS = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
    ]
)
# Gauss-7 weights aligned with Kronrod nodes 1, 3, 5, 7 (odd indices above).
_G7_WEIGHTS = np.array(
    [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
    ]
)


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float, int]:
    """One G7/K15 panel: returns (kronrod value, error estimate, evaluations)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.empty(15)
    xs = np.empty(15)
    for i in range(7):
        xs[2 * i] = mid - half * _K15_NODES[i]
        xs[2 * i + 1] = mid + half * _K15_NODES[i]
    xs[14] = mid
    for j in range(15):
        v = float(f(xs[j]))
        if not math.isfinite(v):
            raise IntegrandNonFinite(xs[j], v)
        vals[j] = v
    k15 = vals[14] * _K15_WEIGHTS[7]
    for i in range(7):
        k15 += (vals[2 * i] + vals[2 * i + 1]) * _K15_WEIGHTS[i]
    g7 = vals[14] * _G7_WEIGHTS[3]
    for i in range(3):
        g7 += (vals[4 * i + 2] + vals[4 * i + 3]) * _G7_WEIGHTS[i]
    return half * k15, abs(half * (k15 - g7)), 15


def adaptive_integral_1d(
    f: Callable[[float], float],
    a: float,
    b: float,
    cfg: QuadratureConfig | None = None,
    breakpoints: Sequence[float] = (),
) -> QuadratureResult:
    """Adaptive integral of ``f`` over ``[a, b]``.

    ``breakpoints`` pre-splits the interval at known non-smooth radii; each
    segment is then refined independently.  Subdivision proceeds worst
    interval first until the summed error estimate is below
    ``max(abs_tol, rel_tol*|value|)``.  When every offending interval has
    reached ``max_depth``, :class:`QuadratureNonConvergence` is raised
    carrying the partial estimate.
    """
    cfg = cfg or QuadratureConfig()
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration endpoints must be finite")
    if not b > a:
        raise ValueError(f"need b > a, got [{a!r}, {b!r}]")

    cuts = sorted({float(t) for t in breakpoints if a < t < b})
    edges = [a] + cuts + [b]

    # heap entries: (-err, tiebreak, lo, hi, value, depth)
    heap: list[tuple[float, int, float, float, float, int]] = []
    saturated_value = 0.0
    saturated_error = 0.0
    evals = 0
    counter = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e, n = _gk15(f, lo, hi)
        evals += n
        heapq.heappush(heap, (-e, counter, lo, hi, v, 0))
        counter += 1

    while True:
        total = saturated_value + sum(item[4] for item in heap)
        err = saturated_error + sum(-item[0] for item in heap)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if err <= tol:
            return QuadratureResult(total, err, evals)
        if not heap:
            raise QuadratureNonConvergence(total, err, evals)
        neg_e, _, lo, hi, v, depth = heapq.heappop(heap)
        if depth >= cfg.max_depth:
            # Nothing left to refine here; park it.  If the parked error
            # alone already exceeds the tolerance, no amount of refining
            # the remaining intervals can recover, so give up now.
            saturated_value += v
            saturated_error += -neg_e
            total = saturated_value + sum(item[4] for item in heap)
            err = saturated_error + sum(-item[0] for item in heap)
            tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
            if err <= tol:
                return QuadratureResult(total, err, evals)
            if saturated_error > tol:
                raise QuadratureNonConvergence(total, err, evals)
            continue
        mid = 0.5 * (lo + hi)
        v1, e1, n1 = _gk15(f, lo, mid)
        v2, e2, n2 = _gk15(f, mid, hi)
        evals += n1 + n2
        heapq.heappush(heap, (-e1, counter, lo, mid, v1, depth + 1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, mid, hi, v2, depth + 1))
        counter += 1


def unit_sphere_area(n: int) -> float:
    """Surface area of the unit sphere in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    if n < 2:
        raise ValueError("dimension must be at least 2")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)
