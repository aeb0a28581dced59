"""Closed-form heat-kernel estimates, the unified one-plus-two-jump form,
the killed-kernel factorization, and regime/dominance classification.

The free-kernel estimate is a stable profile times a bracket of one-jump
and two-jump boundary terms whose shape depends on how the second weight
exponent compares with alpha plus the first: strictly below (one jump
dominates everywhere), strictly above, or exactly critical, where the
two-jump term picks up an extra logarithm.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import (
    BoundaryWeight,
    HalfSpacePoint,
    ModelParams,
    eval_J,
    lift_ed,
    weight_from_heights,
)
from .quadrature import QuadratureSpec, integrate_panels, merge_breaks

__all__ = [
    "Regime",
    "EstimateBreakdown",
    "detect_regime",
    "hke_closed",
    "hke_unified",
    "twojump_ball_integral",
    "killed_hke",
    "dominance_map",
    "DominanceCell",
]

_E = math.e


class Regime(enum.Enum):
    ONE_JUMP = "OneJump"
    TWO_JUMP_STRICT = "TwoJumpStrict"
    CRITICAL = "Critical"


def detect_regime(params: ModelParams, critical_tol: float = 0.0) -> Regime:
    """Classify by comparing the second exponent with alpha plus the first.

    ``critical_tol`` widens the critical band for sweeps near the phase
    transition; the default compares the supplied reals exactly.
    """
    gap = params.beta[1] - (params.alpha + params.beta[0])
    if abs(gap) <= critical_tol:
        return Regime.CRITICAL
    return Regime.ONE_JUMP if gap < 0.0 else Regime.TWO_JUMP_STRICT


@dataclass(frozen=True)
class EstimateBreakdown:
    """A heat-kernel estimate split into its factors."""

    regime: Regime
    stable: float
    one_jump: float
    two_jump: float
    survival_x: float
    survival_y: float
    free_value: float
    killed_value: float


def _time_clamp(u: float, dist: float, alpha: float) -> float:
    """(1 and t/dist^alpha), computed from the ratio u/dist so a joint
    power-of-two rescaling of all lengths leaves the bits unchanged."""
    try:
        return min(1.0, (u / dist) ** alpha)
    except OverflowError:
        return 1.0


def _stable(d: int, alpha: float, u: float, dist: float) -> float:
    """min(t^(-d/alpha), t dist^-(d+alpha)) via u = t^(1/alpha) only."""
    try:
        on = u ** (-float(d))
    except OverflowError:
        on = math.inf
    if dist <= 0.0:
        return on
    try:
        off = (u / dist) ** alpha * dist ** (-float(d))
    except OverflowError:
        return on
    return min(on, off)


def _bracket_terms(
    params: ModelParams,
    regime: Regime,
    u: float,
    x: HalfSpacePoint,
    y: HalfSpacePoint,
    dist: float,
) -> tuple[float, float]:
    """One-jump and two-jump bracket terms at the lifted point pair."""
    b1, b2, b3, b4 = params.beta
    alpha = params.alpha
    hmin = min(x.height, y.height) + u
    hmax = max(x.height, y.height) + u
    one = weight_from_heights(params.beta, hmin, hmax, dist)
    if regime is Regime.ONE_JUMP:
        return one, 0.0
    b4_eff = b3 if regime is Regime.TWO_JUMP_STRICT else b3 + b4 + 1.0
    two = _time_clamp(u, dist, alpha) * weight_from_heights(
        (b1, b1, 0.0, b4_eff), hmin, hmax, dist
    )
    if b3 > 0.0:
        two *= math.log(_E + dist / min(hmin, dist)) ** b3
    return one, two


def hke_closed(
    params: ModelParams,
    t: float,
    x: HalfSpacePoint,
    y: HalfSpacePoint,
    q: float = 0.0,
    critical_tol: float = 0.0,
    tscale: Optional[float] = None,
) -> EstimateBreakdown:
    """Sharp free-kernel estimate with all factors exposed.

    ``q`` is the survival exponent used for the killed value (0 leaves the
    killed value equal to the free one).  On the diagonal the on-diagonal
    profile is returned with a unit one-jump factor.
    """
    if t <= 0.0:
        raise ValueError("t must be > 0")
    regime = detect_regime(params, critical_tol)
    d = params.dim
    u = tscale if tscale is not None else t ** (1.0 / params.alpha)
    dist = x.distance_to(y)
    sx = min(x.height / u, 1.0) ** q
    sy = min(y.height / u, 1.0) ** q
    if dist == 0.0:
        on = u ** (-float(d))
        return EstimateBreakdown(
            regime=regime,
            stable=on,
            one_jump=1.0,
            two_jump=0.0,
            survival_x=sx,
            survival_y=sy,
            free_value=on,
            killed_value=sx * sy * on,
        )
    stable = _stable(d, params.alpha, u, dist)
    one, two = _bracket_terms(params, regime, u, x, y, dist)
    free = min(u ** (-float(d)), stable * (one + two))
    return EstimateBreakdown(
        regime=regime,
        stable=stable,
        one_jump=one,
        two_jump=two,
        survival_x=sx,
        survival_y=sy,
        free_value=free,
        killed_value=sx * sy * free,
    )


def killed_hke(
    params: ModelParams,
    t: float,
    x: HalfSpacePoint,
    y: HalfSpacePoint,
    q: float,
    critical_tol: float = 0.0,
    tscale: Optional[float] = None,
) -> float:
    """Killed-kernel estimate: two survival factors times the free estimate."""
    return hke_closed(params, t, x, y, q=q, critical_tol=critical_tol, tscale=tscale).killed_value


def _radial_two_jump(
    params: ModelParams,
    w: BoundaryWeight,
    t: float,
    u: float,
    x: HalfSpacePoint,
    y: HalfSpacePoint,
    dist: float,
    spec: QuadratureSpec,
) -> float:
    """Radial integral of the two-jump kernel product over the middle range.

    The midpoint travels up the vertical line through x; both jump-kernel
    factors are evaluated between lifted points, so the first factor's
    distance is exactly the integration variable.  Empty range gives 0.
    """
    lo = min(max(x.height, y.height, u), dist / 4.0)
    hi = dist / 2.0
    if lo >= hi:
        return 0.0
    d = params.dim
    alpha = params.alpha
    xh = x.height
    yh = y.height
    tang2 = sum((a - b) ** 2 for a, b in zip(x.tangential, y.tangential))

    if w.heights_profile is not None:
        def f(r: np.ndarray) -> np.ndarray:
            mid_h = xh + r + u
            w1 = w.heights_profile(
                np.minimum(xh + u, mid_h), np.maximum(xh + u, mid_h), r
            )
            d2 = np.sqrt(tang2 + (xh + r - yh) ** 2)
            w2 = w.heights_profile(
                np.minimum(mid_h, yh + u), np.maximum(mid_h, yh + u), d2
            )
            return w1 * r ** (-(d + alpha)) * w2 * d2 ** (-(d + alpha)) * r ** (d - 1)
    else:
        X = lift_ed(x, u)
        Y = lift_ed(y, u)

        def f(r: np.ndarray) -> np.ndarray:
            out = np.empty_like(r)
            for i, ri in enumerate(r):
                mid = lift_ed(x, ri + u)
                out[i] = eval_J(w, X, mid) * eval_J(w, mid, Y) * ri ** (d - 1)
            return out

    # integrable log singularities and clamp switches sit at the height and
    # time scales and where a lifted height crosses the far separation
    inner = [xh, yh, u, xh + u, yh + u, yh - xh]
    if yh + u > 0.0:
        m = 0.5 * (tang2 / (yh + u) - u + yh)
        inner.append(m - xh)
    root = (yh + u) ** 2 - tang2
    if root > 0.0:
        s = math.sqrt(root)
        inner.extend([yh + s - xh, yh - s - xh])
    breaks = merge_breaks([lo, math.sqrt(lo * hi), hi], inner, lo, hi)
    return integrate_panels(f, breaks, spec)


def hke_unified(
    params: ModelParams,
    w: BoundaryWeight,
    t: float,
    x: HalfSpacePoint,
    y: HalfSpacePoint,
    spec: QuadratureSpec | None = None,
    critical_tol: float = 0.0,
) -> float:
    """Unified estimate: one-jump kernel plus the radial two-jump integral.

    The two-jump term enters only when the second exponent reaches alpha
    plus the first; the whole bracket is capped by the on-diagonal profile.
    """
    spec = spec or QuadratureSpec()
    if t <= 0.0:
        raise ValueError("t must be > 0")
    dist = x.distance_to(y)
    if dist == 0.0:
        raise ValueError("distinct points required")
    alpha = params.alpha
    u = t ** (1.0 / alpha)
    X = lift_ed(x, u)
    Y = lift_ed(y, u)
    bracket = t * eval_J(w, X, Y)
    if detect_regime(params, critical_tol) is not Regime.ONE_JUMP:
        bracket += t * t * _radial_two_jump(params, w, t, u, x, y, dist, spec)
    return min(u ** (-float(params.dim)), bracket)


def twojump_ball_integral(
    params: ModelParams,
    w: BoundaryWeight,
    t: float,
    x: HalfSpacePoint,
    y: HalfSpacePoint,
    spec: QuadratureSpec | None = None,
    mc_samples: Optional[int] = None,
    seed: int = 0,
) -> float:
    """Two-jump product integrated over the mid ball, times t |x-y|^(d+alpha).

    The ball is centered halfway up the vertical line through x with radius
    a quarter of the distance; requires |x-y| > 6 t^(1/alpha).  Full
    quadrature for dim <= 3, Monte Carlo (with ``mc_samples``) otherwise.
    """
    spec = spec or QuadratureSpec()
    if t <= 0.0:
        raise ValueError("t must be > 0")
    dist = x.distance_to(y)
    alpha = params.alpha
    u = t ** (1.0 / alpha)
    if dist <= 6.0 * u:
        raise ValueError("requires |x-y| > 6 t^(1/alpha)")
    d = params.dim
    X = lift_ed(x, u)
    Y = lift_ed(y, u)
    radius = dist / 4.0
    center = HalfSpacePoint(d, x.tangential, x.height + dist / 2.0)

    def integrand_point(z: HalfSpacePoint) -> float:
        return eval_J(w, X, z) * eval_J(w, z, Y)

    if mc_samples is not None or d > 3:
        if mc_samples is None:
            raise ValueError("dim > 3 requires Monte-Carlo mode (mc_samples)")
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((mc_samples, d))
        radii = rng.random(mc_samples) ** (1.0 / d)
        norms = np.linalg.norm(pts, axis=1)
        total = 0.0
        base = np.array(center.coords())
        for row, norm, rad in zip(pts, norms, radii):
            zc = base + radius * rad * row / norm
            total += integrand_point(HalfSpacePoint.from_coords(zc))
        vol = math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * radius**d
        return t * dist ** (d + alpha) * vol * total / mc_samples

    if d == 1:
        def f1(z: np.ndarray) -> np.ndarray:
            out = np.empty_like(z)
            for i, zi in enumerate(z):
                out[i] = integrand_point(HalfSpacePoint(1, (), zi))
            return out

        lo, hi = center.height - radius, center.height + radius
        return t * dist ** (1 + alpha) * integrate_panels(
            f1, np.linspace(lo, hi, 5), spec
        )

    if d == 2:
        def f2(nodes: np.ndarray) -> np.ndarray:
            out = np.empty(nodes.shape[0])
            for i, (rho, phi) in enumerate(nodes):
                z = HalfSpacePoint(
                    2,
                    (center.tangential[0] + rho * math.cos(phi),),
                    center.height + rho * math.sin(phi),
                )
                out[i] = integrand_point(z) * rho
            return out

        return t * dist ** (2 + alpha) * _tensor_integral(
            f2, [(0.0, radius), (0.0, 2.0 * math.pi)], spec
        )

    def f3(nodes: np.ndarray) -> np.ndarray:
        out = np.empty(nodes.shape[0])
        for i, (rho, mu, phi) in enumerate(nodes):
            sin_th = math.sqrt(max(1.0 - mu * mu, 0.0))
            z = HalfSpacePoint(
                3,
                (
                    center.tangential[0] + rho * sin_th * math.cos(phi),
                    center.tangential[1] + rho * sin_th * math.sin(phi),
                ),
                center.height + rho * mu,
            )
            out[i] = integrand_point(z) * rho * rho
        return out

    return t * dist ** (3 + alpha) * _tensor_integral(
        f3, [(0.0, radius), (-1.0, 1.0), (0.0, 2.0 * math.pi)], spec
    )


def _tensor_integral(f, ranges, spec: QuadratureSpec) -> float:
    """Tensor-product Gauss quadrature over a box, doubled until stable."""
    from .quadrature import panel_nodes

    n = 12
    prev = None
    while n <= 96:
        axes = [panel_nodes([lo, 0.5 * (lo + hi), hi], n) for lo, hi in ranges]
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        wts = np.prod([g.ravel() for g in wgrids], axis=0)
        cur = float(np.dot(f(pts), wts))
        if prev is not None and abs(cur - prev) <= 10.0 * spec.tol(cur):
            return cur
        prev = cur
        n *= 2
    return cur


@dataclass(frozen=True)
class DominanceCell:
    """Per-target classification of the dominant contribution."""

    y: HalfSpacePoint
    tag: str  # "OneJumpDominant" or "TwoJumpDominant"
    one_jump: float
    two_jump: float
    both_zero: bool
    valid: bool  # whether |x-y| > 6 t^(1/alpha), where the picture is meaningful


def dominance_map(
    params: ModelParams,
    t: float,
    x: HalfSpacePoint,
    ys: Sequence[HalfSpacePoint],
    critical_tol: float = 0.0,
) -> list[DominanceCell]:
    """Compare the one-jump and two-jump bracket terms over a target grid."""
    regime = detect_regime(params, critical_tol)
    if regime is Regime.ONE_JUMP:
        raise ValueError("dominance map requires the two-jump regime")
    if t <= 0.0:
        raise ValueError("t must be > 0")
    u = t ** (1.0 / params.alpha)
    cells = []
    for y in ys:
        dist = x.distance_to(y)
        if dist == 0.0:
            cells.append(DominanceCell(y, "OneJumpDominant", 1.0, 0.0, False, False))
            continue
        one, two = _bracket_terms(params, regime, u, x, y, dist)
        tag = "OneJumpDominant" if one >= two else "TwoJumpDominant"
        cells.append(
            DominanceCell(y, tag, one, two, one == 0.0 and two == 0.0, dist > 6.0 * u)
        )
    return cells
