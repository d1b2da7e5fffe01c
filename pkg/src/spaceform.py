"""
Space Form Geometry Module

Closed-form and numerical geometry of the simply connected constant-curvature
model spaces:
- warp: the warping function s_xi(t) of geodesic polar coordinates
- sphere_volume / model_ball_volume: volumes of unit spheres and model balls
- ball_dirichlet_eigenvalue: first Dirichlet eigenvalue of a model ball by
  radial shooting, with Bessel and closed-form fast paths
- bessel_first_zero: first positive zero of J_nu

All functions are pure and safe to call from several threads.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq
from scipy.special import gamma, jn_zeros, jv

from src.config import Settings, resolve
from src.errors import DomainError, SolverError

logger = logging.getLogger(__name__)


class BallMethod(Enum):
    """How a model-ball eigenvalue was obtained."""

    SHOOTING = "Shooting"
    BESSEL_FAST_PATH = "BesselFastPath"
    CLOSED_FORM = "ClosedForm"


@dataclass(frozen=True)
class ModelSpace:
    """
    Simply connected space of constant sectional curvature xi.

    Attributes:
        n: Dimension (n >= 2)
        xi: Sectional curvature (1/length^2, any sign)
    """

    n: int
    xi: float

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise DomainError(f"Invalid dimension n: {self.n}. Must be an integer >= 2.")
        if not math.isfinite(self.xi):
            raise DomainError(f"Invalid curvature xi: {self.xi}. Must be finite.")

    @property
    def radius_cap(self) -> float:
        """pi/sqrt(xi) for xi > 0, infinity otherwise."""
        if self.xi > 0:
            return math.pi / math.sqrt(self.xi)
        return math.inf


@dataclass(frozen=True)
class BallEigenvalueResult:
    """First Dirichlet eigenvalue of a model ball with solver diagnostics."""

    lam: float
    radius: float
    iterations: int
    residual: float
    method: BallMethod

    def to_dict(self) -> Dict[str, object]:
        return {
            "lambda": self.lam,
            "radius": self.radius,
            "iterations": self.iterations,
            "residual": self.residual,
            "method": self.method.value,
        }


def _check_length(name: str, value: float, allow_zero: bool = False) -> None:
    if not math.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = "non-negative" if allow_zero else "positive"
        raise DomainError(f"Invalid {name}: {value}. Must be finite and {bound}.")


def warp(ms: ModelSpace, t: float) -> float:
    """
    Warping function s_xi(t) of the model space.

    sin(sqrt(xi) t)/sqrt(xi) for xi > 0, t for xi = 0 and
    sinh(sqrt(|xi|) t)/sqrt(|xi|) for xi < 0.

    Args:
        ms: Model space
        t: Distance from the pole (0 <= t <= pi/sqrt(xi) when xi > 0)

    Returns:
        s_xi(t) >= 0

    Raises:
        DomainError: If t is negative or beyond the antipode

    Examples:
        >>> warp(ModelSpace(2, -1.0), 1.0)
        1.1752011936438014
    """
    _check_length("t", t, allow_zero=True)
    if t > ms.radius_cap:
        raise DomainError(f"Invalid t: {t}. Must not exceed pi/sqrt(xi) = {ms.radius_cap}.")

    if ms.xi > 0:
        k = math.sqrt(ms.xi)
        return max(math.sin(k * t) / k, 0.0)
    if ms.xi < 0:
        k = math.sqrt(-ms.xi)
        return math.sinh(k * t) / k
    return float(t)


def _log_derivative(xi: float, t: float) -> float:
    """s'(t)/s(t) for t > 0."""
    if xi > 0:
        k = math.sqrt(xi)
        return k / math.tan(k * t)
    if xi < 0:
        k = math.sqrt(-xi)
        return k / math.tanh(k * t)
    return 1.0 / t


def sphere_volume(n: int) -> float:
    """
    Volume alpha_n of the unit n-sphere, 2 pi^((n+1)/2) / Gamma((n+1)/2).

    Raises:
        DomainError: For n < 1

    Examples:
        >>> sphere_volume(2)
        12.566370614359172
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"Invalid sphere dimension n: {n}. Must be an integer >= 1.")
    return float(2.0 * math.pi ** ((n + 1) / 2.0) / gamma((n + 1) / 2.0))


def model_ball_volume(ms: ModelSpace, r: float, settings: Optional[Settings] = None) -> float:
    """
    Volume V_xi(r) = alpha_{n-1} * int_0^r s_xi(t)^(n-1) dt of a model ball.

    The flat case uses the closed form alpha_{n-1} r^n / n; curved cases use
    adaptive quadrature to the configured relative tolerance.

    Raises:
        DomainError: If r <= 0 or r > pi/sqrt(xi) for xi > 0
    """
    settings = resolve(settings)
    _check_length("r", r)
    if r > ms.radius_cap:
        raise DomainError(f"Invalid r: {r}. Must not exceed pi/sqrt(xi) = {ms.radius_cap}.")

    alpha = sphere_volume(ms.n - 1)
    if ms.xi == 0:
        return alpha * r ** ms.n / ms.n

    integral, _ = quad(
        lambda t: warp(ms, t) ** (ms.n - 1),
        0.0,
        r,
        epsabs=0.0,
        epsrel=settings.quad_rtol,
        limit=200,
    )
    return alpha * integral


def bishop_net_lower_bound(
    ms: ModelSpace, volume: float, eps: float, settings: Optional[Settings] = None
) -> float:
    """
    Covering lower bound volume / V_xi(2 eps) on the size of an eps-net.

    A net whose 2*eps balls cover a manifold with Ric >= (n-1) xi needs at
    least this many centers by Bishop's volume comparison. Radii past the
    antipode of a positively curved model are clamped to the whole sphere.
    """
    _check_length("volume", volume)
    _check_length("eps", eps)
    radius = min(2.0 * eps, ms.radius_cap)
    return volume / model_ball_volume(ms, radius, settings)


def bessel_first_zero(nu: float, settings: Optional[Settings] = None) -> float:
    """
    First positive zero j_{nu,1} of the Bessel function J_nu.

    Integer orders come from scipy's zero tables; other orders are
    bracketed by scanning J_nu upward from nu and refined with brentq.

    Args:
        nu: Order (nu >= 0)

    Returns:
        j_{nu,1}

    Examples:
        >>> bessel_first_zero(0.0)
        2.404825557695773
    """
    settings = resolve(settings)
    if not math.isfinite(nu) or nu < 0:
        raise DomainError(f"Invalid Bessel order nu: {nu}. Must be finite and >= 0.")

    if float(nu).is_integer():
        return float(jn_zeros(int(nu), 1)[0])

    # J_nu > 0 on (0, j_{nu,1}) and j_{nu,1} > nu; zeros are more than pi apart
    step = 0.5
    a = nu + 1e-3
    b = a + step
    while jv(nu, b) > 0:
        a, b = b, b + step

    rtol = max(settings.bessel_rtol * 1e-2, 4 * np.finfo(float).eps)
    return float(brentq(lambda x: jv(nu, x), a, b, xtol=1e-15, rtol=rtol, maxiter=200))


def _flat_eigenvalue(n: int, r: float, settings: Settings) -> float:
    j = bessel_first_zero(n / 2.0 - 1.0, settings)
    return j * j / (r * r)


def _shoot(ms: ModelSpace, lam: float, r: float, settings: Settings, stop_at_zero: bool):
    """
    Integrate the radial equation from the series start to r.

    Returns the solve_ivp solution; with stop_at_zero the integration ends at
    the first sign change of u.
    """
    n, xi = ms.n, ms.xi
    t0 = settings.series_start_fraction * r
    y0 = [1.0 - lam * t0 * t0 / (2.0 * n), -lam * t0 / n]

    def rhs(t, y):
        return [y[1], -(n - 1) * _log_derivative(xi, t) * y[1] - lam * y[0]]

    events = None
    if stop_at_zero:
        def crossing(t, y):
            return y[0]

        crossing.terminal = True
        crossing.direction = -1
        events = crossing

    return solve_ivp(
        rhs,
        (t0, r),
        y0,
        method="DOP853",
        rtol=settings.ode_rtol,
        atol=settings.ode_atol,
        events=events,
        dense_output=not stop_at_zero,
    )


def _below_first_eigenvalue(ms: ModelSpace, lam: float, r: float, settings: Settings) -> bool:
    """True iff the radial solution stays positive on [0, r]."""
    sol = _shoot(ms, lam, r, settings, stop_at_zero=True)
    if sol.status == -1:
        raise SolverError(
            f"Radial integration failed at lambda={lam}: {sol.message}",
            {"lambda": lam, "radius": r},
        )
    crossed = sol.status == 1 and len(sol.t_events[0]) > 0
    return not crossed and sol.y[0, -1] > 0


def _normalized_residual(ms: ModelSpace, lam: float, r: float, settings: Settings) -> float:
    sol = _shoot(ms, lam, r, settings, stop_at_zero=False)
    grid = np.linspace(sol.t[0], r, 257)
    peak = float(np.max(np.abs(sol.sol(grid)[0])))
    return float(sol.y[0, -1]) / peak


def ball_dirichlet_eigenvalue(
    ms: ModelSpace,
    r: float,
    settings: Optional[Settings] = None,
    force_shooting: bool = False,
) -> BallEigenvalueResult:
    """
    First Dirichlet eigenvalue lambda_0^D(B_xi(r)) of a geodesic ball.

    The first eigenfunction is radial, so the problem reduces to
    u'' + (n-1)(s'/s) u' + lambda u = 0, u'(0) = 0, u(r) = 0. The
    integration starts at t0 = 1e-6 r from the series
    u = 1 - lambda t^2/(2n) and lambda is located by bisection on whether
    u keeps its sign on [0, r]. The bracket starts at [0.5, 2] times the
    flat value and expands geometrically.

    Fast paths (skipped when force_shooting is set):
    - xi = 0: j_{n/2-1,1}^2 / r^2 (pi^2/r^2 in closed form for n = 3)
    - n = 3: pi^2/r^2 - xi for curved balls

    Args:
        ms: Model space
        r: Ball radius (r > 0, r < pi/sqrt(xi) when xi > 0)
        settings: Tolerance overrides
        force_shooting: Always run the shooting solver

    Returns:
        BallEigenvalueResult

    Raises:
        DomainError: If r violates the preconditions
        SolverError: If no sign change is bracketed within the doubling cap,
            or the normalized residual stays above shooting_residual_tol

    Examples:
        >>> ball_dirichlet_eigenvalue(ModelSpace(3, 0.0), 1.0).lam
        9.869604401089358
    """
    settings = resolve(settings)
    _check_length("r", r)
    if r >= ms.radius_cap:
        raise DomainError(
            f"Invalid r: {r}. Must be below pi/sqrt(xi) = {ms.radius_cap} for xi = {ms.xi}."
        )

    if not force_shooting:
        if ms.n == 3:
            lam = math.pi ** 2 / (r * r) - ms.xi
            return BallEigenvalueResult(lam, r, 0, 0.0, BallMethod.CLOSED_FORM)
        if ms.xi == 0:
            lam = _flat_eigenvalue(ms.n, r, settings)
            return BallEigenvalueResult(lam, r, 0, 0.0, BallMethod.BESSEL_FAST_PATH)

    lam_flat = _flat_eigenvalue(ms.n, r, settings)
    lo, hi = 0.5 * lam_flat, 2.0 * lam_flat

    expansions = 0
    while not _below_first_eigenvalue(ms, lo, r, settings):
        expansions += 1
        if expansions > settings.bracket_max_doublings:
            raise SolverError(
                "Bracket expansion failed below the flat eigenvalue",
                {"lo": lo, "hi": hi, "radius": r, "expansions": expansions},
            )
        hi, lo = lo, lo / 2.0
    while _below_first_eigenvalue(ms, hi, r, settings):
        expansions += 1
        if expansions > settings.bracket_max_doublings:
            raise SolverError(
                "Bracket expansion failed above the flat eigenvalue",
                {"lo": lo, "hi": hi, "radius": r, "expansions": expansions},
            )
        lo, hi = hi, hi * 2.0

    iterations = 0
    while hi - lo > settings.bisection_rtol * hi:
        mid = 0.5 * (lo + hi)
        if _below_first_eigenvalue(ms, mid, r, settings):
            lo = mid
        else:
            hi = mid
        iterations += 1

    lam = 0.5 * (lo + hi)
    residual = _normalized_residual(ms, lam, r, settings)
    refinements = 0
    while abs(residual) > settings.shooting_residual_tol:
        if refinements >= settings.shooting_max_refinements:
            raise SolverError(
                f"Shooting residual {residual:.3e} above {settings.shooting_residual_tol:.1e} "
                f"after {refinements} refinements (n={ms.n}, xi={ms.xi}, r={r})",
                {"lambda": lam, "residual": residual, "lo": lo, "hi": hi},
            )
        if _below_first_eigenvalue(ms, lam, r, settings):
            lo = lam
        else:
            hi = lam
        lam = 0.5 * (lo + hi)
        residual = _normalized_residual(ms, lam, r, settings)
        refinements += 1
        iterations += 1
    logger.debug("Shooting converged: lambda=%.12e after %d bisections", lam, iterations)
    return BallEigenvalueResult(lam, r, iterations, residual, BallMethod.SHOOTING)

