"""
Eigenvalue Upper Bounds Module

Evaluates the Cheng-type upper bounds for Hodge Laplacian eigenvalues on
closed manifolds with a Ricci lower bound and a harmonic-radius lower bound,
together with the volume, connection-Laplacian and non-compact (sigma^p)
variants.

Every evaluator:
- validates the hypotheses of the statement it implements
- selects the k-regime (LargeK when k >= D/(2 rH), SmallK when k <= D/(2 rH))
- returns a BoundResult tagged with its source statement and an input echo

The Ricci sign convention is always explicit. LowerBound means
Ric >= (n-1) xi (xi of any sign); NegativeLowerBound means Ric >= -(n-1) xi
with xi >= 0.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from src.config import Settings
from src.errors import DomainError, HypothesisError
from src.spaceform import ModelSpace, ball_dirichlet_eigenvalue, model_ball_volume, sphere_volume

logger = logging.getLogger(__name__)


class RicciSignConvention(Enum):
    """Which way xi enters the Ricci lower bound."""

    LOWER_BOUND = "LowerBound"
    NEGATIVE_LOWER_BOUND = "NegativeLowerBound"


class Regime(Enum):
    """k-regime of a bound; Global marks statements without one."""

    LARGE_K = "LargeK"
    SMALL_K = "SmallK"
    NOT_APPLICABLE = "NotApplicable"
    GLOBAL = "Global"


def _positive_or_none(name: str, value: Optional[float], allow_inf: bool = False) -> None:
    if value is None:
        return
    if math.isnan(value) or value <= 0 or (math.isinf(value) and not allow_inf):
        raise DomainError(f"Invalid {name}: {value}. Must be positive.")


@dataclass(frozen=True)
class ManifoldClass:
    """
    Parameters classifying a manifold for the bounds.

    Attributes:
        n: Dimension (n >= 2)
        xi: Ricci lower-bound parameter (meaning set by `convention`)
        rH: Harmonic-radius lower bound; math.inf marks the rH -> infinity limit
        r0: Injectivity-radius lower bound
        D: Diameter
        V: Volume
        convention: Ricci sign convention
    """

    n: int
    xi: float
    rH: Optional[float] = None
    r0: Optional[float] = None
    D: Optional[float] = None
    V: Optional[float] = None
    convention: RicciSignConvention = RicciSignConvention.LOWER_BOUND

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 2:
            raise DomainError(f"Invalid dimension n: {self.n}. Must be an integer >= 2.")
        if not math.isfinite(self.xi):
            raise DomainError(f"Invalid xi: {self.xi}. Must be finite.")
        _positive_or_none("rH", self.rH, allow_inf=True)
        _positive_or_none("r0", self.r0)
        _positive_or_none("D", self.D)
        _positive_or_none("V", self.V)

        if self.r0 is not None and self.rH is not None and self.rH > self.r0:
            raise HypothesisError(
                f"Harmonic radius rH={self.rH} exceeds injectivity radius r0={self.r0}",
                hypothesis="rH <= r0",
            )
        if self.convention is RicciSignConvention.NEGATIVE_LOWER_BOUND and self.xi < 0:
            raise HypothesisError(
                f"Invalid xi: {self.xi}. NegativeLowerBound convention requires xi >= 0.",
                hypothesis="xi >= 0 for Ric >= -(n-1) xi",
            )
        if (
            self.convention is RicciSignConvention.LOWER_BOUND
            and self.xi > 0
            and self.D is not None
            and self.D > math.pi / math.sqrt(self.xi)
        ):
            raise HypothesisError(
                f"Diameter D={self.D} exceeds the Myers bound pi/sqrt(xi)={math.pi / math.sqrt(self.xi)}",
                hypothesis="Myers diameter bound",
            )

    def model_space(self) -> ModelSpace:
        """Comparison model: curvature xi (LowerBound) or -xi (NegativeLowerBound)."""
        if self.convention is RicciSignConvention.NEGATIVE_LOWER_BOUND:
            return ModelSpace(self.n, -self.xi)
        return ModelSpace(self.n, self.xi)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "xi": self.xi,
            "rH": self.rH,
            "r0": self.r0,
            "D": self.D,
            "V": self.V,
            "convention": self.convention.value,
        }


@dataclass(frozen=True)
class BoundResult:
    """
    A computed upper bound.

    `value` is None exactly when the regime is NotApplicable.
    """

    value: Optional[float]
    regime: Regime
    source: str
    k: int
    p: int
    inputs: ManifoldClass
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "regime": self.regime.value,
            "source": self.source,
            "k": self.k,
            "p": self.p,
            "inputs": self.inputs.to_dict(),
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class VolumeBoundChain:
    """Intermediate quantities of the volume bound, from sharpest to final."""

    eps: float
    x: float
    threshold: float
    ratio_bound: float
    sinh_bound: float
    final: float


def _check_k(k: int) -> None:
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise DomainError(f"Invalid k: {k}. Must be an integer >= 1.")


def _check_p(p: int, n: int) -> None:
    if isinstance(p, bool) or not isinstance(p, int) or p < 0 or p > n:
        raise DomainError(f"Invalid form degree p: {p}. Must satisfy 0 <= p <= n = {n}.")


def _require_convention(mc: ManifoldClass, convention: RicciSignConvention, op: str) -> None:
    if mc.convention is not convention:
        raise HypothesisError(
            f"{op} requires the {convention.value} Ricci convention, got {mc.convention.value}",
            hypothesis=f"{convention.value} convention",
        )


def _require_diameter(mc: ManifoldClass, op: str) -> float:
    if mc.D is None:
        raise HypothesisError(f"{op} requires the diameter D", hypothesis="diameter D")
    return mc.D


def _require_harmonic_radius(mc: ManifoldClass, op: str) -> float:
    if mc.rH is None or math.isinf(mc.rH):
        raise HypothesisError(
            f"{op} requires a finite harmonic radius rH", hypothesis="harmonic radius rH"
        )
    return mc.rH


def _regime_flags(k: int, D: float, rH: float):
    """(large, small) membership of k; both hold at k = D/(2 rH)."""
    threshold = D / (2.0 * rH)
    tie = math.isclose(k, threshold, rel_tol=1e-12, abs_tol=0.0)
    return (k >= threshold or tie), (k <= threshold or tie)


def _select(large: bool, small: bool, large_value, small_value):
    """Pick the regime value; at the tie both apply and the minimum wins."""
    if large and small:
        return min(large_value(), small_value()), Regime.LARGE_K
    if large:
        return large_value(), Regime.LARGE_K
    return small_value(), Regime.SMALL_K


def cheng_function_bound(
    mc: ManifoldClass, k: int, settings: Optional[Settings] = None
) -> BoundResult:
    """
    Cheng's bound lambda_k <= lambda_0^D(B_xi(D/2k)) for functions.

    Args:
        mc: Manifold class (LowerBound convention, D required)
        k: Positive eigenvalue index (k >= 1)

    Returns:
        BoundResult with source "Thm 1.1"

    Examples:
        >>> mc = ManifoldClass(n=3, xi=0.0, D=2.0)
        >>> cheng_function_bound(mc, 1).value
        9.869604401089358
    """
    _check_k(k)
    _require_convention(mc, RicciSignConvention.LOWER_BOUND, "cheng_function_bound")
    D = _require_diameter(mc, "cheng_function_bound")

    ball = ball_dirichlet_eigenvalue(mc.model_space(), D / (2.0 * k), settings)
    return BoundResult(ball.lam, Regime.GLOBAL, "Thm 1.1", k, 0, mc)


def hodge_bound(
    mc: ManifoldClass, k: int, p: int, settings: Optional[Settings] = None
) -> BoundResult:
    """
    Hodge Laplacian bound on lambda_{k,p} from the model-ball eigenvalue.

    LargeK (k >= D/(2 rH)): 2^(2p+1) lambda_0^D(B_xi(D/2k))
    SmallK (k <= D/(2 rH)): 2^(2p+1) lambda_0^D(B_xi(rH))

    Args:
        mc: Manifold class (LowerBound convention, D and rH required)
        k: Eigenvalue index (k >= 1)
        p: Form degree (0 <= p <= n)

    Returns:
        BoundResult with source "Thm 1.2"

    Raises:
        DomainError: On invalid k or p
        HypothesisError: If D or rH is missing or the convention is wrong
    """
    _check_k(k)
    _check_p(p, mc.n)
    _require_convention(mc, RicciSignConvention.LOWER_BOUND, "hodge_bound")
    D = _require_diameter(mc, "hodge_bound")
    rH = _require_harmonic_radius(mc, "hodge_bound")

    ms = mc.model_space()
    factor = 2.0 ** (2 * p + 1)
    large, small = _regime_flags(k, D, rH)
    value, regime = _select(
        large,
        small,
        lambda: factor * ball_dirichlet_eigenvalue(ms, D / (2.0 * k), settings).lam,
        lambda: factor * ball_dirichlet_eigenvalue(ms, rH, settings).lam,
    )
    return BoundResult(value, regime, "Thm 1.2", k, p, mc)


def nonneg_ricci_bound(mc: ManifoldClass, k: int, p: int) -> BoundResult:
    """
    Closed-form bound for non-negative Ricci curvature.

    LargeK: 2^(2p+1) n^2 pi^2 k^2 / D^2
    SmallK: 2^(2p-1) n^2 pi^2 / rH^2

    Raises:
        HypothesisError: If xi < 0 or the convention is not LowerBound
    """
    _check_k(k)
    _check_p(p, mc.n)
    _require_convention(mc, RicciSignConvention.LOWER_BOUND, "nonneg_ricci_bound")
    if mc.xi < 0:
        raise HypothesisError(
            f"nonneg_ricci_bound requires Ric >= 0, got xi={mc.xi}", hypothesis="Ric >= 0"
        )
    D = _require_diameter(mc, "nonneg_ricci_bound")
    rH = _require_harmonic_radius(mc, "nonneg_ricci_bound")

    n2pi2 = mc.n ** 2 * math.pi ** 2
    large, small = _regime_flags(k, D, rH)
    value, regime = _select(
        large,
        small,
        lambda: 2.0 ** (2 * p + 1) * n2pi2 * k ** 2 / D ** 2,
        lambda: 2.0 ** (2 * p - 1) * n2pi2 / rH ** 2,
    )
    return BoundResult(value, regime, "Cor 3.3", k, p, mc)


def neg_ricci_bound(mc: ManifoldClass, k: int, p: int) -> BoundResult:
    """
    Closed-form bound under Ric >= -(n-1) xi, split by the parity of n.

    Even n = 2(m+1):
        2^(2p-1)(2m+1)^2 xi + 2^(2p+3)(1+2^m)^2 pi^2 k^2/D^2      (LargeK)
        2^(2p-1)(2m+1)^2 xi + 2^(2p+1)(1+2^m)^2 pi^2 / rH^2       (SmallK)
    Odd n = 2m+3:
        2^(2p-1)(2m+2)^2 xi + 2^(2p+3)(1+2^(2m))^2 (1+pi^2) k^2/D^2
        2^(2p-1)(2m+2)^2 xi + 2^(2p+1)(1+2^(2m))^2 (1+pi^2) / rH^2

    Examples:
        >>> mc = ManifoldClass(n=2, xi=1.0, D=2 * math.pi, rH=math.pi,
        ...                    convention=RicciSignConvention.NEGATIVE_LOWER_BOUND)
        >>> neg_ricci_bound(mc, 4, 0).value
        128.5
    """
    _check_k(k)
    _check_p(p, mc.n)
    _require_convention(mc, RicciSignConvention.NEGATIVE_LOWER_BOUND, "neg_ricci_bound")
    D = _require_diameter(mc, "neg_ricci_bound")
    rH = _require_harmonic_radius(mc, "neg_ricci_bound")

    n = mc.n
    if n % 2 == 0:
        m = n // 2 - 1
        base = 2.0 ** (2 * p - 1) * (2 * m + 1) ** 2 * mc.xi
        geometric = (1 + 2 ** m) ** 2 * math.pi ** 2
        source = "Cor 3.4(even)"
    else:
        if n < 3:
            raise DomainError(f"Invalid dimension n: {n}. Odd branch requires n >= 3.")
        m = (n - 3) // 2
        base = 2.0 ** (2 * p - 1) * (2 * m + 2) ** 2 * mc.xi
        geometric = (1 + 2 ** (2 * m)) ** 2 * (1 + math.pi ** 2)
        source = "Cor 3.4(odd)"

    large, small = _regime_flags(k, D, rH)
    value, regime = _select(
        large,
        small,
        lambda: base + 2.0 ** (2 * p + 3) * geometric * k ** 2 / D ** 2,
        lambda: base + 2.0 ** (2 * p + 1) * geometric / rH ** 2,
    )
    return BoundResult(value, regime, source, k, p, mc)


def _volume_hypotheses(mc: ManifoldClass, op: str):
    _require_convention(mc, RicciSignConvention.LOWER_BOUND, op)
    if mc.V is None:
        raise HypothesisError(f"{op} requires the volume V", hypothesis="volume V")
    rH = _require_harmonic_radius(mc, op)
    if mc.xi >= 0:
        raise HypothesisError(
            f"{op} requires xi < 0 (hyperbolic comparison), got xi={mc.xi}",
            hypothesis="xi < 0",
        )
    cap = 1.0 / math.sqrt(-mc.xi)
    if rH > cap:
        raise HypothesisError(
            f"Harmonic radius rH={rH} exceeds 1/sqrt(|xi|)={cap}",
            hypothesis="rH <= 1/sqrt(|xi|)",
        )
    threshold = 2.0 ** mc.n * mc.V / (sphere_volume(mc.n - 1) * rH ** mc.n)
    return rH, threshold


def volume_bound(mc: ManifoldClass, k: int, p: int) -> BoundResult:
    """
    Volume bound 2^(2p+n+5) (k+1) (alpha_n / V)^(2/n).

    Valid for k > 2^n V / (alpha_{n-1} rH^n); below that threshold the
    result is NotApplicable with no value.

    Raises:
        HypothesisError: If V or rH is missing, xi >= 0, or rH > 1/sqrt(|xi|)

    Examples:
        >>> mc = ManifoldClass(n=2, xi=-1.0, rH=1.0, V=4 * math.pi)
        >>> volume_bound(mc, 10, 0).value
        1408.0
    """
    _check_k(k)
    _check_p(p, mc.n)
    _, threshold = _volume_hypotheses(mc, "volume_bound")

    if not k > threshold:
        logger.info("volume_bound: k=%d does not exceed threshold %.6g", k, threshold)
        return BoundResult(
            None, Regime.NOT_APPLICABLE, "Thm 3.5", k, p, mc,
            notes=[f"k must exceed {threshold:.12g}"],
        )

    n = mc.n
    value = 2.0 ** (2 * p + n + 5) * (k + 1) * (sphere_volume(n) / mc.V) ** (2.0 / n)
    return BoundResult(value, Regime.LARGE_K, "Thm 3.5", k, p, mc)


def volume_bound_chain(
    mc: ManifoldClass, k: int, p: int, settings: Optional[Settings] = None
) -> VolumeBoundChain:
    """
    Intermediate estimates behind the volume bound.

    eps = (2/sqrt|xi|) asinh(x) with x^n = V |xi|^(n/2) / (alpha_n (k+1)).
    The ratio bound 2^(2p+3) V_xi(eps) / (eps^2 V_xi(eps/2)) is evaluated
    with model-ball volumes, the sinh bound 2^(2p+3) |xi| (1+x)^(n+2) / x^2
    in closed form.

    Raises:
        HypothesisError: As volume_bound, or when k is below the threshold
    """
    _check_k(k)
    _check_p(p, mc.n)
    rH, threshold = _volume_hypotheses(mc, "volume_bound_chain")
    if not k > threshold:
        raise HypothesisError(
            f"k={k} does not exceed the volume threshold {threshold:.12g}",
            hypothesis="k > 2^n V / (alpha_{n-1} rH^n)",
        )

    n, a = mc.n, abs(mc.xi)
    x = (mc.V * a ** (n / 2.0) / (sphere_volume(n) * (k + 1))) ** (1.0 / n)
    eps = 2.0 / math.sqrt(a) * math.asinh(x)
    ms = mc.model_space()
    ratio = model_ball_volume(ms, eps, settings) / model_ball_volume(ms, eps / 2.0, settings)

    prefactor = 2.0 ** (2 * p + 3)
    final = volume_bound(mc, k, p).value
    if eps >= rH:
        logger.warning("volume_bound_chain: eps=%.6g not below rH=%.6g", eps, rH)
    return VolumeBoundChain(
        eps=eps,
        x=x,
        threshold=threshold,
        ratio_bound=prefactor * ratio / eps ** 2,
        sinh_bound=prefactor * a * (1.0 + x) ** (n + 2) / x ** 2,
        final=final,
    )


def connection_laplacian_bound(mc: ManifoldClass, p: int = 1) -> BoundResult:
    """
    First nonzero connection-Laplacian eigenvalue on 1-forms under Ric >= 0.

    Value 2^(2p+1) n^2 pi^2 / rH^2. The statement concerns 1-forms but its
    constant carries p, exposed here with default 1.
    """
    _check_p(p, mc.n)
    _require_convention(mc, RicciSignConvention.LOWER_BOUND, "connection_laplacian_bound")
    if mc.xi < 0:
        raise HypothesisError(
            f"connection_laplacian_bound requires Ric >= 0, got xi={mc.xi}",
            hypothesis="Ric >= 0",
        )
    rH = _require_harmonic_radius(mc, "connection_laplacian_bound")
    value = 2.0 ** (2 * p + 1) * mc.n ** 2 * math.pi ** 2 / rH ** 2
    return BoundResult(value, Regime.GLOBAL, "Cor 3.7", 1, p, mc)


def local_dirichlet_bound(
    mc: ManifoldClass, radius: float, p: int, settings: Optional[Settings] = None
) -> BoundResult:
    """
    Bottom Dirichlet eigenvalue bound 2^(2p+1) lambda_0^D(B_xi(radius)) on
    p-forms over a geodesic ball of radius at most rH.
    """
    _check_p(p, mc.n)
    _require_convention(mc, RicciSignConvention.LOWER_BOUND, "local_dirichlet_bound")
    rH = _require_harmonic_radius(mc, "local_dirichlet_bound")
    if not (radius > 0) or radius > rH:
        raise HypothesisError(
            f"Invalid radius: {radius}. Must satisfy 0 < radius <= rH = {rH}.",
            hypothesis="radius <= rH",
        )
    lam = ball_dirichlet_eigenvalue(mc.model_space(), radius, settings).lam
    return BoundResult(2.0 ** (2 * p + 1) * lam, Regime.GLOBAL, "Lem 3.1", 0, p, mc)


def sigma_p_bounds(
    mc: ManifoldClass, p: int, settings: Optional[Settings] = None
) -> List[BoundResult]:
    """
    Bounds on the bottom sigma^p of the L^2 spectrum of a complete
    non-compact manifold.

    - rH = inf with Ric >= -(n-1) xi: sigma^p <= 2^(2p-1) (n-1)^2 xi  ("Cor 4.2")
    - finite rH: sigma^p <= 2^(2p+1) lambda_0^D(B(rH)) in the comparison
      model of the class  ("Thm 4.5")

    Both results carry regime Global, the one tag whose values may be zero:
    the rH = inf bound is exactly 0 at xi = 0, where it says sigma^p = 0.

    Raises:
        HypothesisError: If no statement applies to the class
    """
    _check_p(p, mc.n)
    results: List[BoundResult] = []

    if mc.rH is not None and math.isinf(mc.rH):
        if mc.convention is not RicciSignConvention.NEGATIVE_LOWER_BOUND:
            raise HypothesisError(
                "The rH -> infinity bound requires the NegativeLowerBound convention",
                hypothesis="NegativeLowerBound convention",
            )
        value = 2.0 ** (2 * p - 1) * (mc.n - 1) ** 2 * mc.xi
        results.append(BoundResult(value, Regime.GLOBAL, "Cor 4.2", 0, p, mc))
    else:
        rH = _require_harmonic_radius(mc, "sigma_p_bounds")
        lam = ball_dirichlet_eigenvalue(mc.model_space(), rH, settings).lam
        results.append(BoundResult(2.0 ** (2 * p + 1) * lam, Regime.GLOBAL, "Thm 4.5", 0, p, mc))

    return results


def savo_hyperbolic_sigma(n: int, p: int) -> float:
    """
    Bottom of the L^2 spectrum on p-forms of hyperbolic n-space:
    0 for p <= (n+1)/2, (2p-n-1)^2/4 otherwise.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise DomainError(f"Invalid dimension n: {n}. Must be an integer >= 2.")
    _check_p(p, n)
    if 2 * p <= n + 1:
        return 0.0
    return (2 * p - n - 1) ** 2 / 4.0
