"""
Verification Harness Module

Ties the upper bounds to computed spectra:
- reference_spectrum: closed-form spectra of the flat torus and round sphere
- check_main_theorem: computed lambda_{k,p} against the Hodge bounds
- check_domain_decomposition: closed eigenvalues against Dirichlet
  eigenvalues of disjoint balls (exact for the discrete operators)
- check_packing: disjointness of balls centered along a diameter path
- quadform_comparison_check: randomized quadratic-form comparison trials
- convergence_ladder: p = 0 torus eigenvalue error across resolutions
- emit_report / parse_report: deterministic JSON and CSV reports

A row fails iff its margin (bound - lambda) is below -tol * bound.
"""

import io
import json
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.linalg

from src.bounds import (
    BoundResult,
    ManifoldClass,
    Regime,
    hodge_bound,
    neg_ricci_bound,
    nonneg_ricci_bound,
)
from src.config import TOOL_VERSION, Settings, resolve
from src.dec import (
    DecOperators,
    HodgePencil,
    SpectrumResult,
    assemble,
    dirichlet_subproblem,
    hodge_laplacian,
    restricted_pencil,
    solve_spectrum,
)
from src.errors import DegenerateDomainError, DomainError, HypothesisError, OverlapError, SolverError
from src.mesh import (
    BallSubset,
    EpsNet,
    SurfaceMesh,
    build_eps_net,
    build_flat_torus,
    geodesic_ball,
    packing_centers,
)

logger = logging.getLogger(__name__)

ROW_COLUMNS = [
    "k", "p", "lambda", "bound", "source", "regime", "margin", "pass",
    "lambda_positive", "lambda_bottom",
]

NO_USABLE_BALLS = "no usable balls"


class AnalyticSpectrum(Enum):
    FLAT_TORUS_2D = "FlatTorus2D"
    ROUND_SPHERE_2D = "RoundSphere2D"


@dataclass(frozen=True)
class ReportRow:
    """
    One inequality check.

    Attributes:
        k: Eigenvalue index (positive-indexed for theorem rows, bottom
            index j*l - 1 for decomposition rows)
        p: Form degree
        lam: The value compared against the bound
        bound: Upper bound
        source: Statement the bound comes from
        regime: Regime tag of the bound
        margin: bound - lam
        passed: margin >= -tol * bound
        lambda_positive / lambda_bottom: The two indexing conventions, when
            both apply
        extra: Row-specific fields (e.g. j, l, ball pair)
    """

    k: int
    p: int
    lam: float
    bound: float
    source: str
    regime: str
    margin: float
    passed: bool
    lambda_positive: Optional[float] = None
    lambda_bottom: Optional[float] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        row = {
            "k": self.k,
            "p": self.p,
            "lambda": self.lam,
            "bound": self.bound,
            "source": self.source,
            "regime": self.regime,
            "margin": self.margin,
            "pass": self.passed,
            "lambda_positive": self.lambda_positive,
            "lambda_bottom": self.lambda_bottom,
        }
        row.update(self.extra)
        return row


@dataclass
class VerificationReport:
    """
    Rows of inequality checks on one mesh, with solver diagnostics.

    Attributes:
        mesh: Mesh descriptor (e.g. "torus:32")
        manifold_class: Class the bounds were evaluated for, if any
        suite: "main", "decomp", "packing" or a "+"-joined merge
        rows: Checks ordered by (k, p)
        diagnostics: Seed, tolerance, method and solver details
        warnings: Hypothesis and numerical warnings raised while checking
    """

    mesh: str
    manifold_class: Optional[ManifoldClass]
    suite: str
    rows: List[ReportRow] = field(default_factory=list)
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def summary(self) -> Dict[str, int]:
        passed = sum(1 for row in self.rows if row.passed)
        return {"rows": len(self.rows), "passed": passed, "failed": len(self.rows) - passed}

    @property
    def all_passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mesh": self.mesh,
            "class": None if self.manifold_class is None else self.manifold_class.to_dict(),
            "suite": self.suite,
            "rows": [row.to_dict() for row in self.rows],
            "summary": self.summary,
            "diagnostics": dict(self.diagnostics),
            "warnings": list(self.warnings),
            "version": TOOL_VERSION,
        }


@dataclass(frozen=True)
class QuadformSummary:
    """Outcome of the randomized quadratic-form comparison trials."""

    trials: int
    dim1: int
    dim2: int
    seed: int
    violations: List[Dict[str, Any]]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trials": self.trials,
            "dim1": self.dim1,
            "dim2": self.dim2,
            "seed": self.seed,
            "violations": list(self.violations),
            "pass": self.passed,
        }


@dataclass(frozen=True)
class LadderStep:
    m: int
    lam1: float
    error: float


def _row(k: int, p: int, lam: float, bound: float, source: str, regime: str,
         rel_tol: float, **kwargs) -> ReportRow:
    margin = bound - lam
    return ReportRow(k, p, lam, bound, source, regime, margin,
                     bool(margin >= -rel_tol * abs(bound)), **kwargs)


def _lattice_norms(count: int) -> List[int]:
    """Smallest `count` values a^2 + b^2 over (a, b) in Z^2, with multiplicity."""
    radius = 1
    while True:
        span = np.arange(-radius, radius + 1)
        a, b = np.meshgrid(span, span)
        values = np.sort((a * a + b * b).ravel())
        complete = values[values <= radius * radius]
        if len(complete) >= count:
            return [int(v) for v in complete[:count]]
        radius *= 2


def reference_spectrum(manifold, p: int, count: int) -> List[float]:
    """
    First `count` eigenvalues, with multiplicity, of the Hodge Laplacian on
    the flat torus R^2/(2 pi Z)^2 or the unit round sphere.

    Args:
        manifold: AnalyticSpectrum or its value ("FlatTorus2D", "RoundSphere2D")
        p: Form degree 0, 1 or 2
        count: Number of eigenvalues (count >= 1)

    Raises:
        DomainError: For an unsupported manifold, p or count

    Examples:
        >>> reference_spectrum(AnalyticSpectrum.FLAT_TORUS_2D, 0, 6)
        [0.0, 1.0, 1.0, 1.0, 1.0, 2.0]
        >>> reference_spectrum("RoundSphere2D", 1, 6)
        [2.0, 2.0, 2.0, 2.0, 2.0, 2.0]
    """
    try:
        manifold = AnalyticSpectrum(manifold)
    except ValueError:
        raise DomainError(f"Unsupported manifold: {manifold}") from None
    if p not in (0, 1, 2):
        raise DomainError(f"Invalid p: {p}. Must be 0, 1 or 2.")
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        raise DomainError(f"Invalid count: {count}. Must be an integer >= 1.")

    if manifold is AnalyticSpectrum.FLAT_TORUS_2D:
        if p != 1:
            return [float(v) for v in _lattice_norms(count)]
        values = [0.0, 0.0]
        for v in _lattice_norms(count)[1:]:
            values += [float(v), float(v)]
        return values[:count]

    values: List[float] = []
    l = 0 if p != 1 else 1
    while len(values) < count:
        multiplicity = (2 * l + 1) if p != 1 else 2 * (2 * l + 1)
        values += [float(l * (l + 1))] * multiplicity
        l += 1
    return values[:count]


def _analytic_model(mesh: SurfaceMesh) -> Optional[AnalyticSpectrum]:
    if mesh.kind == "flat_torus":
        return AnalyticSpectrum.FLAT_TORUS_2D
    if mesh.kind == "icosphere":
        return AnalyticSpectrum.ROUND_SPHERE_2D
    return None


def canonical_class(mesh: SurfaceMesh, rH: Optional[float] = None) -> ManifoldClass:
    """
    Manifold class of a generator mesh.

    The flat torus takes rH = pi: its global flat chart has g_ij = delta_ij
    on every ball below the injectivity radius pi. The sphere's harmonic
    radius is not computed and must be supplied.

    Raises:
        HypothesisError: For a sphere without rH or an OFF mesh
    """
    if mesh.kind == "flat_torus":
        return ManifoldClass(2, 0.0, rH=math.pi if rH is None else rH, r0=math.pi,
                             D=math.sqrt(2.0) * math.pi)
    if mesh.kind == "icosphere":
        if rH is None:
            raise HypothesisError(
                "The sphere's harmonic radius rH must be supplied", hypothesis="harmonic radius rH"
            )
        return ManifoldClass(2, 1.0, rH=rH, r0=math.pi, D=math.pi)
    raise HypothesisError(
        f"No canonical manifold class for {mesh.descriptor}; supply n, xi, D and rH",
        hypothesis="manifold class",
    )


def _bound_function(source: str, settings: Settings) -> Callable[[ManifoldClass, int, int], BoundResult]:
    dispatch = {
        "thm1.2": lambda mc, k, p: hodge_bound(mc, k, p, settings),
        "cor3.3": nonneg_ricci_bound,
        "cor3.4": neg_ricci_bound,
    }
    if source not in dispatch:
        raise DomainError(f"Invalid source: {source}. Must be one of {sorted(dispatch)}.")
    return dispatch[source]


def _reference_deviation(mesh: SurfaceMesh, spectrum: SpectrumResult) -> Optional[float]:
    model = _analytic_model(mesh)
    if model is None:
        return None
    reference = reference_spectrum(model, spectrum.p, len(spectrum.eigenvalues))
    deviations = [
        abs(computed - expected) / expected
        for computed, expected in zip(spectrum.eigenvalues, reference)
        if expected > 0
    ]
    return max(deviations) if deviations else 0.0


def _spectrum_diagnostics(spectrum: SpectrumResult) -> Dict[str, Any]:
    return {
        "method": spectrum.method.value,
        "dim": spectrum.dim,
        "kernel_dim": spectrum.kernel_dim,
        "seed": spectrum.seed,
        "tol": spectrum.tol,
        "threads": spectrum.threads,
        "max_residual": max(spectrum.residual_norms),
    }


def check_main_theorem(
    mesh: SurfaceMesh,
    mc: ManifoldClass,
    k_max: int,
    p: int,
    source: str = "thm1.2",
    settings: Optional[Settings] = None,
    ops: Optional[DecOperators] = None,
) -> VerificationReport:
    """
    Compare computed lambda_{k,p} with the bound for k = 1..k_max.

    Each row carries both indexing conventions: the k-th positive
    eigenvalue (harmonic forms excluded) and the k-th from the bottom
    (0-indexed, kernel included). Pass/fail uses the larger of the two.

    Args:
        mesh: Closed mesh
        mc: Manifold class the bound is evaluated for
        k_max: Largest index (k_max >= 1)
        p: Form degree 0, 1 or 2
        source: "thm1.2", "cor3.3" or "cor3.4"
        settings: Tolerances
        ops: Pre-assembled operators of `mesh`

    Returns:
        VerificationReport with suite "main"
    """
    settings = resolve(settings)
    if isinstance(k_max, bool) or not isinstance(k_max, int) or k_max < 1:
        raise DomainError(f"Invalid k_max: {k_max}. Must be an integer >= 1.")
    bound_of = _bound_function(source, settings)

    warnings: List[str] = []
    if mesh.kind != "flat_torus":
        warnings.append(f"Harmonic radius rH={mc.rH} is user-supplied and not verified")
    if mc.xi > 0 and mc.rH is not None and mc.rH > math.pi / (2.0 * math.sqrt(mc.xi)):
        warnings.append(
            f"Harmonic radius rH={mc.rH} exceeds pi/(2 sqrt(xi))={math.pi / (2.0 * math.sqrt(mc.xi)):.12g}"
        )
    for message in warnings:
        logger.warning("%s: %s", mesh.descriptor, message)

    ops = assemble(mesh, settings) if ops is None else ops
    pencil = hodge_laplacian(ops, p)
    betti = mesh.betti_numbers()[p]
    num = min(k_max + betti + 1, pencil.dim)
    spectrum = solve_spectrum(pencil, num, settings=settings)
    warnings += spectrum.warnings
    if spectrum.kernel_dim != betti:
        warnings.append(f"Kernel dimension {spectrum.kernel_dim} differs from Betti number {betti}")

    rows: List[ReportRow] = []
    for k in range(1, k_max + 1):
        index = spectrum.kernel_dim + k - 1
        if index >= len(spectrum.eigenvalues) or k >= len(spectrum.eigenvalues):
            raise SolverError(
                f"Only {len(spectrum.eigenvalues)} eigenvalues for k={k}, p={p}",
                _spectrum_diagnostics(spectrum),
            )
        positive = spectrum.eigenvalues[index]
        bottom = spectrum.eigenvalues[k]
        bound = bound_of(mc, k, p)
        if bound.value is None:
            warnings.append(f"{bound.source} not applicable at k={k}: {bound.notes}")
            continue
        rows.append(_row(
            k, p, max(positive, bottom), bound.value, bound.source, bound.regime.value,
            settings.report_rel_tol, lambda_positive=positive, lambda_bottom=bottom,
        ))

    diagnostics = _spectrum_diagnostics(spectrum)
    diagnostics["betti"] = betti
    diagnostics["reference_deviation"] = _reference_deviation(mesh, spectrum)
    report = VerificationReport(mesh.descriptor, mc, "main", rows, diagnostics, warnings)
    logger.info("Main-theorem check on %s (p=%d, %s): %s", mesh.descriptor, p, source, report.summary)
    return report


def _validate_disjoint(pencils: Sequence[HodgePencil], parent: HodgePencil) -> None:
    """Kept simplex sets must be disjoint and uncoupled in the parent energy."""
    owner = np.full(parent.num_parent, -1)
    for i, pencil in enumerate(pencils):
        shared = pencil.dofs[owner[pencil.dofs] >= 0]
        if len(shared):
            raise OverlapError(
                f"Balls {int(owner[shared[0]])} and {i} share {len(shared)} kept {parent.p}-simplices"
            )
        owner[pencil.dofs] = i

    for i, pencil in enumerate(pencils):
        block = parent.A_full[pencil.dofs].tocoo()
        neighbours = owner[block.col[block.data != 0]]
        foreign = neighbours[(neighbours >= 0) & (neighbours != i)]
        if len(foreign):
            raise OverlapError(
                f"Balls {i} and {int(foreign[0])} are coupled in the p={parent.p} energy"
            )


def check_domain_decomposition(
    mesh: SurfaceMesh,
    balls: Sequence[BallSubset],
    l: int,
    p: int,
    settings: Optional[Settings] = None,
    ops: Optional[DecOperators] = None,
) -> VerificationReport:
    """
    Closed eigenvalues against Dirichlet eigenvalues of disjoint balls.

    For j balls and each l' = 1..l, one row compares lambda_{j l' - 1, p} of
    the closed mesh (0-indexed from the bottom, kernel included) with
    max_i of the (l'-1)-th Dirichlet eigenvalue of ball i. Zero extension
    preserves energy and mass and extended forms from different balls are
    orthogonal in both, so the inequality holds exactly for the discrete
    operators.

    Balls keeping fewer than l unknowns in degree p are dropped; the
    inequality holds for any subfamily of disjoint domains, so j counts the
    usable balls only and diagnostics["dropped_balls"] records the rest.
    When no ball is usable the report carries a single row with outcome
    "no usable balls", regime NotApplicable and no lambda or bound.

    Raises:
        OverlapError: If kept simplices are shared or coupled between balls
    """
    settings = resolve(settings)
    if isinstance(l, bool) or not isinstance(l, int) or l < 1:
        raise DomainError(f"Invalid l: {l}. Must be an integer >= 1.")
    if not balls:
        raise DomainError("Invalid balls: at least one ball is required.")

    ops = assemble(mesh, settings) if ops is None else ops
    parent = hodge_laplacian(ops, p)

    usable: List[BallSubset] = []
    pencils: List[HodgePencil] = []
    dropped: List[Dict[str, Any]] = []
    for ball in balls:
        try:
            sub = dirichlet_subproblem(mesh, ball, ops, settings)
            pencil = restricted_pencil(sub, p, parent)
        except DegenerateDomainError as err:
            dropped.append({"center": ball.center, "radius": ball.radius, "kept": 0})
            logger.info("Dropping ball at vertex %d: %s", ball.center, err)
            continue
        if pencil.dim < l:
            dropped.append({"center": ball.center, "radius": ball.radius, "kept": pencil.dim})
            logger.info("Dropping ball at vertex %d: %d < l=%d unknowns", ball.center, pencil.dim, l)
            continue
        usable.append(ball)
        pencils.append(pencil)

    _validate_disjoint(pencils, parent)

    j = len(usable)
    warnings: List[str] = []
    if dropped:
        warnings.append(f"{len(dropped)} of {len(balls)} balls keep fewer than l={l} {p}-form unknowns")
    if not usable:
        rows = [ReportRow(
            0, p, float("nan"), float("nan"), "Cor 2.6", Regime.NOT_APPLICABLE.value,
            float("nan"), True, extra={"j": 0, "l": l, "outcome": NO_USABLE_BALLS},
        )]
        diagnostics: Dict[str, Any] = {"balls": [], "dropped_balls": len(dropped), "dropped": dropped}
        report = VerificationReport(mesh.descriptor, None, "decomp", rows, diagnostics, warnings)
        logger.warning("Domain decomposition on %s (p=%d): no usable balls", mesh.descriptor, p)
        return report

    closed = solve_spectrum(parent, min(j * l, parent.dim), settings=settings)
    local = [solve_spectrum(pencil, l, settings=settings) for pencil in pencils]

    rows = []
    for level in range(1, l + 1):
        index = j * level - 1
        if index >= len(closed.eigenvalues):
            break
        bound = max(spectrum.eigenvalues[level - 1] for spectrum in local)
        rows.append(_row(
            index, p, closed.eigenvalues[index], bound,
            "Cor 2.6" if level == 1 else "Lem 2.5", Regime.GLOBAL.value,
            settings.decomposition_rel_tol, lambda_bottom=closed.eigenvalues[index],
            extra={"j": j, "l": level},
        ))

    diagnostics = _spectrum_diagnostics(closed)
    diagnostics["balls"] = [
        {"center": ball.center, "radius": ball.radius, "kept": pencil.dim}
        for ball, pencil in zip(usable, pencils)
    ]
    diagnostics["dropped_balls"] = len(dropped)
    diagnostics["dropped"] = dropped
    warnings = list(closed.warnings) + warnings
    report = VerificationReport(mesh.descriptor, None, "decomp", rows, diagnostics, warnings)
    logger.info("Domain decomposition on %s (p=%d, j=%d): %s", mesh.descriptor, p, j, report.summary)
    return report


def net_decomposition_balls(mesh: SurfaceMesh, eps: float) -> Tuple[EpsNet, List[BallSubset]]:
    """
    An eps-net of the mesh with the open balls B(x_i, eps) around its
    centers; the 2 eps separation makes these balls pairwise disjoint.
    """
    net = build_eps_net(mesh, eps)
    balls = [geodesic_ball(mesh, center, eps, open_ball=True) for center in net.centers]
    return net, balls


def check_packing(
    mesh: SurfaceMesh, k: int, settings: Optional[Settings] = None
) -> VerificationReport:
    """
    Check that open balls around k+1 centers spread along a diameter path
    are pairwise disjoint, one row per pair: twice the radius against the
    center distance, and no shared vertex.
    """
    settings = resolve(settings)
    packing = packing_centers(mesh, k, settings)
    balls = [geodesic_ball(mesh, c, packing.radius, open_ball=True) for c in packing.centers]

    rows: List[ReportRow] = []
    for a in range(len(balls)):
        distances = mesh.distances_from(packing.centers[a])
        for b in range(a + 1, len(balls)):
            separation = float(distances[packing.centers[b]])
            shared = len(np.intersect1d(balls[a].vertices, balls[b].vertices))
            row = _row(
                a, 0, 2.0 * packing.radius, separation, "packing", Regime.GLOBAL.value,
                settings.report_rel_tol, extra={"pair": [a, b], "shared_vertices": shared},
            )
            if shared:
                row = replace(row, passed=False)
            rows.append(row)

    diagnostics = {
        "k": k,
        "radius": packing.radius,
        "diameter": packing.diameter,
        "centers": list(packing.centers),
        "seed": settings.seed,
        "tol": settings.report_rel_tol,
        "method": "graph",
    }
    return VerificationReport(mesh.descriptor, None, "packing", rows, diagnostics, [])


def quadform_comparison(
    Q1: np.ndarray, M1: np.ndarray, Q2: np.ndarray, M2: np.ndarray, Phi: np.ndarray
) -> Tuple[float, float, np.ndarray, np.ndarray]:
    """
    Smallest valid comparison constants and both sides of the inequality.

    With <f,f>_1 <= C1 <Phi f, Phi f>_2 and Q1(f) >= C2 Q2(Phi f), returns
    (C1, C2, lambda_k(Q1), (C2 / C1) lambda_k(Q2)) for k < dim1. The
    constants are the extreme generalized eigenvalues of the pulled-back
    forms.
    """
    pulled_mass = Phi.T @ M2 @ Phi
    pulled_energy = Phi.T @ Q2 @ Phi
    C1 = float(scipy.linalg.eigh(M1, pulled_mass, eigvals_only=True)[-1])
    C2 = float(scipy.linalg.eigh(Q1, pulled_energy, eigvals_only=True)[0])
    dim1 = Q1.shape[0]
    lhs = scipy.linalg.eigh(Q1, M1, eigvals_only=True)
    rhs = (C2 / C1) * scipy.linalg.eigh(Q2, M2, eigvals_only=True)[:dim1]
    return C1, C2, lhs, rhs


def _random_positive(rng: np.random.Generator, dim: int) -> np.ndarray:
    R = rng.standard_normal((dim, dim))
    return R @ R.T + 0.1 * np.eye(dim)


def quadform_comparison_check(
    trials: int, dim1: int, dim2: int, seed: int = 0
) -> QuadformSummary:
    """
    Seeded random trials of the quadratic-form comparison inequality
    lambda_k(Q1) >= (C2 / C1) lambda_k(Q2).

    Trial t draws from seed + t, so any violation is reproducible from its
    recorded seed.

    Raises:
        DomainError: For trials < 1 or dim1 > dim2
    """
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise DomainError(f"Invalid trials: {trials}. Must be an integer >= 1.")
    if not 1 <= dim1 <= dim2:
        raise DomainError(f"Invalid dimensions: dim1={dim1}, dim2={dim2}. Must satisfy 1 <= dim1 <= dim2.")

    violations: List[Dict[str, Any]] = []
    for trial in range(trials):
        trial_seed = seed + trial
        rng = np.random.default_rng(trial_seed)
        Phi = rng.standard_normal((dim2, dim1))
        Q1, M1 = _random_positive(rng, dim1), _random_positive(rng, dim1)
        Q2, M2 = _random_positive(rng, dim2), _random_positive(rng, dim2)

        _, _, lhs, rhs = quadform_comparison(Q1, M1, Q2, M2, Phi)
        slack = lhs - rhs + 1e-9 * np.maximum(np.abs(lhs), np.abs(rhs))
        for k in np.flatnonzero(slack < 0):
            violations.append(
                {"seed": trial_seed, "k": int(k), "lhs": float(lhs[k]), "rhs": float(rhs[k])}
            )
            logger.warning("Comparison violated: seed=%d k=%d", trial_seed, int(k))

    logger.info("Quadratic-form comparison: %d trials, %d violations", trials, len(violations))
    return QuadformSummary(trials, dim1, dim2, seed, violations)


def convergence_ladder(
    ms: Sequence[int] = (8, 16, 32, 64), settings: Optional[Settings] = None
) -> List[LadderStep]:
    """First nonzero p = 0 torus eigenvalue and its error against 1, per m."""
    steps = []
    for m in ms:
        mesh = build_flat_torus(m)
        spectrum = solve_spectrum(hodge_laplacian(assemble(mesh, settings), 0), 2, settings=settings)
        lam1 = spectrum.first_nonzero
        steps.append(LadderStep(m, lam1, abs(lam1 - 1.0)))
        logger.info("Ladder m=%d: lambda_1=%.12g", m, lam1)
    return steps


def merge_reports(reports: Sequence[VerificationReport]) -> VerificationReport:
    """
    Combine reports on one mesh; rows are ordered by (k, p), stable within.

    Raises:
        DomainError: If the list is empty or the reports name different meshes
    """
    if not reports:
        raise DomainError("Invalid reports: nothing to merge.")
    meshes = {report.mesh for report in reports}
    if len(meshes) != 1:
        raise DomainError(f"Invalid reports: different meshes {sorted(meshes)}.")

    rows = sorted(
        (row for report in reports for row in report.rows), key=lambda row: (row.k, row.p)
    )
    suites: List[str] = []
    warnings: List[str] = []
    for report in reports:
        if report.suite not in suites:
            suites.append(report.suite)
        warnings += [w for w in report.warnings if w not in warnings]

    first = reports[0].diagnostics
    diagnostics = {
        "seed": first.get("seed"),
        "tol": first.get("tol"),
        "method": first.get("method"),
        "parts": [report.diagnostics for report in reports],
    }
    mc = next((r.manifold_class for r in reports if r.manifold_class is not None), None)
    return VerificationReport(reports[0].mesh, mc, "+".join(suites), rows, diagnostics, warnings)


def quantize(value: Any) -> Any:
    """
    Round floats to %.12e precision (13 significant digits) so output is
    byte-stable. The rounded value is returned as a float, so JSON text
    carries its shortest round-trip form (0.3, not 3.000000000000e-01).
    NaN becomes null and infinities the strings "inf" and "-inf".
    """
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return float("%.12e" % value)
    if isinstance(value, dict):
        return {str(k): quantize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [quantize(v) for v in value]
    return value


def emit_report(report: VerificationReport, fmt: str = "json") -> str:
    """
    Serialize a report deterministically.

    JSON: sorted keys, indent 2, floats rounded to %.12e precision and
    written in shortest round-trip form (see quantize). CSV: one header line
    and one line per row, floats written literally as %.12e.

    Raises:
        DomainError: For an unknown format
    """
    fmt = fmt.lower()
    if fmt == "json":
        return json.dumps(quantize(report.to_dict()), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        records = [row.to_dict() for row in report.rows]
        extra = sorted({key for record in records for key in record} - set(ROW_COLUMNS))
        frame = pd.DataFrame(records, columns=ROW_COLUMNS + extra)
        for column in extra:
            frame[column] = frame[column].map(
                lambda v: json.dumps(quantize(v)) if isinstance(v, (list, dict)) else v
            )
        return frame.to_csv(index=False, float_format="%.12e")
    raise DomainError(f"Invalid format: {fmt}. Must be 'json' or 'csv'.")


def write_report(report: VerificationReport, path: str, fmt: str = "json") -> None:
    """Write emit_report(report, fmt) to `path`."""
    with open(path, "w") as f:
        f.write(emit_report(report, fmt))
    logger.info("Report written to %s (%s)", path, report.summary)


def parse_report(text: str, fmt: str = "json") -> Dict[str, Any]:
    """
    Read a serialized report back into plain data.

    JSON yields the full document; CSV yields {"rows": [...]} with empty
    cells as None.
    """
    fmt = fmt.lower()
    if fmt == "json":
        return json.loads(text)
    if fmt == "csv":
        frame = pd.read_csv(io.StringIO(text))
        frame = frame.astype(object).where(frame.notna(), None)
        return {"rows": frame.to_dict(orient="records")}
    raise DomainError(f"Invalid format: {fmt}. Must be 'json' or 'csv'.")
