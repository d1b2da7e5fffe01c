"""
Discrete Exterior Calculus Module

Discrete forms on a SurfaceMesh and the spectra of their Hodge Laplacians:
- assemble: exterior derivatives d0, d1 and diagonal Hodge stars
- hodge_laplacian: the symmetric pencil (A, B) of the Laplacian on p-forms
- solve_spectrum: smallest generalized eigenvalues, dense or shift-invert
- dirichlet_subproblem / dirichlet_spectrum: forms vanishing outside a
  geodesic ball, with the zero-extension energy identity
- zero_extension / quadratic_energy / mass: the parent quadratic forms

Zero cotan weights (a right angle opposite an edge) are condensed rather
than rejected: for p = 1 the massless edge unknowns are eliminated by a
Schur complement, for p = 2 faces joined across them share one unknown.
The p = 2 unknowns are face densities u = star2 w, so the mass matrix is
the face areas.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix, diags, identity
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import ArpackNoConvergence, eigsh, spsolve

from src.config import Settings, resolve
from src.errors import AssemblyError, DegenerateDomainError, DomainError, MeshQualityError, SolverError
from src.mesh import BallSubset, SurfaceMesh

logger = logging.getLogger(__name__)

_DEGENERATE_AREA_REL = 1e-14


class SolverMethod(Enum):
    DENSE = "Dense"
    ITERATIVE = "Iterative"


@dataclass(frozen=True)
class DecOperators:
    """
    Exterior derivatives and diagonal Hodge stars of a mesh.

    Diagonal stars are stored as 1-D arrays of their diagonal entries.

    Attributes:
        mesh: Mesh the operators were assembled on
        d0: (E, V) signed incidence, -1 at the tail and +1 at the head
        d1: (F, E) signed incidence by induced orientation
        star0: (V,) barycentric dual areas
        star1: (E,) cotan weights; entries within the zero-weight
            tolerance are stored as exact zeros
        star2: (F,) inverse triangle areas
        areas: (F,) triangle areas
        quality: Fraction of negative star1 entries
    """

    mesh: SurfaceMesh
    d0: csr_matrix
    d1: csr_matrix
    star0: np.ndarray
    star1: np.ndarray
    star2: np.ndarray
    areas: np.ndarray
    quality: float

    @property
    def zero_edges(self) -> np.ndarray:
        """Boolean mask of edges with zero cotan weight."""
        return self.star1 == 0.0

    def star(self, p: int) -> csr_matrix:
        """Hodge star on p-forms as a sparse diagonal matrix."""
        return diags((self.star0, self.star1, self.star2)[p]).tocsr()


@dataclass(frozen=True)
class HodgePencil:
    """
    Symmetric generalized eigenproblem A x = lambda B x for p-forms.

    The pencil acts on reduced unknowns x. `expansion` maps them to values
    on the full simplices `dofs` of the parent mesh, where the unreduced
    forms `A_full`, `B_full` live:

        A = expansion^T A_full expansion,  B = expansion^T B_full expansion

    Attributes:
        p: Form degree
        A: (n, n) symmetric energy matrix
        B: (n,) diagonal mass
        A_full / B_full: energy and mass on the unreduced simplices
        expansion: (len(dofs), n) reduced-to-full map
        dofs: Parent simplex indices the pencil acts on
        num_parent: Number of parent p-simplices
        indefinite: True when negative weights were admitted by override
        warnings: Messages to carry into results
    """

    p: int
    A: csr_matrix
    B: np.ndarray
    A_full: csr_matrix
    B_full: np.ndarray
    expansion: csr_matrix
    dofs: np.ndarray
    num_parent: int
    indefinite: bool = False
    warnings: List[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class SpectrumResult:
    """
    Smallest eigenvalues of a Hodge pencil.

    Attributes:
        p: Form degree
        eigenvalues: Ascending, in units of 1 / length^2
        kernel_dim: Count of eigenvalues below the kernel threshold
        tol: Residual tolerance every pair satisfies
        method: Dense or Iterative
        residual_norms: Relative residual per pair
        dim: Pencil dimension
        seed: Seed of the iterative start vector
        threads: Thread count recorded for reproducibility
        multiplicities: [value, count] clusters of the eigenvalues
        first_nonzero: Smallest eigenvalue above the numerical floor
        warnings: Messages raised along the way
    """

    p: int
    eigenvalues: List[float]
    kernel_dim: int
    tol: float
    method: SolverMethod
    residual_norms: List[float]
    dim: int
    seed: int
    threads: int
    multiplicities: List[List[float]]
    first_nonzero: Optional[float]
    warnings: List[str] = field(default_factory=list)

    def positive_eigenvalue(self, k: int) -> float:
        """k-th positive eigenvalue, k >= 1, counted with multiplicity."""
        index = self.kernel_dim + k - 1
        if not 1 <= k or index >= len(self.eigenvalues):
            raise DomainError(f"Invalid k: {k}. Only {len(self.eigenvalues)} eigenvalues computed.")
        return self.eigenvalues[index]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "eigenvalues": list(self.eigenvalues),
            "kernel_dim": self.kernel_dim,
            "tol": self.tol,
            "method": self.method.value,
            "residual_norms": list(self.residual_norms),
            "dim": self.dim,
            "seed": self.seed,
            "threads": self.threads,
            "multiplicities": [list(m) for m in self.multiplicities],
            "first_nonzero": self.first_nonzero,
            "warnings": list(self.warnings),
        }


@dataclass
class DirichletSubproblem:
    """
    Forms supported on a geodesic ball, vanishing on every simplex whose
    star leaves the ball's subcomplex.

    Attributes:
        parent: Parent mesh
        ball: The ball's induced subcomplex
        parent_operators: Operators of the parent mesh
        operators: Parent operators restricted to the subcomplex
        kept_simplices: Interior degrees of freedom per degree, as parent
            indices (for p = 2, faces whose merged group lies inside)
    """

    parent: SurfaceMesh
    ball: BallSubset
    parent_operators: DecOperators
    operators: DecOperators
    kept_simplices: Dict[int, np.ndarray]
    # (p, allow_indefinite, id(parent)) -> (parent, pencil); the parent is held so its id stays valid
    _pencils: Dict[Tuple[int, bool, Optional[int]], Tuple[Optional[HodgePencil], HodgePencil]] = field(
        default_factory=dict, repr=False
    )


def assemble(mesh: SurfaceMesh, settings: Optional[Settings] = None) -> DecOperators:
    """
    Assemble exterior derivatives and Hodge stars from edge lengths.

    Args:
        mesh: Closed oriented mesh
        settings: Tolerances (zero-weight snapping)

    Returns:
        DecOperators

    Raises:
        AssemblyError: If a triangle has (numerically) zero area

    Examples:
        >>> ops = assemble(build_flat_torus(4))
        >>> abs(ops.d1 @ ops.d0).sum()
        0.0
    """
    settings = resolve(settings)
    V, E, F = mesh.num_vertices, mesh.num_edges, mesh.num_triangles

    sides = mesh.triangle_side_lengths()
    areas = mesh.triangle_areas()
    degenerate = np.flatnonzero(areas <= _DEGENERATE_AREA_REL * sides.max(axis=1) ** 2)
    if len(degenerate):
        t = int(degenerate[0])
        raise AssemblyError(
            f"Degenerate triangle {t} {tuple(int(v) for v in mesh.triangles[t])}: area {areas[t]:.3e}",
            triangle=t,
        )

    rows = np.repeat(np.arange(E), 2)
    d0 = csr_matrix(
        (np.tile([-1.0, 1.0], E), (rows, mesh.edges.ravel())), shape=(E, V)
    )
    d1 = csr_matrix(
        (mesh.triangle_edge_signs.ravel().astype(float),
         (np.repeat(np.arange(F), 3), mesh.triangle_edges.ravel())),
        shape=(F, E),
    )

    star0 = np.bincount(mesh.triangles.ravel(), weights=np.repeat(areas / 3.0, 3), minlength=V)

    # cot of the angle opposite side i: (sum of the other squared sides - l_i^2) / (4 area)
    squared = sides ** 2
    cot = (squared.sum(axis=1, keepdims=True) - 2.0 * squared) / (4.0 * areas[:, None])
    star1 = np.bincount(mesh.triangle_edges.ravel(), weights=0.5 * cot.ravel(), minlength=E)
    star1[np.abs(star1) <= settings.zero_weight_rel * np.abs(star1).max()] = 0.0

    quality = float(np.mean(star1 < 0))
    logger.info(
        "Assembled DEC operators on %r: %d zero and %d negative cotan weights",
        mesh, int(np.sum(star1 == 0)), int(np.sum(star1 < 0)),
    )

    for array in (star0, star1, areas):
        array.setflags(write=False)
    return DecOperators(mesh, d0, d1, star0, star1, 1.0 / areas, areas, quality)


def _face_groups(ops: DecOperators) -> np.ndarray:
    """Group label per face; faces across a zero-weight edge share a label."""
    F = ops.mesh.num_triangles
    pairs = ops.mesh.edge_triangles[ops.zero_edges]
    adjacency = csr_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(F, F)
    )
    _, labels = connected_components(adjacency, directed=False)
    return labels


def _full_forms(ops: DecOperators, p: int):
    """Unreduced energy and mass on all p-simplices of the mesh."""
    w = ops.star1
    if p == 0:
        return (ops.d0.T @ diags(w) @ ops.d0).tocsr(), ops.star0
    if p == 1:
        exact = diags(w) @ ops.d0 @ diags(1.0 / ops.star0) @ ops.d0.T @ diags(w)
        coexact = ops.d1.T @ diags(ops.star2) @ ops.d1
        return (exact + coexact).tocsr(), w
    inverse_w = np.zeros_like(w)
    nonzero = w != 0.0
    inverse_w[nonzero] = 1.0 / w[nonzero]
    return (ops.d1 @ diags(inverse_w) @ ops.d1.T).tocsr(), ops.areas


def _expansion(ops: DecOperators, p: int, A_full: csr_matrix, dofs: np.ndarray) -> csr_matrix:
    """
    Reduced-to-full map on the simplices `dofs` (A_full indexed like dofs).

    p = 1 eliminates zero-weight edges by their energy-minimizing values;
    p = 2 gives one unknown per face group lying entirely within `dofs`.
    """
    n = len(dofs)
    if p == 0:
        return identity(n, format="csr")

    if p == 1:
        zero = ops.zero_edges[dofs]
        if not zero.any():
            return identity(n, format="csr")
        z, keep = np.flatnonzero(zero), np.flatnonzero(~zero)
        if len(keep) == 0:
            return csr_matrix((n, 0))
        A_zz = A_full[z][:, z].tocsc()
        A_zn = A_full[z][:, keep].tocsc()
        X = spsolve(A_zz, A_zn)
        if hasattr(X, "tocoo"):
            X = X.tocoo()
        else:
            X = csr_matrix(np.asarray(X).reshape(len(z), len(keep))).tocoo()
        if not np.all(np.isfinite(X.data)):
            raise MeshQualityError("Singular zero-weight edge block; cannot condense")
        rows = np.concatenate([keep, z[X.row]])
        cols = np.concatenate([np.arange(len(keep)), X.col])
        data = np.concatenate([np.ones(len(keep)), -X.data])
        return csr_matrix((data, (rows, cols)), shape=(n, len(keep)))

    labels = _face_groups(ops)
    inside = np.zeros(ops.mesh.num_triangles, dtype=bool)
    inside[dofs] = True
    # a group survives only if every one of its faces is inside
    outside_labels = np.unique(labels[~inside])
    local_labels = labels[dofs]
    surviving = ~np.isin(local_labels, outside_labels)
    groups, columns = np.unique(local_labels[surviving], return_inverse=True)
    rows = np.flatnonzero(surviving)
    return csr_matrix((np.ones(len(rows)), (rows, columns.reshape(-1))), shape=(n, len(groups)))


def _reduce(A_full: csr_matrix, B_full: np.ndarray, P: csr_matrix):
    A = (P.T @ A_full @ P).tocsr()
    A = (0.5 * (A + A.T)).tocsr()
    # P^T diag(B_full) P is diagonal: eliminated edges carry no mass
    B = np.asarray(P.multiply(P).T @ B_full).ravel()
    return A, B


def _check_weights(ops: DecOperators, p: int, allow_indefinite: bool) -> List[str]:
    negative = int(np.sum(ops.star1 < 0))
    if not negative:
        return []
    message = (
        f"{negative} negative cotan weight(s) (quality={ops.quality:.3g}) on {ops.mesh.descriptor}"
    )
    if p in (0, 1) and not allow_indefinite:
        raise MeshQualityError(f"{message}; p={p} energy is indefinite")
    logger.warning("%s; continuing with indefinite weights for p=%d", message, p)
    return [f"{message}; indefinite weights admitted for p={p}"]


def _check_degree(p: int) -> None:
    if p not in (0, 1, 2):
        raise DomainError(f"Invalid p: {p}. Must be 0, 1 or 2.")


def hodge_laplacian(
    ops: DecOperators, p: int, allow_indefinite: bool = False
) -> HodgePencil:
    """
    Pencil of the Hodge Laplacian on p-forms.

    p = 0: A = d0^T star1 d0, B = star0 (cotan Laplacian, dual areas).
    p = 1: A = star1 d0 star0^-1 d0^T star1 + d1^T star2 d1, B = star1.
    p = 2: A = d1 star1^-1 d1^T, B = areas, on face densities.

    Raises:
        DomainError: For p outside {0, 1, 2}
        MeshQualityError: On negative cotan weights for p in {0, 1}, unless
            allow_indefinite is set
    """
    _check_degree(p)
    warnings = _check_weights(ops, p, allow_indefinite)
    A_full, B_full = _full_forms(ops, p)
    dofs = np.arange(len(B_full))
    P = _expansion(ops, p, A_full, dofs)
    A, B = _reduce(A_full, B_full, P)
    return HodgePencil(
        p, A, B, A_full, B_full, P, dofs, len(B_full),
        indefinite=bool(np.any(B <= 0) or warnings), warnings=warnings,
    )


def _kernel_and_multiplicities(vals: np.ndarray, scale: float, settings: Settings):
    floor = settings.zero_floor_rel * scale
    nonzero = vals[vals > floor]
    first_nonzero = float(nonzero[0]) if len(nonzero) else None
    if first_nonzero is not None:
        kernel_dim = int(np.sum(vals < settings.kernel_rel * first_nonzero))
    else:
        kernel_dim = int(np.sum(vals <= floor))

    grouped = np.where(np.arange(len(vals)) < kernel_dim, 0.0, vals)
    clusters: List[List[float]] = []
    for value in grouped:
        if clusters and value - clusters[-1][0] <= settings.multiplicity_gap_rel * max(abs(value), floor):
            clusters[-1][1] += 1
        else:
            clusters.append([float(value), 1])
    return kernel_dim, first_nonzero, clusters


def _dense_indefinite(pencil: HodgePencil, num: int):
    A = pencil.A.toarray()
    vals, vecs = scipy.linalg.eig(A, np.diag(pencil.B))
    order = np.argsort(vals.real)[:num]
    vals, vecs = vals.real[order], vecs.real[:, order]
    scale = float(np.abs(A).sum(axis=1).max()) or 1.0
    residual = A @ vecs - (pencil.B[:, None] * vecs) * vals
    norms = np.linalg.norm(residual, axis=0) / (
        (scale + np.abs(vals) * np.abs(pencil.B).max()) * np.linalg.norm(vecs, axis=0)
    )
    return vals, norms, scale


def solve_spectrum(
    pencil: HodgePencil,
    num: int,
    tol: Optional[float] = None,
    settings: Optional[Settings] = None,
    seed: Optional[int] = None,
) -> SpectrumResult:
    """
    The `num` smallest generalized eigenvalues of a Hodge pencil.

    The pencil is symmetrized as C = B^-1/2 A B^-1/2. Dimensions up to the
    dense cap use a dense symmetric solver; larger ones use shift-invert
    Lanczos just below zero with a seeded start vector. Every returned pair
    satisfies ||C y - lambda y|| <= tol (||C|| + |lambda|).

    Args:
        pencil: From hodge_laplacian or a Dirichlet restriction
        num: Number of eigenvalues (1 <= num <= dim)
        tol: Residual tolerance (defaults to settings.residual_tol)
        settings: Tolerances and caps
        seed: Start-vector seed (defaults to settings.seed)

    Raises:
        DomainError: For num outside [1, dim]
        SolverError: On non-convergence, residuals above tol, or
            eigenvalues below -tol on a semidefinite pencil
    """
    settings = resolve(settings)
    tol = settings.residual_tol if tol is None else tol
    seed = settings.seed if seed is None else seed
    dim = pencil.dim
    if isinstance(num, bool) or not isinstance(num, (int, np.integer)) or not 1 <= num <= dim:
        raise DomainError(f"Invalid num: {num}. Must be an integer in [1, {dim}].")

    warnings = list(pencil.warnings)
    diagnostics = {"p": pencil.p, "dim": dim, "num": num, "seed": seed, "tol": tol}

    if pencil.indefinite and np.any(pencil.B <= 0):
        vals, residuals, scale = _dense_indefinite(pencil, num)
        method = SolverMethod.DENSE
    else:
        d = diags(1.0 / np.sqrt(pencil.B))
        C = (d @ pencil.A @ d).tocsr()
        C = (0.5 * (C + C.T)).tocsr()
        scale = float(abs(C).sum(axis=1).max()) or 1.0

        if dim <= settings.dense_max_dim or num >= dim - 1:
            method = SolverMethod.DENSE
            vals, vecs = scipy.linalg.eigh(C.toarray(), subset_by_index=[0, num - 1])
        else:
            method = SolverMethod.ITERATIVE
            v0 = np.random.default_rng(seed).standard_normal(dim)
            try:
                vals, vecs = eigsh(
                    C, k=num, sigma=-settings.shift_rel * scale, which="LM",
                    v0=v0, maxiter=settings.iterative_max_iter, tol=0,
                )
            except ArpackNoConvergence as err:
                diagnostics["converged"] = [float(v) for v in err.eigenvalues]
                raise SolverError(
                    f"Shift-invert Lanczos did not converge for p={pencil.p}, dim={dim}",
                    diagnostics,
                ) from err
            order = np.argsort(vals)
            vals, vecs = vals[order], vecs[:, order]

        residual = C @ vecs - vecs * vals
        residuals = np.linalg.norm(residual, axis=0) / (
            (scale + np.abs(vals)) * np.linalg.norm(vecs, axis=0)
        )

    diagnostics["method"] = method.value
    if np.any(residuals > tol):
        diagnostics["eigenvalues"] = [float(v) for v in vals]
        diagnostics["residual_norms"] = [float(r) for r in residuals]
        raise SolverError(
            f"Eigenpair residual {float(residuals.max()):.3e} exceeds tol {tol:.1e}", diagnostics
        )

    if not pencil.indefinite:
        if np.any(vals < -tol * max(1.0, scale)):
            diagnostics["eigenvalues"] = [float(v) for v in vals]
            raise SolverError(
                f"Eigenvalue {float(vals.min()):.3e} below -tol on a semidefinite pencil",
                diagnostics,
            )
        if np.any(vals < -settings.zero_floor_rel * scale):
            warnings.append(f"Clamped eigenvalue {float(vals.min()):.3e} to 0")
            logger.warning("Clamped eigenvalue %.3e to 0 (p=%d)", float(vals.min()), pencil.p)
        vals = np.maximum(vals, 0.0)

    kernel_dim, first_nonzero, clusters = _kernel_and_multiplicities(vals, scale, settings)
    logger.info(
        "Solved p=%d spectrum: dim=%d, num=%d, method=%s, kernel_dim=%d",
        pencil.p, dim, num, method.value, kernel_dim,
    )
    return SpectrumResult(
        p=pencil.p,
        eigenvalues=[float(v) for v in vals],
        kernel_dim=kernel_dim,
        tol=tol,
        method=method,
        residual_norms=[float(r) for r in residuals],
        dim=dim,
        seed=seed,
        threads=settings.threads,
        multiplicities=clusters,
        first_nonzero=first_nonzero,
        warnings=warnings,
    )


def dirichlet_subproblem(
    mesh: SurfaceMesh,
    ball: BallSubset,
    ops: Optional[DecOperators] = None,
    settings: Optional[Settings] = None,
) -> DirichletSubproblem:
    """
    Interior degrees of freedom of a ball subcomplex.

    A vertex is kept when every incident edge lies in the subcomplex, an
    edge when both of its triangles do, and a triangle when it lies in the
    subcomplex and its zero-weight merge group does too.

    Args:
        mesh: Parent mesh
        ball: Induced closed subcomplex from geodesic_ball
        ops: Parent operators (assembled if omitted)
        settings: Tolerances used for assembly

    Raises:
        DegenerateDomainError: If no simplex of any degree is kept
    """
    ops = assemble(mesh, settings) if ops is None else ops

    edge_in = np.zeros(mesh.num_edges, dtype=bool)
    edge_in[ball.edges] = True
    tri_in = np.zeros(mesh.num_triangles, dtype=bool)
    tri_in[ball.triangles] = True
    vertex_in = np.zeros(mesh.num_vertices, dtype=bool)
    vertex_in[ball.vertices] = True

    leaving = np.bincount(mesh.edges[~edge_in].ravel(), minlength=mesh.num_vertices)
    kept_vertices = np.flatnonzero(vertex_in & (leaving == 0))
    kept_edges = np.flatnonzero(edge_in & tri_in[mesh.edge_triangles].all(axis=1))

    labels = _face_groups(ops)
    outside_labels = np.unique(labels[~tri_in])
    kept_faces = np.flatnonzero(tri_in & ~np.isin(labels, outside_labels))

    if not (len(kept_vertices) or len(kept_edges) or len(kept_faces)):
        raise DegenerateDomainError(
            f"Ball of radius {ball.radius:.6g} at vertex {ball.center} has no interior simplices"
        )

    restricted = DecOperators(
        mesh,
        ops.d0[ball.edges][:, ball.vertices].tocsr(),
        ops.d1[ball.triangles][:, ball.edges].tocsr(),
        ops.star0[ball.vertices],
        ops.star1[ball.edges],
        ops.star2[ball.triangles],
        ops.areas[ball.triangles],
        float(np.mean(ops.star1[ball.edges] < 0)) if len(ball.edges) else 0.0,
    )
    logger.info(
        "Dirichlet subproblem at vertex %d (r=%.6g): kept %d/%d/%d simplices",
        ball.center, ball.radius, len(kept_vertices), len(kept_edges), len(kept_faces),
    )
    return DirichletSubproblem(
        mesh, ball, ops, restricted,
        {0: kept_vertices, 1: kept_edges, 2: kept_faces},
    )


def restricted_pencil(
    sub: DirichletSubproblem,
    p: int,
    parent_pencil: Optional[HodgePencil] = None,
    allow_indefinite: bool = False,
) -> HodgePencil:
    """
    Principal restriction of the parent's unreduced forms to the kept
    simplices, then condensed as in hodge_laplacian.

    Raises:
        DegenerateDomainError: If nothing is kept in degree p
    """
    _check_degree(p)
    key = (p, bool(allow_indefinite), None if parent_pencil is None else id(parent_pencil))
    if key in sub._pencils:
        return sub._pencils[key][1]

    dofs = sub.kept_simplices[p]
    if len(dofs) == 0:
        raise DegenerateDomainError(
            f"Ball at vertex {sub.ball.center} keeps no {p}-simplices"
        )
    given_parent = parent_pencil
    if parent_pencil is None:
        parent_pencil = hodge_laplacian(sub.parent_operators, p, allow_indefinite)

    A_full = parent_pencil.A_full[dofs][:, dofs].tocsr()
    B_full = parent_pencil.B_full[dofs]
    P = _expansion(sub.parent_operators, p, A_full, dofs)
    if P.shape[1] == 0:
        raise DegenerateDomainError(
            f"Ball at vertex {sub.ball.center} keeps no {p}-form unknowns"
        )
    A, B = _reduce(A_full, B_full, P)
    pencil = HodgePencil(
        p, A, B, A_full, B_full, P, dofs, parent_pencil.num_parent,
        indefinite=parent_pencil.indefinite, warnings=list(parent_pencil.warnings),
    )
    sub._pencils[key] = (given_parent, pencil)
    return pencil


def dirichlet_spectrum(
    sub: DirichletSubproblem,
    p: int,
    num: int,
    settings: Optional[Settings] = None,
    parent_pencil: Optional[HodgePencil] = None,
) -> SpectrumResult:
    """Smallest `num` Dirichlet eigenvalues of p-forms on the ball."""
    pencil = restricted_pencil(sub, p, parent_pencil)
    return solve_spectrum(pencil, num, settings=settings)


def zero_extension(pencil: HodgePencil, x: np.ndarray) -> np.ndarray:
    """
    Extend reduced unknowns to a vector on all parent p-simplices, zero
    outside the pencil's simplices.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (pencil.dim,):
        raise DomainError(f"Invalid vector shape: {x.shape}. Must be ({pencil.dim},).")
    out = np.zeros(pencil.num_parent)
    out[pencil.dofs] = pencil.expansion @ x
    return out


def quadratic_energy(pencil: HodgePencil, x: np.ndarray) -> float:
    """Unreduced energy x^T A_full x of a parent-length vector."""
    local = np.asarray(x, dtype=float)[pencil.dofs]
    return float(local @ (pencil.A_full @ local))


def mass(pencil: HodgePencil, x: np.ndarray) -> float:
    """Unreduced mass x^T B_full x of a parent-length vector."""
    local = np.asarray(x, dtype=float)[pencil.dofs]
    return float(local @ (pencil.B_full * local))
