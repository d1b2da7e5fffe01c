"""
Surface Mesh Module

Oriented triangulated closed surfaces and their metric geometry:
- SurfaceMesh: validated combinatorics, intrinsic edge lengths, cached
  single-source graph distances
- build_flat_torus / build_icosphere: the two verification surfaces
- load_off / write_off: ASCII OFF ingestion with orientation repair
- graph_distances / estimate_diameter / shortest_path: edge-graph geodesics
- build_eps_net / geodesic_ball / packing_centers: discretizations and
  metric balls

Geodesic distance is approximated by shortest paths along edges, which
overestimates true distances; diameter estimates are biased upward.
"""

import logging
import math
import threading
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from src.config import Settings, resolve
from src.errors import DomainError, MeshValidationError, ParseError

logger = logging.getLogger(__name__)


class SurfaceMesh:
    """
    Closed, consistently oriented triangle mesh.

    Edges are stored as sorted vertex pairs in lexicographic order and
    oriented from the smaller to the larger index. Lengths are intrinsic:
    geometry (areas, angles) is derived from edge lengths alone, so the flat
    torus needs no embedding.

    Attributes:
        vertices: (V, 3) positions
        triangles: (F, 3) vertex indices, consistently oriented
        edges: (E, 2) sorted vertex pairs
        edge_lengths: (E,) lengths
        triangle_edges: (F, 3) edge index of local edge (t[i], t[i+1])
        triangle_edge_signs: (F, 3) +1 where the local edge agrees with the
            edge orientation, -1 otherwise
        edge_triangles: (E, 2) the two triangles containing each edge
        kind: "flat_torus", "icosphere" or "off"
        descriptor: Short text identifying the source (e.g. "torus:32")
    """

    def __init__(
        self,
        vertices: np.ndarray,
        triangles: np.ndarray,
        kind: str = "off",
        descriptor: str = "",
        edge_length_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        self.vertices = np.array(vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.array(triangles, dtype=np.int64).reshape(-1, 3)
        self.kind = kind
        self.descriptor = descriptor

        V = len(self.vertices)
        if len(self.triangles) == 0:
            raise MeshValidationError("Mesh has no triangles")
        if self.triangles.min() < 0 or self.triangles.max() >= V:
            raise MeshValidationError("Triangle refers to a missing vertex")

        directed = np.stack(
            [self.triangles, np.roll(self.triangles, -1, axis=1)], axis=2
        ).reshape(-1, 2)
        if np.any(directed[:, 0] == directed[:, 1]):
            raise MeshValidationError("Triangle with repeated vertex")
        undirected = np.sort(directed, axis=1)
        edges, inverse, counts = np.unique(
            undirected, axis=0, return_inverse=True, return_counts=True
        )
        inverse = inverse.reshape(-1)

        bad = np.flatnonzero(counts != 2)
        if len(bad):
            raise MeshValidationError(
                "Boundary or non-manifold edges",
                [tuple(int(v) for v in edges[e]) for e in bad],
            )

        signs = np.where(directed[:, 0] < directed[:, 1], 1, -1)
        sign_sum = np.bincount(inverse, weights=signs, minlength=len(edges))
        inconsistent = np.flatnonzero(sign_sum != 0)
        if len(inconsistent):
            raise MeshValidationError(
                "Inconsistent orientation on edges",
                [tuple(int(v) for v in edges[e]) for e in inconsistent],
            )

        F = len(self.triangles)
        self.edges = edges.astype(np.int64)
        self.triangle_edges = inverse.reshape(F, 3)
        self.triangle_edge_signs = signs.reshape(F, 3).astype(np.int64)

        order = np.argsort(inverse, kind="stable")
        self.edge_triangles = (order // 3).reshape(-1, 2)

        if edge_length_fn is None:
            diff = self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]
            self.edge_lengths = np.linalg.norm(diff, axis=1)
        else:
            self.edge_lengths = np.asarray(edge_length_fn(self.edges), dtype=float)

        for array in (self.vertices, self.triangles, self.edges, self.edge_lengths,
                      self.triangle_edges, self.triangle_edge_signs, self.edge_triangles):
            array.setflags(write=False)

        self._graph: Optional[csr_matrix] = None
        self._distance_cache: Dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_triangles

    def betti_numbers(self) -> Tuple[int, int, int]:
        """(b0, b1, b2) of a connected closed orientable surface."""
        return 1, 2 - self.euler_characteristic, 1

    def triangle_side_lengths(self) -> np.ndarray:
        """(F, 3) length of local edge i, i.e. of (t[i], t[i+1])."""
        return self.edge_lengths[self.triangle_edges]

    def triangle_areas(self) -> np.ndarray:
        """Triangle areas from side lengths (numerically stable Heron)."""
        sides = np.sort(self.triangle_side_lengths(), axis=1)[:, ::-1]
        a, b, c = sides[:, 0], sides[:, 1], sides[:, 2]
        product = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
        return 0.25 * np.sqrt(np.clip(product, 0.0, None))

    def total_area(self) -> float:
        return float(self.triangle_areas().sum())

    def graph(self) -> csr_matrix:
        """Symmetric weighted adjacency of the edge graph."""
        with self._lock:
            if self._graph is None:
                V = self.num_vertices
                rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
                cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
                weights = np.concatenate([self.edge_lengths, self.edge_lengths])
                self._graph = csr_matrix((weights, (rows, cols)), shape=(V, V))
            return self._graph

    def distances_from(self, source: int) -> np.ndarray:
        """Single-source graph distances, cached read-only per source."""
        with self._lock:
            cached = self._distance_cache.get(source)
        if cached is not None:
            return cached

        dist = dijkstra(self.graph(), directed=False, indices=source)
        dist.setflags(write=False)
        with self._lock:
            return self._distance_cache.setdefault(source, dist)

    def __repr__(self) -> str:
        return (
            f"SurfaceMesh({self.descriptor or self.kind}: V={self.num_vertices}, "
            f"E={self.num_edges}, F={self.num_triangles})"
        )


@dataclass(frozen=True)
class EpsNet:
    """
    An eps-discretization: 2 eps separated centers whose 2 eps balls cover.
    """

    centers: List[int]
    eps: float
    separation_ok: bool
    covering_ok: bool

    @property
    def size(self) -> int:
        return len(self.centers)

    def to_dict(self) -> Dict[str, object]:
        return {
            "centers": list(self.centers),
            "eps": self.eps,
            "size": self.size,
            "separation_ok": self.separation_ok,
            "covering_ok": self.covering_ok,
        }


@dataclass(frozen=True)
class BallSubset:
    """
    Vertices within distance r of a center and the induced closed subcomplex.

    Attributes:
        vertices / edges / triangles: sorted index arrays into the parent mesh
    """

    center: int
    radius: float
    open_ball: bool
    vertices: np.ndarray
    edges: np.ndarray
    triangles: np.ndarray


@dataclass(frozen=True)
class PackingResult:
    """Centers along a diameter path whose open balls of `radius` are disjoint."""

    centers: List[int]
    arc_positions: List[float]
    radius: float
    diameter: float


def _check_vertex(mesh: SurfaceMesh, index: int) -> None:
    if isinstance(index, bool) or not isinstance(index, (int, np.integer)) \
            or not 0 <= index < mesh.num_vertices:
        raise DomainError(
            f"Invalid vertex index: {index}. Must be in [0, {mesh.num_vertices})."
        )


def build_flat_torus(m: int) -> SurfaceMesh:
    """
    Flat torus R^2 / (2 pi Z)^2 on an m x m grid, each square split along
    its (1, 1) diagonal.

    Positions are fundamental-domain coordinates with z = 0; edge lengths
    use periodic offsets, so V = m^2, E = 3 m^2, F = 2 m^2 and the total
    area is exactly 4 pi^2.

    Raises:
        DomainError: For m < 3
    """
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 3:
        raise DomainError(f"Invalid torus resolution m: {m}. Must be an integer >= 3.")
    m = int(m)
    h = 2.0 * math.pi / m

    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    i, j = i.ravel(), j.ravel()
    vertices = np.column_stack([i * h, j * h, np.zeros(m * m)])

    def index(a, b):
        return (a % m) * m + (b % m)

    v00, v10 = index(i, j), index(i + 1, j)
    v01, v11 = index(i, j + 1), index(i + 1, j + 1)
    triangles = np.concatenate(
        [np.column_stack([v00, v10, v11]), np.column_stack([v00, v11, v01])]
    )

    def periodic_lengths(edges: np.ndarray) -> np.ndarray:
        ia, ja = np.divmod(edges[:, 0], m)
        ib, jb = np.divmod(edges[:, 1], m)
        di = (ib - ia + 1) % m - 1
        dj = (jb - ja + 1) % m - 1
        return h * np.sqrt(di * di + dj * dj)

    mesh = SurfaceMesh(vertices, triangles, "flat_torus", f"torus:{m}", periodic_lengths)
    logger.info("Built %r", mesh)
    return mesh


_ICOSAHEDRON_FACES = [
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
]


def build_icosphere(s: int) -> SurfaceMesh:
    """
    Icosahedron subdivided s times by edge midpoints, projected to the unit
    sphere. V = 10 * 4^s + 2, F = 20 * 4^s.

    Raises:
        DomainError: Outside 0 <= s <= 7
    """
    if isinstance(s, bool) or not isinstance(s, (int, np.integer)) or not 0 <= s <= 7:
        raise DomainError(f"Invalid subdivision level s: {s}. Must be an integer in [0, 7].")

    t = (1.0 + math.sqrt(5.0)) / 2.0
    vertices = np.array([
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ], dtype=float)
    vertices /= np.linalg.norm(vertices, axis=1, keepdims=True)
    triangles = np.array(_ICOSAHEDRON_FACES, dtype=np.int64)

    for _ in range(int(s)):
        F = len(triangles)
        sides = np.stack(
            [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]], axis=1
        ).reshape(-1, 2)
        unique, inverse = np.unique(np.sort(sides, axis=1), axis=0, return_inverse=True)
        midpoints = vertices[unique[:, 0]] + vertices[unique[:, 1]]
        midpoints /= np.linalg.norm(midpoints, axis=1, keepdims=True)
        mid = len(vertices) + inverse.reshape(F, 3)
        vertices = np.vstack([vertices, midpoints])

        a, b, c = triangles.T
        ab, bc, ca = mid.T
        triangles = np.concatenate([
            np.column_stack([a, ab, ca]),
            np.column_stack([b, bc, ab]),
            np.column_stack([c, ca, bc]),
            np.column_stack([ab, bc, ca]),
        ])

    mesh = SurfaceMesh(vertices, triangles, "icosphere", f"icosphere:{int(s)}")
    logger.info("Built %r", mesh)
    return mesh


def _orient_triangles(triangles: np.ndarray) -> np.ndarray:
    """
    Flip triangles so shared edges have opposite orientations, propagating
    breadth-first from the first triangle of each component.

    Raises:
        MeshValidationError: If the surface is not orientable
    """
    tris = [list(t) for t in triangles]
    edge_map: Dict[Tuple[int, int], List[int]] = {}
    for idx, tri in enumerate(tris):
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            edge_map.setdefault((min(a, b), max(a, b)), []).append(idx)

    def has_directed(tri, a, b):
        return any(tri[i] == a and tri[(i + 1) % 3] == b for i in range(3))

    visited = [False] * len(tris)
    flipped = 0
    for start in range(len(tris)):
        if visited[start]:
            continue
        visited[start] = True
        queue = deque([start])
        while queue:
            current = queue.popleft()
            tri = tris[current]
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                for other in edge_map[(min(a, b), max(a, b))]:
                    if other == current:
                        continue
                    same_direction = has_directed(tris[other], a, b)
                    if not visited[other]:
                        if same_direction:
                            tris[other] = [tris[other][0], tris[other][2], tris[other][1]]
                            flipped += 1
                        visited[other] = True
                        queue.append(other)
                    elif same_direction:
                        raise MeshValidationError(
                            "Non-orientable surface", [(min(a, b), max(a, b))]
                        )

    if flipped:
        logger.info("Orientation repaired: %d triangle(s) flipped", flipped)
    return np.array(tris, dtype=np.int64)


def _check_manifold_edges(triangles: np.ndarray) -> None:
    sides = np.sort(
        np.stack([triangles, np.roll(triangles, -1, axis=1)], axis=2).reshape(-1, 2), axis=1
    )
    edges, counts = np.unique(sides, axis=0, return_counts=True)
    bad = np.flatnonzero(counts != 2)
    if len(bad):
        raise MeshValidationError(
            "Boundary or non-manifold edges", [tuple(int(v) for v in edges[e]) for e in bad]
        )


def load_off(path: str) -> SurfaceMesh:
    """
    Read an ASCII OFF triangle mesh.

    Comments (after '#') and blank lines are skipped. Orientation is repaired
    by breadth-first propagation when the surface is orientable.

    Raises:
        FileNotFoundError: If the file doesn't exist
        ParseError: On malformed content, with the offending line number
        MeshValidationError: On boundary, non-manifold or non-orientable input
    """
    off_file = Path(path)
    if not off_file.exists():
        raise FileNotFoundError(f"OFF file not found: {path}")

    with open(off_file, "r") as f:
        lines = [
            (number, line.split("#", 1)[0].split())
            for number, line in enumerate(f, start=1)
        ]
    lines = [(number, tokens) for number, tokens in lines if tokens]
    cursor = iter(lines)

    def next_line(what: str):
        try:
            return next(cursor)
        except StopIteration:
            raise ParseError(f"unexpected end of file while reading {what}") from None

    number, tokens = next_line("header")
    if tokens[0] != "OFF":
        raise ParseError(f"expected header 'OFF', found '{tokens[0]}'", number)
    counts = tokens[1:]
    if not counts:
        number, counts = next_line("counts")
    try:
        num_vertices, num_faces = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise ParseError("counts line must read 'V F E'", number) from None
    if num_vertices < 0 or num_faces < 0:
        raise ParseError("negative vertex or face count", number)

    vertices = np.empty((num_vertices, 3))
    for v in range(num_vertices):
        number, tokens = next_line(f"vertex {v}")
        if len(tokens) < 3:
            raise ParseError(f"vertex line needs 3 coordinates, found {len(tokens)}", number)
        try:
            vertices[v] = [float(x) for x in tokens[:3]]
        except ValueError:
            raise ParseError("vertex coordinates must be real numbers", number) from None

    triangles = np.empty((num_faces, 3), dtype=np.int64)
    for t in range(num_faces):
        number, tokens = next_line(f"face {t}")
        try:
            indices = [int(x) for x in tokens]
        except ValueError:
            raise ParseError("face indices must be integers", number) from None
        if indices[0] != 3:
            raise ParseError("non-triangular face", number)
        if len(indices) < 4:
            raise ParseError("face line needs 3 vertex indices", number)
        if min(indices[1:4]) < 0 or max(indices[1:4]) >= num_vertices:
            raise ParseError("face refers to a missing vertex", number)
        triangles[t] = indices[1:4]

    _check_manifold_edges(triangles)
    triangles = _orient_triangles(triangles)
    mesh = SurfaceMesh(vertices, triangles, "off", f"off:{off_file.name}")
    logger.info("Loaded %r from %s", mesh, path)
    return mesh


def write_off(mesh: SurfaceMesh, path: str) -> None:
    """Write `mesh` as ASCII OFF with 17 significant digits."""
    with open(path, "w") as f:
        f.write("OFF\n")
        f.write(f"{mesh.num_vertices} {mesh.num_triangles} {mesh.num_edges}\n")
        for x, y, z in mesh.vertices:
            f.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
        for a, b, c in mesh.triangles:
            f.write(f"3 {a} {b} {c}\n")


def graph_distances(mesh: SurfaceMesh, source: int) -> np.ndarray:
    """
    Shortest-path distances from `source` along the weighted edge graph.

    Returns:
        (V,) array of distances (a copy; the mesh keeps its cached version)
    """
    _check_vertex(mesh, source)
    return mesh.distances_from(int(source)).copy()


def shortest_path(mesh: SurfaceMesh, a: int, b: int) -> List[int]:
    """Vertices of a shortest edge path from a to b, by predecessor tracing."""
    _check_vertex(mesh, a)
    _check_vertex(mesh, b)
    _, predecessors = dijkstra(
        mesh.graph(), directed=False, indices=int(a), return_predecessors=True
    )
    path = [int(b)]
    while path[-1] != a:
        previous = predecessors[path[-1]]
        if previous < 0:
            raise DomainError(f"Vertices {a} and {b} are not connected")
        path.append(int(previous))
    return path[::-1]


def diameter_endpoints(
    mesh: SurfaceMesh, settings: Optional[Settings] = None
) -> Tuple[int, int, float, bool]:
    """
    Pair of vertices realizing the diameter estimate.

    Exact all-pairs maximum up to the configured vertex cap; beyond it a
    double sweep (farthest from vertex 0, then farthest from that), which
    only bounds the graph diameter from below.

    Returns:
        (a, b, distance, exact)
    """
    settings = resolve(settings)
    V = mesh.num_vertices

    if V <= settings.exact_diameter_max_vertices:
        best = (0, 0, 0.0)
        chunk = 256
        for start in range(0, V, chunk):
            rows = np.arange(start, min(start + chunk, V))
            dist = dijkstra(mesh.graph(), directed=False, indices=rows)
            flat = int(np.argmax(dist))
            r, c = divmod(flat, V)
            if dist[r, c] > best[2]:
                best = (int(rows[r]), int(c), float(dist[r, c]))
        return best[0], best[1], best[2], True

    a = int(np.argmax(mesh.distances_from(0)))
    dist_a = mesh.distances_from(a)
    b = int(np.argmax(dist_a))
    logger.info("Diameter of %r by double sweep (lower bound only)", mesh)
    return a, b, float(dist_a[b]), False


def estimate_diameter(mesh: SurfaceMesh, settings: Optional[Settings] = None) -> float:
    """
    Graph diameter of the mesh: exact for small meshes, a double-sweep
    lower bound for large ones (see diameter_endpoints).
    """
    return diameter_endpoints(mesh, settings)[2]


def build_eps_net(mesh: SurfaceMesh, eps: float) -> EpsNet:
    """
    Greedy farthest-point eps-discretization.

    Starting from vertex 0, repeatedly add the vertex farthest from the
    current centers while that distance is at least 2 eps. The result is a
    maximal 2 eps separated set, hence 2 eps covering; both clauses are
    re-verified exhaustively before returning.

    Args:
        mesh: Surface mesh
        eps: Discretization scale (eps > 0)

    Returns:
        EpsNet with both verification flags
    """
    if not math.isfinite(eps) or eps <= 0:
        raise DomainError(f"Invalid eps: {eps}. Must be finite and positive.")

    separation = 2.0 * eps
    centers = [0]
    nearest = mesh.distances_from(0).copy()
    while True:
        far = int(np.argmax(nearest))
        if nearest[far] < separation:
            break
        centers.append(far)
        np.minimum(nearest, mesh.distances_from(far), out=nearest)

    # Exhaustive post hoc check of both clauses
    rows = np.array([mesh.distances_from(c) for c in centers])
    pairwise = rows[:, centers]
    off_diagonal = pairwise[~np.eye(len(centers), dtype=bool)]
    separation_ok = bool(np.all(off_diagonal >= separation))
    covering_ok = bool(np.all(rows.min(axis=0) <= separation))

    logger.info("eps-net on %r: eps=%.6g, |X|=%d", mesh, eps, len(centers))
    return EpsNet(centers, float(eps), separation_ok, covering_ok)


def geodesic_ball(
    mesh: SurfaceMesh, center: int, r: float, open_ball: bool = False
) -> BallSubset:
    """
    Vertices within graph distance r of `center` (strictly, for open balls)
    and the induced closed subcomplex: every edge and triangle whose
    vertices all lie in the set.
    """
    _check_vertex(mesh, center)
    if not r > 0:
        raise DomainError(f"Invalid radius r: {r}. Must be positive.")

    dist = mesh.distances_from(int(center))
    inside = dist < r if open_ball else dist <= r
    edges = np.flatnonzero(inside[mesh.edges].all(axis=1))
    triangles = np.flatnonzero(inside[mesh.triangles].all(axis=1))
    return BallSubset(int(center), float(r), open_ball, np.flatnonzero(inside), edges, triangles)


def packing_centers(mesh: SurfaceMesh, k: int, settings: Optional[Settings] = None) -> PackingResult:
    """
    k+1 vertices along a diameter-realizing shortest path, nearest to arc
    positions i D / k, with the radius at which their open balls are
    pairwise disjoint.

    Along a shortest path the distance between two path vertices equals
    their arc difference, so open balls of half the smallest gap between
    consecutive centers cannot meet.

    Raises:
        DomainError: If the path has too few vertices for k+1 distinct centers
    """
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise DomainError(f"Invalid k: {k}. Must be an integer >= 1.")

    a, b, diameter, _ = diameter_endpoints(mesh, settings)
    path = shortest_path(mesh, a, b)
    arcs = mesh.distances_from(a)[path]

    chosen = []
    for i in range(k + 1):
        target = i * diameter / k
        chosen.append(int(np.argmin(np.abs(arcs - target))))
    if len(set(chosen)) != len(chosen):
        raise DomainError(
            f"Invalid k: {k}. The diameter path has only {len(path)} vertices."
        )

    positions = [float(arcs[c]) for c in chosen]
    radius = 0.5 * min(q - p for p, q in zip(positions, positions[1:]))
    return PackingResult([path[c] for c in chosen], positions, radius, diameter)
