"""Discrete Toda-type solutions, labelings on the double, and the X_t family.

A solution q on a realized cell decomposition induces a labeling alpha on
the double mesh (unique up to a constant) and through it a one-parameter
deformation of the cross ratios of any triangulation.  Real solutions give
angle-preserving deformations at real t and shear-matched pairs at +-it,
feeding the CMC-1 and equidistant constructions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .cmc1 import HorosphericalNet, build_cmc1
from .equidistant import EquidistantNet, build_equidistant
from .errors import (
    InconsistentLabeling,
    NotDelaunayAtT,
    PoleInFamily,
    TooSmall,
)
from .mesh import TriangulatedDisk, _canon, build_disk
from .pattern import CirclePattern, CrossRatioSystem, cross_ratios_of, develop


class CellDecomposition:
    """Oriented polygonal cell decomposition of a disk (faces counterclockwise)."""

    def __init__(self, faces, positions):
        self.faces = tuple(tuple(int(v) for v in f) for f in faces)
        self.positions = tuple(complex(p) for p in positions)
        self.n_vertices = len(self.positions)
        self._directed_face = {}
        for fi, f in enumerate(self.faces):
            k = len(f)
            for m in range(k):
                u, v = f[m], f[(m + 1) % k]
                if (u, v) in self._directed_face:
                    raise TooSmall(f"directed edge {u}->{v} repeated")
                self._directed_face[(u, v)] = fi
        edge_count = {}
        for (u, v) in self._directed_face:
            edge_count[_canon(u, v)] = edge_count.get(_canon(u, v), 0) + 1
        self.edges = tuple(sorted(edge_count))
        self.interior_edges = tuple(e for e in self.edges if edge_count[e] == 2)
        # vertex rings via link arcs (successor-of-v -> predecessor-of-v)
        succ = [dict() for _ in range(self.n_vertices)]
        pred = [dict() for _ in range(self.n_vertices)]
        for f in self.faces:
            k = len(f)
            for m in range(k):
                v = f[m]
                s = f[(m + 1) % k]
                p = f[(m - 1) % k]
                succ[v][s] = p
                pred[v][p] = s
        self._interior = []
        self._ring = []
        for v in range(self.n_vertices):
            nbrs = set(succ[v]) | set(pred[v])
            starts = [a for a in nbrs if a not in pred[v]]
            interior = not starts
            start = min(nbrs) if interior else starts[0]
            ring = [start]
            cur = start
            while cur in succ[v]:
                cur = succ[v][cur]
                if cur == start:
                    break
                ring.append(cur)
            self._interior.append(interior and len(ring) == len(nbrs))
            self._ring.append(tuple(ring))
        self.interior_vertices = tuple(
            v for v in range(self.n_vertices) if self._interior[v]
        )

    def is_interior_vertex(self, v):
        return self._interior[v]

    def ring(self, v):
        return self._ring[v]

    def left_face(self, i, j):
        return self._directed_face.get((i, j))

    def right_face(self, i, j):
        return self._directed_face.get((j, i))


def square_grid(n: int, m: int, stretch: complex = 1.0) -> CellDecomposition:
    """n x m vertex grid of unit squares; ``stretch`` scales the x direction."""
    if n < 2 or m < 2:
        raise TooSmall("grid needs at least 2 x 2 vertices")
    positions = [a * stretch + 1j * b for b in range(m) for a in range(n)]

    def vid(a, b):
        return b * n + a

    faces = []
    for b in range(m - 1):
        for a in range(n - 1):
            faces.append((vid(a, b), vid(a + 1, b), vid(a + 1, b + 1), vid(a, b + 1)))
    return CellDecomposition(faces, positions)


@dataclass
class TodaSolution:
    cell: CellDecomposition
    q: dict  # canonical edge -> complex

    def q_of(self, i, j):
        return self.q[_canon(i, j)]


@dataclass(frozen=True)
class TodaReport:
    vertex_sum: float
    face_sum: float
    weighted_sum: float

    def ok(self, tol=1e-10):
        return max(self.vertex_sum, self.face_sum, self.weighted_sum) <= tol


def square_grid_toda(n: int, m: int, stretch: complex = 1.0):
    """Square grid with the standard solution q = +1 horizontal, -1 vertical."""
    cell = square_grid(n, m, stretch)
    q = {}
    for (i, j) in cell.edges:
        horizontal = abs(cell.positions[i].imag - cell.positions[j].imag) < 1e-12
        q[(i, j)] = 1.0 + 0j if horizontal else -1.0 + 0j
    return cell, cell.positions, TodaSolution(cell, q)


def verify_toda(cell: CellDecomposition, z, q) -> TodaReport:
    """Residuals of the vertex sum, face sum, and weighted vertex sum.

    Vertex equations are imposed at interior vertices only (bounded
    decompositions); the face sum applies to every face.
    """
    if isinstance(q, TodaSolution):
        q = q.q
    z = [complex(p) for p in z]
    vs = 0.0
    ws = 0.0
    for v in cell.interior_vertices:
        total = sum(q[_canon(v, w)] for w in cell.ring(v))
        weighted = sum(q[_canon(v, w)] / (z[w] - z[v]) for w in cell.ring(v))
        vs = max(vs, abs(total))
        ws = max(ws, abs(weighted))
    fs = 0.0
    for f in cell.faces:
        total = sum(q[_canon(f[m], f[(m + 1) % len(f)])] for m in range(len(f)))
        fs = max(fs, abs(total))
    return TodaReport(vs, fs, ws)


@dataclass
class Labeling:
    """Edge function on the double mesh, keyed by incidences (vertex, face)."""

    cell: CellDecomposition
    alpha: dict  # (vertex, face index) -> complex

    def plus(self, i, j):
        """alpha_{ij+}: incidence of i with the face left of i -> j."""
        return self.alpha[(i, self.cell.left_face(i, j))]

    def minus(self, i, j):
        return self.alpha[(i, self.cell.right_face(i, j))]

    def max_abs(self):
        return max((abs(v) for v in self.alpha.values()), default=0.0)


def labeling_from(cell: CellDecomposition, q, tol: float = 1e-10) -> Labeling:
    """Labeling alpha with q_ij = alpha_{ij+} - alpha_{ij-}, zero at the root.

    Propagates the quadrilateral constraints of the double mesh (opposite
    edges equal, differences across a primal edge equal q) breadth-first;
    a closed loop disagreeing by more than ``tol`` raises
    InconsistentLabeling.  Only quads over interior primal edges constrain
    alpha; untouched boundary incidences default to zero.
    """
    if isinstance(q, TodaSolution):
        q = q.q
    # constraint edges between incidence nodes: (node_a, node_b, offset)
    constraints = {}

    def add(a, b, off):
        constraints.setdefault(a, []).append((b, off))
        constraints.setdefault(b, []).append((a, -off))

    for (i, j) in cell.interior_edges:
        fl = cell.left_face(i, j)
        fr = cell.right_face(i, j)
        add((i, fl), (j, fr), 0.0)  # opposite quad edges carry equal alpha
        add((i, fr), (j, fl), 0.0)
        add((i, fl), (i, fr), q[(i, j)])  # q = alpha_plus - alpha_minus
        add((j, fr), (j, fl), q[(i, j)])  # seen from j the faces swap sides
    alpha = {}
    nodes = sorted(constraints)
    for root in nodes:
        if root in alpha:
            continue
        alpha[root] = 0.0 + 0j
        queue = [root]
        while queue:
            a = queue.pop(0)
            for (b, off) in constraints[a]:
                val = alpha[a] - off  # off = alpha[a] - alpha[b]
                if b in alpha:
                    if abs(alpha[b] - val) > tol:
                        raise InconsistentLabeling(
                            f"labeling loop mismatch {abs(alpha[b] - val):.2e} at {b}"
                        )
                else:
                    alpha[b] = val
                    queue.append(b)
    # boundary incidences not adjacent to any interior edge
    for fi, f in enumerate(cell.faces):
        for v in f:
            alpha.setdefault((v, fi), 0.0 + 0j)
    return Labeling(cell, alpha)


@dataclass
class TriangulatedCell:
    """Triangulation of a cell decomposition with its realization."""

    cell: CellDecomposition
    disk: TriangulatedDisk
    positions: tuple
    diagonal_edges: frozenset  # canonical pairs in E(TM) - E(M)


def triangulate(cell: CellDecomposition, rule: str = "lex") -> TriangulatedCell:
    """Split every non-triangular face by a diagonal.

    ``lex`` picks the diagonal with the lexicographically smaller sorted
    pair, ``anti`` the other one; quadrilaterals only.
    """
    faces = []
    diagonals = set()
    for f in cell.faces:
        if len(f) == 3:
            faces.append(f)
            continue
        if len(f) != 4:
            raise TooSmall("only quad faces are triangulated")
        a, b, c, d = f
        d1, d2 = _canon(a, c), _canon(b, d)
        pick_first = d1 < d2
        if rule == "anti":
            pick_first = not pick_first
        if pick_first:
            faces.append((a, b, c))
            faces.append((a, c, d))
            diagonals.add(d1)
        else:
            faces.append((a, b, d))
            faces.append((b, c, d))
            diagonals.add(d2)
    disk = build_disk(faces)
    return TriangulatedCell(cell, disk, cell.positions, frozenset(diagonals))


def family_xt(
    tri: TriangulatedCell,
    labeling: Labeling,
    t: complex,
    pole_margin: float = 0.9,
) -> CrossRatioSystem:
    """Cross ratios X_t: scaled by (1 - t a_-)/(1 - t a_+) on primal edges."""
    if abs(t) * labeling.max_abs() >= pole_margin:
        raise PoleInFamily(
            f"|t| max|alpha| = {abs(t) * labeling.max_abs():.3f} >= {pole_margin}"
        )
    base = cross_ratios_of(CirclePattern(tri.disk, tri.positions))
    values = {}
    for e in tri.disk.interior_edges:
        x = base.values[e]
        if e in tri.diagonal_edges:
            values[e] = x
        else:
            i, j = e
            num = 1.0 - t * labeling.minus(i, j)
            den = 1.0 - t * labeling.plus(i, j)
            values[e] = (num / den) * x
    return CrossRatioSystem(tri.disk, values)


def develop_family(tri: TriangulatedCell, x: CrossRatioSystem) -> CirclePattern:
    """Develop X_t from the base realization of the seed face."""
    seed = [tri.positions[v] for v in tri.disk.face_vertices(0)]
    return develop(tri.disk, x, seed)


def cmc1_from_toda(
    cell: CellDecomposition,
    labeling_or_q,
    t: float,
    rule: str = "lex",
) -> HorosphericalNet:
    """Discrete CMC-1 net of the pair (z_{it}, z_{-it}) for real t > 0."""
    labeling = _as_labeling(cell, labeling_or_q)
    if max(abs(v.imag) for v in labeling.alpha.values()) > 1e-12:
        raise InconsistentLabeling("CMC-1 production needs a real labeling")
    tri = triangulate(cell, rule)
    x_plus = family_xt(tri, labeling, 1j * t)
    x_minus = family_xt(tri, labeling, -1j * t)
    for x in (x_plus, x_minus):
        bad = x.delaunay_violations()
        if bad:
            raise NotDelaunayAtT(f"family leaves the Delaunay cone at edges {bad[:4]}")
    z_plus = develop_family(tri, x_plus)
    z_minus = develop_family(tri, x_minus)
    return build_cmc1(z_plus, z_minus)


def equidistant_from_toda(
    cell: CellDecomposition,
    labeling_or_q,
    t: float,
    rule: str = "lex",
) -> EquidistantNet:
    """Equidistant net of the angle-preserving pair (z, z_t) for real t."""
    labeling = _as_labeling(cell, labeling_or_q)
    if max(abs(v.imag) for v in labeling.alpha.values()) > 1e-12:
        raise InconsistentLabeling("equidistant production needs a real labeling")
    tri = triangulate(cell, rule)
    x_t = family_xt(tri, labeling, t)
    bad = x_t.delaunay_violations()
    if bad:
        raise NotDelaunayAtT(f"family leaves the Delaunay cone at edges {bad[:4]}")
    base = CirclePattern(tri.disk, tri.positions)
    z_t = develop_family(tri, x_t)
    return build_equidistant(base, z_t)


def _as_labeling(cell, labeling_or_q) -> Labeling:
    if isinstance(labeling_or_q, Labeling):
        return labeling_or_q
    return labeling_from(cell, labeling_or_q)


def tangent_check(
    cell: CellDecomposition,
    q,
    rule: str = "lex",
    steps=(1e-3, 5e-4),
) -> float:
    """Residual of d/dt log X_t |_{t=0} against q (zero on diagonals)."""
    labeling = _as_labeling(cell, q)
    if isinstance(q, TodaSolution):
        q = q.q
    tri = triangulate(cell, rule)
    derivs = []
    for h in steps:
        xp = family_xt(tri, labeling, h)
        xm = family_xt(tri, labeling, -h)
        derivs.append(
            {
                e: (cmath.log(xp.values[e]) - cmath.log(xm.values[e])) / (2 * h)
                for e in tri.disk.interior_edges
            }
        )
    # Richardson on the central differences (error O(h^2))
    r = (steps[0] / steps[1]) ** 2
    worst = 0.0
    for e in tri.disk.interior_edges:
        d = (r * derivs[1][e] - derivs[0][e]) / (r - 1.0)
        expect = 0.0 if e in tri.diagonal_edges else q[e]
        worst = max(worst, abs(d - expect))
    return worst
