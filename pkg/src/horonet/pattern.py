"""Circle patterns, cross ratio systems, closure verification, and developing."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import ClosureViolation, DegenerateFace, DegenerateSeed
from .mesh import TriangulatedDisk, _canon, interior_star
from .moebius import SpherePoint, det2, edge_cross_ratio

TOL_CLOSURE_INPUT = 1e-8
TOL_ROUNDTRIP = 1e-9
TOL_TREE = 1e-6
# edges with Arg X within this of the cocircular bound count as Delaunay;
# developing accumulates O(1e-11) argument noise on exactly cocircular edges
TOL_DELAUNAY = 1e-9


class CirclePattern:
    """Realization of a triangulated disk in the Riemann sphere."""

    def __init__(self, disk: TriangulatedDisk, z):
        if len(z) != disk.n_vertices:
            raise DegenerateFace(
                f"expected {disk.n_vertices} positions, got {len(z)}"
            )
        self.disk = disk
        self.z = tuple(SpherePoint.of(v) for v in z)
        for (i, j, k) in disk.faces:
            if (
                self.z[i].chordal(self.z[j]) < 1e-14
                or self.z[j].chordal(self.z[k]) < 1e-14
                or self.z[k].chordal(self.z[i]) < 1e-14
            ):
                raise DegenerateFace(f"face ({i},{j},{k}) has coincident vertices")

    def moebius_image(self, m) -> "CirclePattern":
        return CirclePattern(self.disk, [m.apply(p) for p in self.z])

    def __repr__(self):
        return f"CirclePattern({self.disk!r})"


@dataclass
class CrossRatioSystem:
    """Nonzero complex number per interior edge, keyed by (min, max) pairs."""

    disk: TriangulatedDisk
    values: dict  # (i, j) canonical -> complex
    args: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        missing = [e for e in self.disk.interior_edges if e not in self.values]
        if missing:
            raise DegenerateFace(f"missing cross ratios on edges {missing[:4]}")
        if not self.args:
            self.args = {e: cmath.phase(x) for e, x in self.values.items()}

    def x(self, i: int, j: int) -> complex:
        return self.values[_canon(i, j)]

    def arg(self, i: int, j: int) -> float:
        return self.args[_canon(i, j)]

    def is_delaunay(self, tol: float = TOL_DELAUNAY) -> bool:
        return not self.delaunay_violations(tol)

    def delaunay_violations(self, tol: float = TOL_DELAUNAY):
        """Edges whose Arg X falls outside [0, pi)."""
        bad = []
        for e, a in self.args.items():
            if a < -tol or a >= math.pi - tol:
                bad.append(e)
        return bad


def cross_ratios_of(pattern: CirclePattern) -> CrossRatioSystem:
    """Cross ratio per interior edge, apexes taken from the left/right faces."""
    disk = pattern.disk
    z = pattern.z
    values = {}
    for (i, j) in disk.interior_edges:
        k = disk.apex(i, j)
        l = disk.apex(j, i)
        values[(i, j)] = edge_cross_ratio(z[k], z[i], z[l], z[j])
    return CrossRatioSystem(disk, values)


@dataclass(frozen=True)
class ClosureReport:
    product_residual: float
    sum_residual: float
    branching_residual: float
    delaunay_violations: tuple

    def ok(self, tol: float = 1e-10) -> bool:
        return (
            self.product_residual <= tol
            and self.sum_residual <= tol
            and self.branching_residual <= tol
        )


def verify_closure(x: CrossRatioSystem) -> ClosureReport:
    """Residuals of the vertex product, telescoping sum, and branching sums.

    Neighbors enter the telescoping sum in clockwise order, matching the
    orientation for which the sum vanishes on realized patterns.
    """
    disk = x.disk
    prod_res = 0.0
    sum_res = 0.0
    branch_res = 0.0
    for v in disk.interior_vertices:
        ring = interior_star(disk, v)
        prod = 1.0 + 0.0j
        tele = 0.0 + 0.0j
        argsum = 0.0
        for w in ring:
            prod *= x.x(v, w)
            tele += prod
            argsum += x.arg(v, w)
        prod_res = max(prod_res, abs(prod - 1.0))
        sum_res = max(sum_res, abs(tele))
        branch_res = max(branch_res, abs(argsum - 2.0 * math.pi))
    return ClosureReport(
        prod_res, sum_res, branch_res, tuple(x.delaunay_violations())
    )


def _propagate(z_i: SpherePoint, z_j: SpherePoint, z_k: SpherePoint, x: complex):
    """Apex of the right face of i -> j from the left apex k and X_{ij}.

    Solves X = -[(zi-zk)(zj-zl)] / [(zi-zl)(zj-zk)] for z_l homogeneously:
    z_l = X det(j,k) * z_i + det(i,k) * z_j  (as homogeneous pairs).
    """
    u = x * det2(z_j, z_k)
    v = det2(z_i, z_k)
    return SpherePoint.from_homogeneous(
        u * z_i.p + v * z_j.p, u * z_i.q + v * z_j.q
    )


def develop(
    disk: TriangulatedDisk,
    x: CrossRatioSystem,
    seed,
    seed_face: int = 0,
    closure_tol: float = TOL_CLOSURE_INPUT,
    tree_tol: float = TOL_TREE,
) -> CirclePattern:
    """Integrate a closed cross ratio system to a realization.

    ``seed`` supplies the three vertex positions of ``seed_face`` in face
    order.  Breadth-first propagation across dual edges; positions reached
    along different dual paths must agree (tree independence), otherwise
    ClosureViolation is raised.
    """
    report = verify_closure(x)
    if max(report.product_residual, report.sum_residual) > closure_tol:
        raise ClosureViolation(
            f"closure residuals {report.product_residual:.2e}, "
            f"{report.sum_residual:.2e} exceed {closure_tol:.1e}"
        )
    seed_pts = [SpherePoint.of(p) for p in seed]
    if len(seed_pts) != 3:
        raise DegenerateSeed("seed must provide three points")
    if (
        seed_pts[0].chordal(seed_pts[1]) < 1e-12
        or seed_pts[1].chordal(seed_pts[2]) < 1e-12
        or seed_pts[2].chordal(seed_pts[0]) < 1e-12
    ):
        raise DegenerateSeed("seed points are not pairwise distinct")

    z: list = [None] * disk.n_vertices
    fv = disk.face_vertices(seed_face)
    for v, p in zip(fv, seed_pts):
        z[v] = p
    placed_faces = [False] * disk.n_faces
    placed_faces[seed_face] = True
    queue = [seed_face]
    max_mismatch = 0.0
    while queue:
        f = queue.pop(0)
        i0, j0, k0 = disk.face_vertices(f)
        for (i, j) in ((i0, j0), (j0, k0), (k0, i0)):
            if not disk.is_interior_edge(i, j):
                continue
            g = disk.right_face(i, j)
            l = disk.apex(j, i)
            z_l = _propagate(z[i], z[j], z[disk.apex(i, j)], x.x(i, j))
            if z[l] is None:
                z[l] = z_l
            else:
                max_mismatch = max(max_mismatch, z[l].chordal(z_l))
            if not placed_faces[g]:
                placed_faces[g] = True
                queue.append(g)
    if max_mismatch > tree_tol:
        raise ClosureViolation(
            f"tree-independence residual {max_mismatch:.2e} exceeds {tree_tol:.1e}"
        )
    return CirclePattern(disk, z)


def _check_same_disk(x: CrossRatioSystem, y: CrossRatioSystem):
    if x.disk is not y.disk and x.disk.faces != y.disk.faces:
        raise DegenerateFace("cross ratio systems live on different disks")


def shear_match(x: CrossRatioSystem, y: CrossRatioSystem) -> float:
    """sup |Re log X - Re log X~| over interior edges."""
    _check_same_disk(x, y)
    return max(
        abs(math.log(abs(x.values[e])) - math.log(abs(y.values[e])))
        for e in x.disk.interior_edges
    )


def angle_match(x: CrossRatioSystem, y: CrossRatioSystem) -> float:
    """sup |Arg X - Arg X~| over interior edges."""
    _check_same_disk(x, y)
    return max(abs(x.args[e] - y.args[e]) for e in x.disk.interior_edges)
