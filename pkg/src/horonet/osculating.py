"""Osculating Moebius transformations between circle patterns.

A frame assigns to each face the Moebius map carrying that face's vertices
of one pattern to the other.  Across an interior edge i -> j the transition
A_right^{-1} A_left fixes z_i and z_j with eigenvalues lambda, 1/lambda and
lambda^2 = X / X~.  A coherent lift chooses the SL(2,C) signs so that
Arg lambda lies in (-pi/2, pi/2] on every edge.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import (
    BoundaryEdge,
    CriticalPoint,
    DegenerateFace,
    MeshMismatch,
    MonodromyObstruction,
    NotDelaunay,
)
from .mesh import TriangulatedDisk, _canon
from .moebius import MoebiusMap, SpherePoint, det2, mobius_from_triples
from .pattern import CirclePattern, CrossRatioSystem, cross_ratios_of

TOL_TRANSITION = 1e-10
TOL_MONODROMY = 1e-9


@dataclass
class MoebiusFrame:
    """Per-face Moebius maps from ``source`` to ``target``."""

    source: CirclePattern
    target: CirclePattern
    maps: tuple  # MoebiusMap per face
    lift: str = "projective"  # or "coherent"
    lambdas: dict = field(default_factory=dict, repr=False)

    @property
    def disk(self) -> TriangulatedDisk:
        return self.source.disk

    def map_of(self, face: int) -> MoebiusMap:
        return self.maps[face]

    def inverse(self) -> "MoebiusFrame":
        """Frame from target to source (per-face inverse)."""
        inv = MoebiusFrame(
            self.target,
            self.source,
            tuple(m.inverse() for m in self.maps),
            lift=self.lift,
        )
        if self.lambdas:
            inv.lambdas = dict(self.lambdas)
        return inv


def osculating_frame(source: CirclePattern, target: CirclePattern) -> MoebiusFrame:
    """Per-face three-point Moebius maps z_i, z_j, z_k -> z~_i, z~_j, z~_k."""
    if source.disk is not target.disk and source.disk.faces != target.disk.faces:
        raise MeshMismatch("patterns live on different disks")
    maps = []
    for (i, j, k) in source.disk.faces:
        try:
            m = mobius_from_triples(
                source.z[i], source.z[j], source.z[k],
                target.z[i], target.z[j], target.z[k],
            )
        except Exception as exc:
            raise DegenerateFace(f"face ({i},{j},{k}): {exc}") from exc
        maps.append(m)
    return MoebiusFrame(source, target, tuple(maps))


def _rayleigh(t: MoebiusMap, z: SpherePoint) -> complex:
    """Eigenvalue of t at the known eigenvector z (inner-product quotient)."""
    up = t.a * z.p + t.b * z.q
    uq = t.c * z.p + t.d * z.q
    den = abs(z.p) ** 2 + abs(z.q) ** 2
    return (up * z.p.conjugate() + uq * z.q.conjugate()) / den


def transition_closed_form(
    z_i: SpherePoint, z_j: SpherePoint, lam: complex
) -> MoebiusMap:
    """Matrix with eigenvectors z_i, z_j and eigenvalues lam, 1/lam."""
    d = det2(z_i, z_j)
    # P diag(lam, 1/lam) adj(P) / det(P) with P = [z_i z_j]
    a = (lam * z_i.p * z_j.q - z_j.p * z_i.q / lam) / d
    b = (z_j.p * z_i.p / lam - lam * z_i.p * z_j.p) / d
    c = (lam * z_i.q * z_j.q - z_j.q * z_i.q / lam) / d
    dd = (z_j.q * z_i.p / lam - lam * z_i.q * z_j.p) / d
    return MoebiusMap(a, b, c, dd)


def transition(frame: MoebiusFrame, i: int, j: int, check: bool = True):
    """Transition A_right^{-1} A_left across the oriented edge i -> j.

    Returns (matrix, lambda) with lambda the eigenvalue at the tail z_i.
    The matrix quotient is cross-checked against the closed form built
    from lambda and the endpoints.
    """
    disk = frame.disk
    if not disk.is_interior_edge(i, j):
        raise BoundaryEdge(f"edge ({i},{j}) is not interior")
    fl = disk.left_face(i, j)
    fr = disk.right_face(i, j)
    t = frame.maps[fr].inverse().compose(frame.maps[fl])
    lam = _rayleigh(t, frame.source.z[i])
    if check:
        ref = transition_closed_form(frame.source.z[i], frame.source.z[j], lam)
        if t.frobenius_distance(ref) > TOL_TRANSITION * max(
            1.0, abs(lam), 1.0 / abs(lam)
        ) * 10:
            raise DegenerateFace(
                f"transition on edge ({i},{j}) fails the eigen closed form"
            )
    return t, lam


def principal_sqrt_ratio(x: complex, y: complex) -> complex:
    """Square root of x / y with argument in (-pi/2, pi/2]."""
    return cmath.exp(0.5 * (cmath.log(x) - cmath.log(y)))


def coherent_lift(
    frame: MoebiusFrame,
    x: CrossRatioSystem | None = None,
    x_target: CrossRatioSystem | None = None,
    tol: float = TOL_MONODROMY,
) -> MoebiusFrame:
    """Fix per-face signs so Arg lambda lies in (-pi/2, pi/2] on every edge.

    Requires both patterns Delaunay (the paper's existence condition); a
    residual branch mismatch on a non-tree dual edge means the vertex
    monodromy is -I and raises MonodromyObstruction.
    """
    disk = frame.disk
    if x is None:
        x = cross_ratios_of(frame.source)
    if x_target is None:
        x_target = cross_ratios_of(frame.target)
    if not x.is_delaunay():
        raise NotDelaunay(f"source pattern: edges {x.delaunay_violations()[:4]}")
    if not x_target.is_delaunay():
        raise NotDelaunay(f"target pattern: edges {x_target.delaunay_violations()[:4]}")

    target_lam = {
        e: principal_sqrt_ratio(x.values[e], x_target.values[e])
        for e in disk.interior_edges
    }

    signs = [0] * disk.n_faces
    root = 0
    signs[root] = 1
    maps = list(frame.maps)
    # root sign: (2,2) entry argument in (-pi/2, pi/2]
    m = maps[root]
    anchor = m.d if abs(m.d) > 1e-14 else next(
        e for e in m.entries() if abs(e) > 1e-14
    )
    phi = cmath.phase(anchor)
    if phi <= -math.pi / 2 or phi > math.pi / 2:
        maps[root] = m.negate()

    queue = [root]
    order = []
    while queue:
        f = queue.pop(0)
        order.append(f)
        for (g, (i, j)) in disk.dual_adjacency[f]:
            if signs[g]:
                continue
            signs[g] = 1
            t = maps[disk.right_face(i, j)].inverse().compose(
                maps[disk.left_face(i, j)]
            )
            lam = _rayleigh(t, frame.source.z[i])
            lam_star = target_lam[_canon(i, j)] if i < j else target_lam[_canon(i, j)]
            if abs(lam - lam_star) > abs(lam + lam_star):
                maps[g] = maps[g].negate()
            queue.append(g)

    # verify every interior edge carries the canonical branch
    lambdas = {}
    worst = 0.0
    for (i, j) in disk.interior_edges:
        t = maps[disk.right_face(i, j)].inverse().compose(maps[disk.left_face(i, j)])
        lam = _rayleigh(t, frame.source.z[i])
        lam_star = target_lam[(i, j)]
        if abs(lam - lam_star) > abs(lam + lam_star):
            raise MonodromyObstruction(
                f"sign propagation is inconsistent across edge ({i},{j}); "
                "vertex monodromy is -I"
            )
        worst = max(worst, abs(lam - lam_star))
        lambdas[(i, j)] = lam
    lifted = MoebiusFrame(
        frame.source, frame.target, tuple(maps), lift="coherent", lambdas=lambdas
    )
    return lifted


def vertex_monodromy(frame: MoebiusFrame, v: int) -> MoebiusMap:
    """Product of the closed-form transitions around an interior vertex.

    For a coherent lift this is +I up to roundoff; the closed forms are
    built from the cached branch of lambda, so a -I product detects a
    genuine obstruction rather than telescoping away.
    """
    disk = frame.disk
    ring = disk.ring_ccw(v)
    n = len(ring)
    prod = MoebiusMap.identity()
    for m in range(n):
        w = ring[(m + 1) % n]
        # crossing from face (v, ring[m], w) to face (v, w, ring[m+2]):
        # right-to-left of the oriented edge v -> w
        e = _canon(v, w)
        lam = frame.lambdas.get(e)
        if lam is None:
            _, lam = transition(frame, v, w, check=False)
        t = transition_closed_form(frame.source.z[v], frame.source.z[w], lam)
        prod = t.inverse().compose(prod)
    return prod


def compose_frames(f1: MoebiusFrame, f2: MoebiusFrame) -> MoebiusFrame:
    """Frame of the composed correspondence; f1: z -> z~, f2: z~ -> z+."""
    if f1.disk.faces != f2.disk.faces:
        raise MeshMismatch("frames live on different disks")
    worst = max(
        a.chordal(b) for a, b in zip(f1.target.z, f2.source.z)
    )
    if worst > 1e-9:
        raise MeshMismatch(
            f"intermediate patterns disagree by {worst:.2e}"
        )
    maps = tuple(m2.compose(m1) for m1, m2 in zip(f1.maps, f2.maps))
    return MoebiusFrame(f1.source, f2.target, maps)


class SqrtBranch:
    """Continuation state for h'(z)^{3/2} along a caller-supplied path.

    The branch is tracked relative to the principal value; it flips
    whenever the continuous path of h'(z)^3 crosses the negative real
    axis.  Callers step through nearby points (a polyline from the base
    point); each step picks the candidate closest to the previous value.
    """

    def __init__(self):
        self.prev: complex | None = None

    def resolve(self, w_cubed: complex) -> complex:
        """Square root of w_cubed continued from the previous call."""
        principal = cmath.sqrt(w_cubed)
        if self.prev is None:
            self.prev = principal
            return principal
        if abs(principal - self.prev) <= abs(principal + self.prev):
            self.prev = principal
        else:
            self.prev = -principal
        return self.prev


def smooth_osculating(h, h1, h2, z: complex, branch: SqrtBranch | None = None) -> MoebiusMap:
    """Moebius map matching the 2-jet of h at z (value, h', h'').

    ``branch`` threads the square root of h'(z)^3 between successive calls;
    omitted, the principal branch is used pointwise.
    """
    hv, d1, d2 = h(z), h1(z), h2(z)
    if d1 == 0:
        raise CriticalPoint(f"h'({z}) = 0")
    denom = (branch or SqrtBranch()).resolve(d1 * d1 * d1)
    a = d1 * d1 - hv * d2 / 2.0
    b = z * hv * d2 / 2.0 + hv * d1 - z * d1 * d1
    c = -d2 / 2.0
    d = z * d2 / 2.0 + d1
    return MoebiusMap(a / denom, b / denom, c / denom, d / denom)


def smooth_pair_frame(
    jet_g,
    jet_gt,
    z: complex,
    branch_g: SqrtBranch | None = None,
    branch_gt: SqrtBranch | None = None,
) -> MoebiusMap:
    """Osculating map A_g~ A_g^{-1} of a pair of locally univalent jets."""
    ag = smooth_osculating(jet_g.f, jet_g.d1, jet_g.d2, z, branch_g)
    agt = smooth_osculating(jet_gt.f, jet_gt.d1, jet_gt.d2, z, branch_gt)
    return agt.compose(ag.inverse())
