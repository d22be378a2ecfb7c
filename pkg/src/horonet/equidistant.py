"""Equidistant nets from angle-preserving circle pattern pairs.

When the two patterns share intersection angles (Im log X = Im log X~), the
transition eigenvalues are real and positive, and each net vertex together
with its neighbors lies on an equidistant surface whose ideal boundary is
the circumcircle of the three tangency points of its face.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EtaNotClosed,
    LiftFailed,
    MonodromyObstruction,
    NotAngleMatched,
    NotEquidistant,
)
from .mesh import TriangulatedDisk, _canon
from .moebius import (
    HermitianPoint,
    MoebiusMap,
    SpherePoint,
    act_on_hermitian,
    horosphere,
    mobius_from_triples,
    to_upper_half_space,
)
from .osculating import (
    MoebiusFrame,
    coherent_lift,
    osculating_frame,
    transition_closed_form,
)
from .pattern import CirclePattern, cross_ratios_of, angle_match

TOL_ANGLE = 1e-9
TOL_COSPHERICAL = 1e-8


@dataclass
class EquidistantNet:
    """Realization f = A A* with per-face fitted umbilic functionals."""

    disk: TriangulatedDisk
    f: tuple  # HermitianPoint per face
    gauss: tuple  # SpherePoint per vertex
    frame: MoebiusFrame | None = None
    functionals: dict = field(default_factory=dict, repr=False)  # face -> (P, c)
    lambdas: dict = field(default_factory=dict, repr=False)  # edge -> complex
    degenerate: bool = False


@dataclass(frozen=True)
class EquidistantReport:
    eigenvalue_residual: float  # max |Im lambda| over interior edges
    cosphericity_residual: float

    def ok(self, tol: float = TOL_COSPHERICAL) -> bool:
        return max(self.eigenvalue_residual, self.cosphericity_residual) <= tol


def _ideal_functional(points):
    """Spacelike Hermitian P with <L, P> = 0 for the given light-cone points.

    The null space of the three Minkowski pairings; P spans the 1-dim
    orthogonal complement of the ideal circle through the tangencies.
    """
    rows = []
    for u in points:
        x0, x1, x2, x3 = u.minkowski()
        rows.append([-x0, x1, x2, x3])
    _, s, vt = np.linalg.svd(np.array(rows))
    p = vt[-1]
    u = HermitianPoint.from_minkowski(*p)
    # normalize to unit spacelike Minkowski norm when possible
    n2 = -u.det()
    if n2 > 1e-20:
        u = u.scale(1.0 / math.sqrt(n2))
    return u


def _fit_functionals(net: EquidistantNet):
    """Per face: (P, c) with <f, P> = c on the face point and its neighbors."""
    from .moebius import inner

    disk = net.disk
    for fidx, (i, j, k) in enumerate(disk.faces):
        tang = [horosphere(net.gauss[v], 1.0).u for v in (i, j, k)]
        p = _ideal_functional(tang)
        c = inner(net.f[fidx], p)
        net.functionals[fidx] = (p, c)


def build_equidistant(
    source: CirclePattern,
    target: CirclePattern,
    angle_tol: float = TOL_ANGLE,
) -> EquidistantNet:
    """Equidistant net of an angle-matched Delaunay pair; target is the Gauss map."""
    x = cross_ratios_of(source)
    xt = cross_ratios_of(target)
    mismatch = angle_match(x, xt)
    if mismatch > angle_tol:
        raise NotAngleMatched(
            f"intersection-angle mismatch {mismatch:.3e} exceeds {angle_tol:.1e}"
        )
    try:
        frame = coherent_lift(osculating_frame(source, target), x, xt)
    except MonodromyObstruction as exc:
        raise LiftFailed(str(exc)) from exc
    f = tuple(act_on_hermitian(m, HermitianPoint.identity()) for m in frame.maps)
    net = EquidistantNet(
        disk=source.disk,
        f=f,
        gauss=tuple(target.z),
        frame=frame,
        lambdas=dict(frame.lambdas),
    )
    net.degenerate = all(abs(l - 1.0) < 1e-12 for l in net.lambdas.values())
    _fit_functionals(net)
    return net


def verify_equidistant(net: EquidistantNet) -> EquidistantReport:
    """Reality of the transition eigenvalues and co-sphericity of vertex stars."""
    from .moebius import inner

    eig = 0.0
    for e, lam in net.lambdas.items():
        eig = max(eig, abs(lam.imag) / abs(lam))
    cos = 0.0
    disk = net.disk
    for fidx in range(disk.n_faces):
        p, c = net.functionals[fidx]
        scale = max(1.0, abs(c))
        for (g, _) in disk.dual_adjacency[fidx]:
            cos = max(cos, abs(inner(net.f[g], p) - c) / scale)
    return EquidistantReport(eig, cos)


def _geometric_lambda(net: EquidistantNet, i: int, j: int):
    """Scaling factor of the transition across edge {ij}, read from geometry.

    Normalizing z~_i -> 0 and z~_j -> infinity, the transition becomes
    w -> w / lambda^2 on upper-half-space coordinates; both face points
    must sit on the same ray (the circular arc through the tangencies).
    Returns (lambda, collinearity residual).
    """
    disk = net.disk
    fl = disk.left_face(i, j)
    fr = disk.right_face(i, j)
    # third anchor point: apex of the left face
    k = disk.apex(i, j)
    m = mobius_from_triples(
        net.gauss[i], net.gauss[j], net.gauss[k], 0.0, "inf", 1.0
    )
    xl = act_on_hermitian(m, net.f[fl])
    xr = act_on_hermitian(m, net.f[fr])
    wl, tl = to_upper_half_space(xl)
    wr, tr = to_upper_half_space(xr)
    nl = math.sqrt(abs(wl) ** 2 + tl * tl)
    nr = math.sqrt(abs(wr) ** 2 + tr * tr)
    lam2 = nr / nl  # the transition acts as w -> lambda^2 w in this chart
    dir_l = (wl / nl, tl / nl)
    dir_r = (wr / nr, tr / nr)
    coll = math.hypot(abs(dir_l[0] - dir_r[0]), dir_l[1] - dir_r[1])
    return math.sqrt(lam2), coll


def extract_equidistant_patterns(net: EquidistantNet, tol: float = 1e-8):
    """Recover (z, z~, frame) from an equidistant net by eta integration."""
    report = verify_equidistant(net) if net.lambdas else None
    disk = net.disk
    gauss_pattern = CirclePattern(disk, net.gauss)
    if net.degenerate:
        raise NotEquidistant("degenerate net carries no pattern pair")
    lam = {}
    for (i, j) in disk.interior_edges:
        val, coll = _geometric_lambda(net, i, j)
        if coll > 1e-6:
            raise NotEquidistant(
                f"face points across edge ({i},{j}) are not on a common ray "
                f"through the tangencies (residual {coll:.2e})"
            )
        lam[(i, j)] = val

    etas = {
        (i, j): transition_closed_form(net.gauss[j], net.gauss[i], lam[(i, j)])
        for (i, j) in disk.interior_edges
    }

    def eta_for(i, j):
        if i < j:
            return etas[(i, j)]
        return etas[(j, i)].inverse()

    worst = 0.0
    for v in disk.interior_vertices:
        ring = disk.ring_ccw(v)
        prod = MoebiusMap.identity()
        for m in range(len(ring)):
            w = ring[(m + 1) % len(ring)]
            prod = eta_for(v, w).inverse().compose(prod)
        worst = max(worst, prod.frobenius_distance(MoebiusMap.identity()))
    if worst > tol:
        raise EtaNotClosed(f"per-vertex eta product deviates from I by {worst:.2e}")

    b_maps: list = [None] * disk.n_faces
    b_maps[0] = MoebiusMap.identity()
    queue = [0]
    while queue:
        fidx = queue.pop(0)
        for (g, (i, j)) in disk.dual_adjacency[fidx]:
            if b_maps[g] is not None:
                continue
            b_maps[g] = eta_for(i, j).compose(b_maps[fidx])
            queue.append(g)
    f0 = net.f[0]
    s = math.sqrt(max(f0.det(), 0.0))
    denom = math.sqrt(f0.trace() + 2.0 * s)
    c = MoebiusMap(
        (f0.a + s) / denom, f0.b / denom, f0.b.conjugate() / denom, (f0.d + s) / denom
    )
    a_maps = tuple(b.compose(c) for b in b_maps)
    residual = 0.0
    for fidx in range(disk.n_faces):
        rebuilt = act_on_hermitian(a_maps[fidx], HermitianPoint.identity())
        fref = net.f[fidx]
        scale = max(fref.a, fref.d, 1.0)
        residual = max(
            residual,
            max(
                abs(rebuilt.a - fref.a),
                abs(rebuilt.b - fref.b),
                abs(rebuilt.d - fref.d),
            )
            / scale,
        )
    if residual > 100 * tol:
        raise EtaNotClosed(f"integrated frame fails A A* = f by {residual:.2e}")
    z = []
    for v in range(disk.n_vertices):
        fidx = disk.vertex_faces_ccw(v)[0]
        z.append(a_maps[fidx].inverse().apply(net.gauss[v]))
    source = CirclePattern(disk, z)
    frame = MoebiusFrame(source, gauss_pattern, a_maps, lift="coherent")
    return source, gauss_pattern, frame
