"""Horospherical nets and discrete CMC-1 surfaces in hyperbolic 3-space.

The construction side maps a Delaunay, shear-matched pattern pair to the
net f = A A* of its coherent osculating frame, with one horosphere per
primal vertex.  The measurement side is purely geometric: each primal
vertex chart sends its horosphere to the plane x3 = 1 of the upper half
space (tangency to infinity); neighboring horospheres become spheres
tangent to the ground plane, edges become circular arcs on the unit
plane, and face areas are Euclidean areas of circular-arc polygons.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateFace,
    EtaNotClosed,
    FrameUnavailable,
    LiftFailed,
    MonodromyObstruction,
    NonIntersectingHorospheres,
    NotCMC1,
    NotShearMatched,
    OffsetTooLarge,
    UnmeasuredNet,
    ZeroArea,
)
from .mesh import TriangulatedDisk, _canon
from .moebius import (
    HermitianPoint,
    Horosphere,
    MoebiusMap,
    SpherePoint,
    act_on_hermitian,
    horosphere,
    inner,
)
from .osculating import (
    MoebiusFrame,
    coherent_lift,
    osculating_frame,
    transition_closed_form,
)
from .pattern import CirclePattern, cross_ratios_of, shear_match

TOL_SHEAR = 1e-9
TOL_NET = 1e-9
TOL_DEGENERATE = 1e-12
TOL_INVERSE = 1e-8


@dataclass
class EdgeMeasure:
    theta: float = 0.0
    ell: float = 0.0
    alpha: float = 0.0
    r_tilde: float = math.inf  # arc radius measured from the face points
    radius_residual: float = 0.0  # |point radius - horosphere radius|
    degenerate: bool = False  # coincident endpoints (zero-length edge)
    flat: bool = False  # neighboring horospheres coincide


@dataclass
class HorosphericalNet:
    """Realization of the dual graph with one horosphere per primal vertex."""

    disk: TriangulatedDisk
    f: tuple  # HermitianPoint per face
    horospheres: tuple  # Horosphere per primal vertex
    gauss: tuple  # SpherePoint per primal vertex
    frame: MoebiusFrame | None = None
    edge_measure: dict = field(default_factory=dict, repr=False)
    area: dict = field(default_factory=dict, repr=False)
    mean_curvature: dict = field(default_factory=dict, repr=False)
    ratio: dict = field(default_factory=dict, repr=False)
    incidence_residual: float = 0.0
    chart_residual: float = 0.0
    degenerate: bool = False
    measured: bool = False

    def measure_of(self, i: int, j: int) -> EdgeMeasure:
        return self.edge_measure[_canon(i, j)]

    def require_measured(self):
        if not self.measured:
            raise UnmeasuredNet("net has not been measured yet")


def _chart_map(net: HorosphericalNet, v: int) -> MoebiusMap:
    """SL(2,C) map sending gauss[v] to infinity and H~_v to the plane x3 = 1.

    The chart is recentered at one incident face point (a horizontal
    translation fixes infinity and the plane); without it, differences of
    chart positions far from the origin lose relative precision.
    """
    zp = net.gauss[v]
    n = math.hypot(abs(zp.p), abs(zp.q))
    m0 = MoebiusMap(
        zp.p.conjugate() / n, zp.q.conjugate() / n, -zp.q / n, zp.p / n
    )
    u0 = act_on_hermitian(m0, net.horospheres[v].u)
    # u0 should be c * [[1, 0], [0, 0]]
    c = u0.a
    if not c > 0:
        raise NonIntersectingHorospheres(
            f"horosphere at vertex {v} does not match its tangency point"
        )
    s = math.sqrt(2.0 / c)  # diag(s, 1/s) rescales the a-entry by s^2
    m = MoebiusMap(s, 0j, 0j, 1.0 / s).compose(m0)
    anchor = act_on_hermitian(m, net.f[net.disk.vertex_faces_ccw(v)[0]])
    if anchor.d > 0:
        w0 = anchor.b / anchor.d
        m = MoebiusMap(1.0 + 0j, -w0, 0j, 1.0 + 0j).compose(m)
    return m


@dataclass
class _Chart:
    vertex: int
    map: MoebiusMap
    w_face: dict  # incident face -> complex chart position (on x3 = 1)
    plane_residual: float


def _chart(net: HorosphericalNet, v: int) -> _Chart:
    m = _chart_map(net, v)
    w_face = {}
    residual = 0.0
    for fidx in net.disk.vertex_faces_ccw(v):
        x = act_on_hermitian(m, net.f[fidx])
        if x.d <= 0:
            raise NonIntersectingHorospheres(
                f"face point {fidx} leaves the chart at vertex {v}"
            )
        w = x.b / x.d
        t = math.sqrt(max(x.det(), 0.0)) / x.d
        residual = max(residual, abs(t - 1.0))
        w_face[fidx] = w
    return _Chart(v, m, w_face, residual)


def _neighbor_circle(net: HorosphericalNet, chart: _Chart, j: int):
    """Chart data of the neighbor horosphere H~_j: either a plane or a circle.

    Returns (is_plane, center, r_tilde, diameter).  The circle is the
    intersection of the neighbor sphere with the plane x3 = 1.
    """
    u = act_on_hermitian(chart.map, net.horospheres[j].u)
    tr = u.trace()
    if abs(u.d) <= 1e-13 * tr:
        # neighbor horosphere is a horizontal plane x3 = tr / 2
        if abs(tr / 2.0 - 1.0) > 1e-10:
            raise NonIntersectingHorospheres(
                f"parallel horospheres at distinct heights near vertex {chart.vertex}"
            )
        return True, 0j, math.inf, math.inf
    center = u.b / u.d
    r = tr / 2.0
    d = (1.0 + abs(center) ** 2) / r
    if d <= 1.0 + 1e-14:
        raise NonIntersectingHorospheres(
            f"horospheres across edge ({chart.vertex},{j}) do not intersect"
        )
    return False, center, math.sqrt(d - 1.0), d


def _measure_edge(net: HorosphericalNet, chart: _Chart, j: int) -> EdgeMeasure:
    i = chart.vertex
    disk = net.disk
    wl = chart.w_face[disk.left_face(i, j)]
    wr = chart.w_face[disk.right_face(i, j)]
    is_plane, center, r_tilde, d = _neighbor_circle(net, chart, j)
    m = EdgeMeasure()
    scale = max(1.0, abs(wl), abs(wr))
    if abs(wl - wr) <= TOL_DEGENERATE * scale:
        m.degenerate = True
        m.r_tilde = r_tilde
        m.flat = is_plane
        return m
    if is_plane:
        m.flat = True
        m.ell = abs(wr - wl)
        return m
    # arc length and radius come from the face points themselves; only the
    # dihedral angle uses the horosphere diameter.  The two radii agreeing
    # is what ties the measurement back to the horosphere geometry.
    r_points = 0.5 * (abs(wl - center) + abs(wr - center))
    m.r_tilde = r_points
    m.radius_residual = abs(r_points - r_tilde)
    m.theta = -cmath.phase((wr - center) / (wl - center))
    m.ell = abs(m.theta) * r_points
    m.alpha = math.copysign(math.acos(max(-1.0, min(1.0, 1.0 - 2.0 / d))), m.theta)
    return m


def measure_net(net: HorosphericalNet) -> HorosphericalNet:
    """Populate arc lengths, dihedral angles, rotation angles, and areas.

    All quantities are read off vertex charts; nothing here touches cross
    ratios, so measurement is an independent path from the construction.
    """
    disk = net.disk
    net.edge_measure = {}
    net.area = {}
    net.mean_curvature = {}
    net.ratio = {}
    charts = {}
    chart_residual = 0.0

    def chart_of(v):
        if v not in charts:
            charts[v] = _chart(net, v)
        return charts[v]

    for (i, j) in disk.interior_edges:
        ch = chart_of(i)
        net.edge_measure[(i, j)] = _measure_edge(net, ch, j)

    for v in disk.interior_vertices:
        ch = chart_of(v)
        ring = disk.ring_ccw(v)
        faces = disk.vertex_faces_ccw(v)
        n = len(ring)
        shoelace = 0.0
        corrections = 0.0
        for m in range(n):
            w_a = ch.w_face[faces[m]]
            w_b = ch.w_face[faces[(m + 1) % n]]
            shoelace += 0.5 * (w_a.conjugate() * w_b).imag
            j = ring[(m + 1) % n]
            scale = max(1.0, abs(w_a), abs(w_b))
            if abs(w_a - w_b) <= TOL_DEGENERATE * scale:
                continue
            is_plane, center, r_tilde, _ = _neighbor_circle(net, ch, j)
            if is_plane:
                continue
            phi = cmath.phase((w_b - center) / (w_a - center))
            r_pts = 0.5 * (abs(w_a - center) + abs(w_b - center))
            chart_residual = max(
                chart_residual,
                abs(abs(w_a - center) - r_tilde),
                abs(abs(w_b - center) - r_tilde),
            )
            corrections += 0.5 * r_pts * r_pts * (phi - math.sin(phi))
        net.area[v] = abs(shoelace + corrections)
        half_sum = 0.0
        for j in ring:
            em = net.measure_of(v, j)
            half_sum += 0.5 * em.ell * math.tan(em.alpha / 2.0)
        net.mean_curvature[v] = net.area[v] + half_sum
        if net.area[v] > 0:
            net.ratio[v] = net.mean_curvature[v] / net.area[v]

    for v in charts:
        chart_residual = max(chart_residual, charts[v].plane_residual)
    net.chart_residual = chart_residual
    net.degenerate = all(m.degenerate for m in net.edge_measure.values()) if (
        net.edge_measure
    ) else False
    net.measured = True
    return net


def build_cmc1(
    source: CirclePattern,
    target: CirclePattern,
    shear_tol: float = TOL_SHEAR,
) -> HorosphericalNet:
    """Weierstrass construction f = A A* from a shear-matched Delaunay pair.

    The target pattern becomes the hyperbolic Gauss map; the horosphere at
    primal vertex i is the image of N_{z_i, 1} under any incident face map
    (consistent because the transition eigenvalues are unimodular).
    """
    x = cross_ratios_of(source)
    xt = cross_ratios_of(target)
    mismatch = shear_match(x, xt)
    if mismatch > shear_tol:
        raise NotShearMatched(
            f"shear mismatch {mismatch:.3e} exceeds {shear_tol:.1e}"
        )
    try:
        frame = coherent_lift(osculating_frame(source, target), x, xt)
    except MonodromyObstruction as exc:
        raise LiftFailed(str(exc)) from exc
    return _net_from_frame(frame, check_consistency=True)


def _net_from_frame(frame: MoebiusFrame, check_consistency: bool = True) -> HorosphericalNet:
    disk = frame.disk
    f = tuple(
        act_on_hermitian(m, HermitianPoint.identity()) for m in frame.maps
    )
    horos = []
    incidence = 0.0
    for v in range(disk.n_vertices):
        faces = disk.vertex_faces_ccw(v)
        base = horosphere(frame.source.z[v], 1.0)
        images = [act_on_hermitian(frame.maps[fi], base.u) for fi in faces]
        u0 = images[0]
        if check_consistency:
            scale = max(abs(u0.a), abs(u0.b), abs(u0.d), 1e-30)
            for u in images[1:]:
                incidence = max(
                    incidence,
                    max(abs(u.a - u0.a), abs(u.b - u0.b), abs(u.d - u0.d)) / scale,
                )
        horos.append(Horosphere(u0))
    net = HorosphericalNet(
        disk=disk,
        f=f,
        horospheres=tuple(horos),
        gauss=tuple(frame.target.z),
        frame=frame,
    )
    net.incidence_residual = incidence
    return measure_net(net)


def integrated_mean_curvature(net: HorosphericalNet):
    """Per dual face: integrated mean curvature H and the ratio H / area."""
    net.require_measured()
    out = {}
    for v in net.disk.interior_vertices:
        area = net.area[v]
        if area <= 0:
            if net.degenerate:
                out[v] = (net.mean_curvature[v], math.nan)
                continue
            raise ZeroArea(f"dual face at vertex {v} has zero area")
        out[v] = (net.mean_curvature[v], net.mean_curvature[v] / area)
    return out


# -- parallel surfaces ---------------------------------------------------


def _minkowski_rows(points):
    rows = []
    for u in points:
        x0, x1, x2, x3 = u.minkowski()
        rows.append([x0, -x1, -x2, -x3])  # row v: -<x, u> = x0 u0 - x.u
    return np.array(rows)


def _offset_face_point(x: HermitianPoint, horos, t: float) -> HermitianPoint:
    """Intersection of offset horospheres near the normal flow of x."""
    us = [h.u for h in horos]
    # coincident horospheres: exact normal flow
    tr0 = us[0].trace()
    if all(
        max(
            abs(u.a / u.trace() - us[0].a / tr0),
            abs(u.b / u.trace() - us[0].b / tr0),
            abs(u.d / u.trace() - us[0].d / tr0),
        )
        <= 1e-12
        for u in us[1:]
    ):
        ch, sh = math.cosh(t), math.sinh(t)
        moved = HermitianPoint(
            x.a * ch + (us[0].a - x.a) * sh,
            x.b * ch + (us[0].b - x.b) * sh,
            x.d * ch + (us[0].d - x.d) * sh,
        )
        return moved

    scale = math.exp(t)
    a_rows = _minkowski_rows([u.scale(scale) for u in us])
    guess = np.array(x.minkowski())
    # initial velocity: <v, u_m> constraints linearized at t = 0
    vel_rows = np.vstack([a_rows / scale, _minkowski_rows([x])])
    vel_rhs = np.array([1.0, 1.0, 1.0, 0.0])
    v, *_ = np.linalg.lstsq(vel_rows, vel_rhs, rcond=None)
    y = guess + t * v
    eta = np.diag([-1.0, 1.0, 1.0, 1.0])
    floor = 1e-13 * max(1.0, float(np.abs(a_rows).max())) * max(
        1.0, float(np.abs(y).max())
    )
    best = math.inf
    for _ in range(60):
        res = np.concatenate(
            [a_rows @ y - 1.0, [y @ eta @ y + 1.0]]
        )
        err = float(np.max(np.abs(res)))
        if err < floor or (err < 1e-9 and err >= 0.5 * best):
            break  # converged, or stalled at the roundoff floor
        best = min(best, err)
        jac = np.vstack([a_rows, 2.0 * (eta @ y)])
        step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        y = y + step
    else:
        raise OffsetTooLarge(
            f"offset horospheres no longer meet near the original vertex (t={t})"
        )
    if y[0] <= 0:
        raise OffsetTooLarge("offset intersection left the upper hyperboloid")
    return HermitianPoint.from_minkowski(*y)


def parallel_net(net: HorosphericalNet, t: float) -> HorosphericalNet:
    """Net of the parallel horospheres at signed distance t (toward tangency)."""
    net.require_measured()
    disk = net.disk
    new_horos = tuple(h.offset(t) for h in net.horospheres)
    new_f = []
    for fidx, (i, j, k) in enumerate(disk.faces):
        horos = (net.horospheres[i], net.horospheres[j], net.horospheres[k])
        new_f.append(_offset_face_point(net.f[fidx], horos, t))
    offset = HorosphericalNet(
        disk=disk,
        f=tuple(new_f),
        horospheres=new_horos,
        gauss=net.gauss,
        frame=None,
    )
    try:
        return measure_net(offset)
    except NonIntersectingHorospheres as exc:
        raise OffsetTooLarge(str(exc)) from exc


def parallel_area_derivative(net: HorosphericalNet, steps=(1e-2, 5e-3, 2.5e-3)):
    """Richardson-extrapolated d/dt area(f_t) per dual face, with -2H reference."""
    net.require_measured()
    diffs = []
    for t in steps:
        offset = parallel_net(net, t)
        diffs.append(
            {
                v: (offset.area[v] - net.area[v]) / t
                for v in net.disk.interior_vertices
            }
        )
    out = {}
    for v in net.disk.interior_vertices:
        seq = [d[v] for d in diffs]
        hs = list(steps)
        # Richardson chain; stage p removes the O(t^p) term of the quotient
        p = 1
        while len(seq) > 1:
            nxt = []
            for k in range(len(seq) - 1):
                r = (hs[k] / hs[k + 1]) ** p
                nxt.append((r * seq[k + 1] - seq[k]) / (r - 1.0))
            seq = nxt
            hs = hs[1:]
            p += 1
        reference = -2.0 * net.mean_curvature[v]
        out[v] = (seq[0], reference)
    return out


def flat_patch_net(disk: TriangulatedDisk, chart_points) -> HorosphericalNet:
    """Net lying on a single horosphere (the plane x3 = 1, tangency at inf).

    ``chart_points`` gives one complex chart position per face.  Useful as
    the alpha = 0 reference: edges are straight chords, dual-face areas are
    flat polygon areas, and parallel offsets scale areas by exp(-2t).
    """
    if len(chart_points) != disk.n_faces:
        raise DegenerateFace("one chart point per face required")
    from .moebius import from_upper_half_space

    plane = horosphere(SpherePoint.infinity(), 1.0)
    net = HorosphericalNet(
        disk=disk,
        f=tuple(from_upper_half_space(complex(w), 1.0) for w in chart_points),
        horospheres=tuple(plane for _ in range(disk.n_vertices)),
        gauss=tuple(SpherePoint.infinity() for _ in range(disk.n_vertices)),
        frame=None,
    )
    return measure_net(net)


# -- duality and the inverse direction ------------------------------------


def dual_surface(net: HorosphericalNet) -> HorosphericalNet:
    """Dual CMC-1 surface f~ = A^{-1} (A^{-1})* with Gauss map the source pattern."""
    if net.frame is None:
        raise FrameUnavailable("dual surface needs the osculating frame")
    return _net_from_frame(net.frame.inverse(), check_consistency=False)


def _eta_matrix(z_i: SpherePoint, z_j: SpherePoint, lam: complex) -> MoebiusMap:
    """Transition eta_{ij} with eigenvalue 1/lam at z_i and lam at z_j."""
    return transition_closed_form(z_j, z_i, lam)


def extract_patterns(net: HorosphericalNet, tol: float = TOL_INVERSE):
    """Inverse direction: recover (z, z~, frame) from a measured CMC-1 net.

    Only measured geometry enters: lambda = exp(i (ell/2) tan(alpha/2)) per
    edge, the multiplicative 1-form eta is integrated over a dual spanning
    tree, and the integration constant is fixed by a polar factorization
    of the root face point.
    """
    net.require_measured()
    disk = net.disk
    if net.degenerate:
        raise NotCMC1("degenerate (single-point) net carries no pattern pair")
    gauss_pattern = CirclePattern(disk, net.gauss)
    xt = cross_ratios_of(gauss_pattern)
    for v in disk.interior_vertices:
        r = net.ratio.get(v)
        if r is None or abs(r - 1.0) > 1e-6:
            raise NotCMC1(f"H/area at vertex {v} is {r}, not 1")
    lam = {}
    for (i, j) in disk.interior_edges:
        em = net.edge_measure[(i, j)]
        s = em.ell * math.tan(em.alpha / 2.0) if not em.degenerate else 0.0
        total = s + xt.arg(i, j)
        if total < -1e-9 or total >= math.pi - 1e-12:
            raise NotCMC1(
                f"edge ({i},{j}): ell tan(alpha/2) + Arg X~ = {total} outside [0, pi)"
            )
        lam[(i, j)] = cmath.exp(0.5j * s)

    etas = {
        e: _eta_matrix(net.gauss[e[0]], net.gauss[e[1]], lam[e])
        for e in disk.interior_edges
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
        raise EtaNotClosed(
            f"per-vertex eta product deviates from I by {worst:.2e}"
        )

    b_maps: list = [None] * disk.n_faces
    b_maps[0] = MoebiusMap.identity()
    queue = [0]
    while queue:
        fidx = queue.pop(0)
        for (g, (i, j)) in disk.dual_adjacency[fidx]:
            if b_maps[g] is not None:
                continue
            # crossing from the left of i -> j to its right applies eta_{ij}
            b_maps[g] = eta_for(i, j).compose(b_maps[fidx])
            queue.append(g)

    # right constant from C C* = f_root (principal PSD square root)
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
        raise EtaNotClosed(
            f"integrated frame fails A A* = f by {residual:.2e}"
        )

    z = []
    for v in range(disk.n_vertices):
        fidx = net.disk.vertex_faces_ccw(v)[0]
        z.append(a_maps[fidx].inverse().apply(net.gauss[v]))
    source = CirclePattern(disk, z)
    frame = MoebiusFrame(source, gauss_pattern, a_maps, lift="coherent")
    return source, gauss_pattern, frame
