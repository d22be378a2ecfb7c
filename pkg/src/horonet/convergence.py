"""Lattice harness: shear-preserving solver, discrete Schwarzians, and
empirical convergence of frames, Schwarzians, and CMC-1 nets to their
smooth counterparts.

Two pattern pipelines are exposed: plain pointwise sampling of a smooth
map (cheap smoke test) and the shear-preserving solve, which finds vertex
scale factors making the rescaled lattice flat at interior vertices with
boundary factors log |h'|.  The solved pattern shares the lattice's shear
coordinates exactly up to layout roundoff, which is what the CMC-1
construction needs.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .cmc1 import build_cmc1
from .errors import (
    DelaunayViolated,
    DomainExhausted,
    FoldOver,
    NewtonDiverged,
    NotShearMatched,
)
from .mesh import LatticePatch, LatticeSpec, lattice_subcomplex
from .moebius import HermitianPoint, act_on_hermitian, hyperbolic_distance
from .osculating import (
    MoebiusFrame,
    SqrtBranch,
    coherent_lift,
    osculating_frame,
    smooth_osculating,
    smooth_pair_frame,
)
from .pattern import CirclePattern, cross_ratios_of

GRAD_TOL = 1e-12


@dataclass(frozen=True)
class Jet:
    """Holomorphic map with derivatives, the smooth data of the harness."""

    name: str
    f: object
    d1: object
    d2: object
    d3: object = None

    def schwarzian(self, z: complex) -> complex:
        if self.d3 is None:
            raise ValueError(f"jet {self.name} has no third derivative")
        r = self.d2(z) / self.d1(z)
        return self.d3(z) / self.d1(z) - 1.5 * r * r


def jet_identity() -> Jet:
    return Jet("id", lambda z: z, lambda z: 1.0 + 0j, lambda z: 0j, lambda z: 0j)


def jet_exp() -> Jet:
    return Jet("exp", cmath.exp, cmath.exp, cmath.exp, cmath.exp)


def jet_square() -> Jet:
    return Jet(
        "square", lambda z: z * z, lambda z: 2 * z, lambda z: 2.0 + 0j, lambda z: 0j
    )


def jet_moebius(a, b, c, d) -> Jet:
    det = a * d - b * c

    def f(z):
        return (a * z + b) / (c * z + d)

    def d1(z):
        return det / (c * z + d) ** 2

    def d2(z):
        return -2 * det * c / (c * z + d) ** 3

    def d3(z):
        return 6 * det * c * c / (c * z + d) ** 4

    return Jet("moebius", f, d1, d2, d3)


JETS = {
    "id": jet_identity,
    "exp": jet_exp,
    "square": jet_square,
    "moebius": lambda: jet_moebius(1.0, 0.4 + 0.2j, 0.3, 1.0),
}


def sampled_pattern(jet: Jet, patch: LatticePatch) -> CirclePattern:
    """Pointwise samples h(v); rejects orientation flips (FoldOver)."""
    z = [jet.f(p) for p in patch.positions]
    for (i, j, k) in patch.disk.faces:
        area = ((z[j] - z[i]).conjugate() * (z[k] - z[i])).imag
        if area <= 0:
            raise FoldOver(f"face ({i},{j},{k}) flips orientation under {jet.name}")
    return CirclePattern(patch.disk, z)


# -- shear-preserving solve ------------------------------------------------


def _face_angles(a, b, c):
    """Angles opposite sides (a, b, c); degenerate triangles collapse to pi/0."""
    if a >= b + c:
        return math.pi, 0.0, 0.0
    if b >= c + a:
        return 0.0, math.pi, 0.0
    if c >= a + b:
        return 0.0, 0.0, math.pi
    ca = max(-1.0, min(1.0, (b * b + c * c - a * a) / (2 * b * c)))
    cb = max(-1.0, min(1.0, (c * c + a * a - b * b) / (2 * c * a)))
    aa, ab = math.acos(ca), math.acos(cb)
    return aa, ab, math.pi - aa - ab


def _angle_defects(patch: LatticePatch, u, base_log_len, interior_index):
    disk = patch.disk
    defects = np.full(len(interior_index), 2.0 * math.pi)
    rows, cols, vals = [], [], []
    for (i, j, k) in disk.faces:
        lij = math.exp(base_log_len[(min(i, j), max(i, j))] + (u[i] + u[j]) / 2)
        ljk = math.exp(base_log_len[(min(j, k), max(j, k))] + (u[j] + u[k]) / 2)
        lki = math.exp(base_log_len[(min(k, i), max(k, i))] + (u[k] + u[i]) / 2)
        ai, aj, ak = _face_angles(ljk, lki, lij)
        for v, ang in ((i, ai), (j, aj), (k, ak)):
            if v in interior_index:
                defects[interior_index[v]] -= ang
        # Jacobian of the defect: d angle_i / d u_i = -(cot aj + cot ak)/2 etc.
        cots = {}
        for v, ang in ((i, ai), (j, aj), (k, ak)):
            cots[v] = 1.0 / math.tan(ang) if 1e-12 < ang < math.pi - 1e-12 else 0.0
        for (v, w, opp) in ((i, j, k), (j, k, i), (k, i, j)):
            # d defect_v / d u_v += (cot a_w + cot a_opp)/2
            if v in interior_index:
                rows.append(interior_index[v])
                cols.append(v)
                vals.append(0.5 * (cots[w] + cots[opp]))
                # d defect_v / d u_w -= cot a_opp / 2 ; d/d u_opp -= cot a_w / 2
                rows.append(interior_index[v])
                cols.append(w)
                vals.append(-0.5 * cots[opp])
                rows.append(interior_index[v])
                cols.append(opp)
                vals.append(-0.5 * cots[w])
    return defects, (rows, cols, vals)


def shear_preserving_solve(
    patch: LatticePatch,
    jet: Jet,
    grad_tol: float = GRAD_TOL,
    max_iter: int = 50,
) -> CirclePattern:
    """Delaunay pattern sharing the lattice's shear coordinates.

    Newton iteration on vertex scale factors (boundary fixed at log |h'|)
    drives the interior angle defects to zero; the flat metric is then laid
    out in the plane anchored at the most central vertex.
    """
    disk = patch.disk
    n = disk.n_vertices
    base_log_len = {
        e: math.log(abs(patch.positions[e[1]] - patch.positions[e[0]]))
        for e in disk.edges
    }
    u = np.array([math.log(abs(jet.d1(p))) for p in patch.positions])
    interior = [v for v in range(n) if not disk.is_boundary_vertex[v]]
    interior_index = {v: m for m, v in enumerate(interior)}
    if interior:
        f_val, _ = _angle_defects(patch, u, base_log_len, interior_index)
        for _ in range(max_iter):
            err = np.abs(f_val).max()
            if err <= grad_tol:
                break
            _, (rows, cols, vals) = _angle_defects(
                patch, u, base_log_len, interior_index
            )
            keep = [m for m, c in enumerate(cols) if c in interior_index]
            jac = sp.csr_matrix(
                (
                    [vals[m] for m in keep],
                    (
                        [rows[m] for m in keep],
                        [interior_index[cols[m]] for m in keep],
                    ),
                ),
                shape=(len(interior), len(interior)),
            )
            step = spla.spsolve(jac, -f_val)
            s = 1.0
            while s > 1e-8:
                trial = u.copy()
                for v, m in interior_index.items():
                    trial[v] += s * step[m]
                f_trial, _ = _angle_defects(patch, trial, base_log_len, interior_index)
                if np.abs(f_trial).max() < (1.0 - 0.25 * s) * err or np.abs(
                    f_trial
                ).max() <= grad_tol:
                    u, f_val = trial, f_trial
                    break
                s /= 2.0
            else:
                raise NewtonDiverged("line search failed in the conformal solve")
        else:
            raise NewtonDiverged(
                f"angle defects stalled at {np.abs(f_val).max():.2e}"
            )

    z = _layout(patch, u, base_log_len, jet)
    pattern = CirclePattern(disk, z)
    xt = cross_ratios_of(pattern)
    x = cross_ratios_of(CirclePattern(disk, patch.positions))
    bad = xt.delaunay_violations(1e-12)
    if bad:
        worst = min(xt.args[e] for e in bad)
        raise DelaunayViolated(
            f"solved pattern is not Delaunay at edges {bad[:4]} (worst Arg {worst:.3e}); "
            "eps is not small enough"
        )
    return pattern


def _layout(patch: LatticePatch, u, base_log_len, jet: Jet):
    """Lay out the rescaled flat metric; anchored at the most central vertex."""
    disk = patch.disk
    x0, x1, y0, y1 = patch.spec.rect
    center = complex((x0 + x1) / 2.0, (y0 + y1) / 2.0)
    anchor = min(
        range(disk.n_vertices), key=lambda v: abs(patch.positions[v] - center)
    )
    seed_face = disk.vertex_faces_ccw(anchor)[0]

    def length(a, b):
        return math.exp(base_log_len[(min(a, b), max(a, b))] + (u[a] + u[b]) / 2)

    z: list = [None] * disk.n_vertices
    i, j, k = disk.face_vertices(seed_face)
    z[i] = jet.f(patch.positions[i])
    direction = jet.f(patch.positions[j]) - jet.f(patch.positions[i])
    direction /= abs(direction)
    z[j] = z[i] + length(i, j) * direction
    z[k] = _third_point(z[i], z[j], length(i, k), length(j, k))
    placed = [False] * disk.n_faces
    placed[seed_face] = True
    queue = [seed_face]
    while queue:
        f = queue.pop(0)
        fv = disk.face_vertices(f)
        for (a, b) in ((fv[0], fv[1]), (fv[1], fv[2]), (fv[2], fv[0])):
            if not disk.is_interior_edge(a, b):
                continue
            g = disk.right_face(a, b)
            if placed[g]:
                continue
            l = disk.apex(b, a)
            if z[l] is None:
                # face (b, a, l) is counterclockwise: l left of b -> a
                z[l] = _third_point(z[b], z[a], length(b, l), length(a, l))
            placed[g] = True
            queue.append(g)
    return z


def _third_point(za, zb, ra, rb):
    """Point at distances (ra, rb) from (za, zb), left of za -> zb."""
    d = abs(zb - za)
    x = (d * d + ra * ra - rb * rb) / (2.0 * d)
    y = math.sqrt(max(ra * ra - x * x, 0.0))
    return za + complex(x, y) * (zb - za) / d


# -- discrete Schwarzians and derivatives ----------------------------------


def discrete_schwarzian(
    x,
    x_target,
    patch: LatticePatch,
    k: int,
    shear_tol: float = 1e-8,
):
    """Field s_k(v) = log(X~/X)(e) / (i eps^2), e the edge v -> shift_k(v)."""
    disk = patch.disk
    eps = patch.spec.eps
    out = {}
    for v in range(disk.n_vertices):
        w = patch.shift_vertex(v, k)
        if w is None or not disk.is_interior_edge(v, w):
            continue
        ratio = cmath.log(x_target.x(v, w) / x.x(v, w))
        if abs(ratio.real) > shear_tol:
            raise NotShearMatched(
                f"|Re log (X~/X)| = {abs(ratio.real):.2e} on edge ({v},{w})"
            )
        out[v] = ratio.imag / (eps * eps)
    return out


def interior_subset(patch: LatticePatch, vertices):
    """Vertices of the set whose six lattice neighbors all belong to it."""
    vs = set(vertices)
    out = []
    for v in vs:
        nbrs = [patch.shift_vertex(v, k) for k in range(1, 7)]
        if all(w is not None and w in vs for w in nbrs):
            out.append(v)
    return sorted(out)


def discrete_derivative(field: dict, patch: LatticePatch, k: int, order: int = 1):
    """Iterated forward difference along lattice direction k (Def-style W_r)."""
    cur = dict(field)
    eps = patch.spec.eps
    lk = patch.spec.length(k)
    for _ in range(order):
        domain = interior_subset(patch, cur.keys())
        if not domain:
            raise DomainExhausted("no interior vertices left for the derivative")
        nxt = {}
        for v in domain:
            w = patch.shift_vertex(v, k)
            nxt[v] = (cur[w] - cur[v]) / (eps * lk)
        cur = nxt
    return cur


# -- convergence reports ---------------------------------------------------


@dataclass
class ConvergenceRow:
    eps: float
    frame_error: float = math.nan
    surface_error: float = math.nan
    schwarzian_error: float = math.nan
    hopf_error: float = math.nan
    c1_error: float = math.nan
    solver_deviation: float = math.nan  # sup |pattern - h(v)|


@dataclass
class ConvergenceReport:
    case: str
    pipeline: str
    rows: list = field(default_factory=list)

    def orders(self, attr: str):
        vals = [(r.eps, getattr(r, attr)) for r in self.rows]
        out = []
        for (e0, v0), (e1, v1) in zip(vals, vals[1:]):
            if v0 > 0 and v1 > 0 and math.isfinite(v0) and math.isfinite(v1):
                out.append(math.log(v0 / v1) / math.log(e0 / e1))
            else:
                out.append(math.nan)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            [
                "eps",
                "frame_err",
                "surf_err",
                "s1_err",
                "hopf_err",
                "c1_err",
                "solver_dev",
                "frame_order",
                "surf_order",
                "s1_order",
            ]
        )
        fo = [math.nan] + self.orders("frame_error")
        so = [math.nan] + self.orders("surface_error")
        s1o = [math.nan] + self.orders("schwarzian_error")
        for r, a, b, c in zip(self.rows, fo, so, s1o):
            writer.writerow(
                [
                    f"{r.eps:.6g}",
                    f"{r.frame_error:.6e}",
                    f"{r.surface_error:.6e}",
                    f"{r.schwarzian_error:.6e}",
                    f"{r.hopf_error:.6e}",
                    f"{r.c1_error:.6e}",
                    f"{r.solver_deviation:.6e}",
                    f"{a:.3f}",
                    f"{b:.3f}",
                    f"{c:.3f}",
                ]
            )
        return buf.getvalue()


def _pattern_for(jet: Jet, patch: LatticePatch, pipeline: str) -> CirclePattern:
    if pipeline == "sampled":
        return sampled_pattern(jet, patch)
    if pipeline == "solved":
        return shear_preserving_solve(patch, jet)
    raise ValueError(f"unknown pipeline {pipeline!r}")


def _face_barycenters(patch: LatticePatch):
    return [
        (patch.positions[i] + patch.positions[j] + patch.positions[k]) / 3.0
        for (i, j, k) in patch.disk.faces
    ]


def _threaded_references(jet: Jet, patch: LatticePatch):
    """A_h at face barycenters with the square-root branch continued along
    the dual tree (the principal branch is discontinuous where h'^3 crosses
    the negative real axis)."""
    barys = _face_barycenters(patch)
    disk = patch.disk
    refs: list = [None] * disk.n_faces
    refs[0] = smooth_osculating(jet.f, jet.d1, jet.d2, barys[0])
    queue = [0]
    while queue:
        f = queue.pop(0)
        for (g, _) in disk.dual_adjacency[f]:
            if refs[g] is not None:
                continue
            cand = smooth_osculating(jet.f, jet.d1, jet.d2, barys[g])
            if cand.frobenius_distance(refs[f]) > cand.negate().frobenius_distance(
                refs[f]
            ):
                cand = cand.negate()
            refs[g] = cand
            queue.append(g)
    return refs


def _aligned_frame_error(frame: MoebiusFrame, patch: LatticePatch, jet: Jet):
    """sup_F |A_F - A_h(barycenter)| after one global sign alignment."""
    refs = _threaded_references(jet, patch)
    root = frame.maps[0]
    sign = 1.0
    if root.frobenius_distance(refs[0]) > root.negate().frobenius_distance(refs[0]):
        sign = -1.0
    worst = 0.0
    for m, ref in zip(frame.maps, refs):
        mm = m if sign > 0 else m.negate()
        worst = max(worst, mm.frobenius_distance(ref))
    return worst


def _vertex_frame_field(frame: MoebiusFrame, patch: LatticePatch):
    """Frame as a vertex field via the upward face (v, v+dir1, v+dir2)."""
    disk = patch.disk
    out = {}
    for v in range(disk.n_vertices):
        a = patch.shift_vertex(v, 1)
        b = patch.shift_vertex(v, 2)
        if a is None or b is None:
            continue
        key = (v, a)
        try:
            fidx = disk.left_face(v, a)
        except KeyError:
            continue
        if disk.face_vertices(fidx) in ((v, a, b), (a, b, v), (b, v, a)):
            out[v] = np.array(
                [[frame.maps[fidx].a, frame.maps[fidx].b],
                 [frame.maps[fidx].c, frame.maps[fidx].d]]
            )
    return out


def frame_convergence(
    jet: Jet,
    spec_template: LatticeSpec,
    eps_list,
    pipeline: str = "solved",
) -> ConvergenceReport:
    """Frame and Schwarzian errors against the smooth osculating map."""
    report = ConvergenceReport(jet.name, pipeline)
    for eps in eps_list:
        spec = replace(spec_template, eps=eps)
        patch = lattice_subcomplex(spec)
        lattice = CirclePattern(patch.disk, patch.positions)
        target = _pattern_for(jet, patch, pipeline)
        frame = coherent_lift(osculating_frame(lattice, target))
        row = ConvergenceRow(eps)
        row.frame_error = _aligned_frame_error(frame, patch, jet)
        row.solver_deviation = max(
            abs(p.value() - jet.f(w))
            for p, w in zip(target.z, patch.positions)
        )
        x = cross_ratios_of(lattice)
        xt = cross_ratios_of(target)
        if pipeline == "solved":
            s1 = discrete_schwarzian(x, xt, patch, 1)
            row.schwarzian_error = max(
                abs(
                    s1[v]
                    - 0.5
                    * spec.length(1)
                    * (
                        spec.omega(2) * spec.omega(3) * jet.schwarzian(
                            patch.positions[v]
                        )
                    ).real
                )
                for v in s1
            )
        # C^1: forward difference of the frame field against dA_h
        vf = _vertex_frame_field(frame, patch)
        sign = 1.0
        d1 = discrete_derivative(vf, patch, 1) if vf else {}
        c1 = 0.0
        for v, d in d1.items():
            w = patch.positions[v]
            ah = smooth_osculating(jet.f, jet.d1, jet.d2, w)
            sh = jet.schwarzian(w)
            mc = np.array([[w, -w * w], [1.0, -w]], dtype=complex) * (-sh / 2.0)
            ref = np.array([[ah.a, ah.b], [ah.c, ah.d]]) @ mc
            err = min(np.abs(d - ref).max(), np.abs(d + ref).max())
            c1 = max(c1, err)
        row.c1_error = c1 if d1 else math.nan
        report.rows.append(row)
    return report


def surface_convergence(
    jet_g: Jet,
    jet_gt: Jet,
    spec_template: LatticeSpec,
    eps_list,
    pipeline: str = "solved",
) -> ConvergenceReport:
    """Net vertices against the smooth CMC-1 surface f = A A*, plus the
    Hopf-differential limit of (ell / eps^2) tan(alpha / 2) per direction 1."""
    report = ConvergenceReport(f"{jet_g.name}->{jet_gt.name}", pipeline)
    for eps in eps_list:
        spec = replace(spec_template, eps=eps)
        patch = lattice_subcomplex(spec)
        pat_g = _pattern_for(jet_g, patch, pipeline)
        pat_gt = _pattern_for(jet_gt, patch, pipeline)
        net = build_cmc1(pat_g, pat_gt)
        row = ConvergenceRow(eps)
        worst = 0.0
        for fidx, w in enumerate(_face_barycenters(patch)):
            a = smooth_pair_frame(jet_g, jet_gt, w)
            ref = act_on_hermitian(a, HermitianPoint.identity())
            worst = max(worst, hyperbolic_distance(net.f[fidx], ref))
        row.surface_error = worst
        hopf = 0.0
        disk = patch.disk
        for v in range(disk.n_vertices):
            w = patch.shift_vertex(v, 1)
            if w is None or not disk.is_interior_edge(v, w):
                continue
            em = net.measure_of(v, w)
            val = em.ell * math.tan(em.alpha / 2.0) / (eps * eps)
            q = (jet_g.schwarzian(patch.positions[v]) - jet_gt.schwarzian(
                patch.positions[v]
            )) / 2.0
            ref = spec.length(1) * (spec.omega(2) * spec.omega(3) * q).real
            hopf = max(hopf, abs(val - ref))
        row.hopf_error = hopf
        report.rows.append(row)
    return report
