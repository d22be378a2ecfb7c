"""File formats, exporters, and run manifests.

JSON conventions: complex numbers as {"re": x, "im": y}; the point at
infinity as the string "inf".  All writers emit deterministic bytes for
fixed inputs (sorted keys, fixed float formatting, no timestamp unless
explicitly requested).
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

from .cmc1 import HorosphericalNet, _chart, _neighbor_circle
from .errors import HoronetError, UnmeasuredNet
from .mesh import TriangulatedDisk, build_disk
from .moebius import MoebiusMap, SpherePoint, act_on_hermitian, from_upper_half_space, to_poincare_ball
from .osculating import MoebiusFrame
from .pattern import CirclePattern, CrossRatioSystem

VERSION = "0.1.0"


def complex_to_json(z) -> dict | str:
    if isinstance(z, SpherePoint):
        if z.is_infinity:
            return "inf"
        z = z.value()
    return {"re": z.real, "im": z.imag}


def complex_from_json(obj):
    if obj == "inf":
        return SpherePoint.infinity()
    return complex(obj["re"], obj["im"])


def save_mesh(disk: TriangulatedDisk, positions=None) -> dict:
    doc = {"faces": [list(f) for f in disk.faces]}
    if positions is not None:
        doc["positions"] = [complex_to_json(p) for p in positions]
    return doc


def load_mesh(doc: dict):
    disk = build_disk(doc["faces"])
    positions = None
    if "positions" in doc:
        positions = [complex_from_json(p) for p in doc["positions"]]
    return disk, positions


def save_pattern(pattern: CirclePattern) -> dict:
    return save_mesh(pattern.disk, pattern.z)


def load_pattern(doc: dict) -> CirclePattern:
    disk, positions = load_mesh(doc)
    if positions is None:
        raise HoronetError("pattern file has no positions")
    return CirclePattern(disk, positions)


def save_cross_ratios(x: CrossRatioSystem) -> dict:
    return {
        "edges": [
            {"i": i, "j": j, "re": x.values[(i, j)].real, "im": x.values[(i, j)].imag}
            for (i, j) in sorted(x.values)
        ]
    }


def load_cross_ratios(disk: TriangulatedDisk, doc: dict) -> CrossRatioSystem:
    values = {
        (e["i"], e["j"]): complex(e["re"], e["im"]) for e in doc["edges"]
    }
    return CrossRatioSystem(disk, values)


def save_toda(cell, q) -> dict:
    return {
        "edges": [
            {"i": i, "j": j, "q_re": q[(i, j)].real, "q_im": q[(i, j)].imag}
            for (i, j) in sorted(q)
        ]
    }


def load_toda(doc: dict) -> dict:
    return {
        (e["i"], e["j"]): complex(e["q_re"], e["q_im"]) for e in doc["edges"]
    }


def save_frame(frame: MoebiusFrame) -> dict:
    return {
        "mesh": {"faces": [list(f) for f in frame.disk.faces]},
        "source_positions": [complex_to_json(p) for p in frame.source.z],
        "target_positions": [complex_to_json(p) for p in frame.target.z],
        "matrices": [
            [
                [complex_to_json(m.a), complex_to_json(m.b)],
                [complex_to_json(m.c), complex_to_json(m.d)],
            ]
            for m in frame.maps
        ],
        "lift": frame.lift,
    }


def load_frame(doc: dict) -> MoebiusFrame:
    disk = build_disk(doc["mesh"]["faces"])

    def pts(key):
        return [
            p if isinstance((p := complex_from_json(o)), SpherePoint) else p
            for o in doc[key]
        ]

    source = CirclePattern(disk, pts("source_positions"))
    target = CirclePattern(disk, pts("target_positions"))
    maps = []
    for m in doc["matrices"]:
        entries = [complex_from_json(e) for row in m for e in row]
        if any(isinstance(e, SpherePoint) for e in entries):
            raise HoronetError("matrix entries cannot be infinite")
        maps.append(MoebiusMap(*entries))
    return MoebiusFrame(source, target, tuple(maps), lift=doc.get("lift", "projective"))


def net_report(net: HorosphericalNet, kind: str = "cmc1") -> dict:
    net.require_measured()
    edges = []
    for (i, j) in sorted(net.edge_measure):
        m = net.edge_measure[(i, j)]
        edges.append(
            {
                "i": i,
                "j": j,
                "ell": m.ell,
                "alpha": m.alpha,
                "theta": m.theta,
                "degenerate": m.degenerate,
            }
        )
    faces = []
    for v in sorted(net.area):
        faces.append(
            {
                "vertex": v,
                "area": net.area[v],
                "H": net.mean_curvature[v],
                "ratio": net.ratio.get(v, math.nan),
            }
        )
    return {
        "kind": kind,
        "degenerate": net.degenerate,
        "edges": edges,
        "dual_faces": faces,
        "incidence_residual": net.incidence_residual,
        "chart_residual": net.chart_residual,
    }


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def export_net_obj(net: HorosphericalNet, arc_samples: int = 16) -> str:
    """OBJ with vertices in Poincare ball coordinates.

    Edges become ``l`` polylines sampled along their arcs; the dual face of
    each interior primal vertex becomes a fan of triangles sampled in its
    chart and mapped back.  Deterministic ordering throughout.
    """
    net.require_measured()
    disk = net.disk
    lines = ["# horospherical net"]
    vertex_count = 0
    face_points = {}

    def emit(x):
        nonlocal vertex_count
        bx, by, bz = to_poincare_ball(x)
        lines.append(f"v {_fmt(bx)} {_fmt(by)} {_fmt(bz)}")
        vertex_count += 1
        return vertex_count

    for fidx in range(disk.n_faces):
        face_points[fidx] = emit(net.f[fidx])

    if net.degenerate:
        lines.append("# degenerate net: all dual vertices coincide")
        return "\n".join(lines) + "\n"

    polylines = []
    patches = []
    for v in disk.interior_vertices:
        chart = _chart(net, v)
        inverse = chart.map.inverse()
        ring = disk.ring_ccw(v)
        faces = disk.vertex_faces_ccw(v)
        n = len(ring)
        boundary_ids = []
        for m in range(n):
            w_a = chart.w_face[faces[m]]
            w_b = chart.w_face[faces[(m + 1) % n]]
            j = ring[(m + 1) % n]
            samples = _arc_samples(net, chart, j, w_a, w_b, arc_samples)
            ids = [face_points[faces[m]]]
            for w in samples[1:-1]:
                ids.append(emit(act_on_hermitian(inverse, from_upper_half_space(w, 1.0))))
            ids.append(face_points[faces[(m + 1) % n]])
            polylines.append(ids)
            boundary_ids.extend(ids[:-1])
        centroid = sum(chart.w_face[f] for f in faces) / n
        cid = emit(act_on_hermitian(inverse, from_upper_half_space(centroid, 1.0)))
        for a, b in zip(boundary_ids, boundary_ids[1:] + boundary_ids[:1]):
            patches.append((cid, a, b))
    for ids in polylines:
        lines.append("l " + " ".join(str(i) for i in ids))
    for (a, b, c) in patches:
        lines.append(f"f {a} {b} {c}")
    return "\n".join(lines) + "\n"


def _arc_samples(net, chart, j, w_a, w_b, count):
    if count <= 1 or abs(w_a - w_b) < 1e-14:
        return [w_a, w_b]
    is_plane, center, r_tilde, _ = _neighbor_circle(net, chart, j)
    if is_plane:
        return [w_a + (w_b - w_a) * m / count for m in range(count + 1)]
    phi = cmath.phase((w_b - center) / (w_a - center))
    return [
        center + (w_a - center) * cmath.exp(1j * phi * m / count)
        for m in range(count + 1)
    ]


def export_net_ply(net: HorosphericalNet, arc_samples: int = 16) -> str:
    """ASCII PLY of the same sampled geometry as the OBJ exporter."""
    obj = export_net_obj(net, arc_samples)
    verts = []
    tris = []
    for line in obj.splitlines():
        if line.startswith("v "):
            verts.append(line.split()[1:])
        elif line.startswith("f "):
            tris.append([int(s) - 1 for s in line.split()[1:]])
    head = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(verts)}",
        "property double x",
        "property double y",
        "property double z",
        f"element face {len(tris)}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    body = [" ".join(v) for v in verts] + [
        "3 " + " ".join(str(i) for i in t) for t in tris
    ]
    return "\n".join(head + body) + "\n"


def export_points_obj(points, edges=None) -> str:
    """OBJ of a point set in R^3 with optional straight edges."""
    lines = ["# trivalent surface"]
    for (x, y, z) in points:
        lines.append(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}")
    for (a, b) in edges or []:
        lines.append(f"l {a + 1} {b + 1}")
    return "\n".join(lines) + "\n"


@dataclass
class RunManifest:
    subcommand: str
    inputs: dict = field(default_factory=dict)  # path -> sha256
    tolerances: dict = field(default_factory=dict)
    seed_face: int | None = None
    version: str = VERSION
    timestamp: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "RunManifest":
        return RunManifest(**json.loads(text))


def file_hash(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        digest.update(handle.read())
    return digest.hexdigest()


def dump_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
