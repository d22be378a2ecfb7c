"""Riemann-sphere points, SL(2,C) Moebius maps, and the Hermitian model of H^3.

Conventions fixed here and used everywhere downstream:

* Sphere points are homogeneous pairs (p, q); infinity is q = 0.  All
  arithmetic stays homogeneous, affine values are extracted only at API
  edges.
* A Hermitian matrix [[a, b], [conj(b), d]] encodes the Minkowski vector
  (x0, x1, x2, x3) = ((a+d)/2, Re b, Im b, (a-d)/2), with bilinear form
  <U, V> = -1/2 trace(U cof(V)).  Hyperbolic space is det = 1, trace > 0.
* Horosphere incidence uses -<x, U> = 1 (the sign making the r = 1
  horospheres pass through the ball center I).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import (
    CoincidentPoints,
    DegenerateTriple,
    NonpositiveRadius,
    NotInHyperboloid,
    SingularMatrix,
)

TOL_ALGEBRAIC = 1e-12
TOL_GEOMETRIC = 1e-10
TOL_HERMITIAN = 1e-13

_INF_TOKENS = ("inf", "Inf", "INF", "oo")


@dataclass(frozen=True)
class SpherePoint:
    """Point of the Riemann sphere as a homogeneous pair, max(|p|,|q|) = 1."""

    p: complex
    q: complex

    @staticmethod
    def from_homogeneous(p: complex, q: complex) -> "SpherePoint":
        p, q = complex(p), complex(q)
        s = max(abs(p), abs(q))
        if s == 0.0 or not (math.isfinite(s)):
            raise CoincidentPoints("homogeneous pair must be finite and nonzero")
        return SpherePoint(p / s, q / s)

    @staticmethod
    def of(value) -> "SpherePoint":
        if isinstance(value, SpherePoint):
            return value
        if isinstance(value, str):
            if value in _INF_TOKENS:
                return SpherePoint(1.0 + 0.0j, 0.0j)
            raise CoincidentPoints(f"not a sphere point: {value!r}")
        if value is None:
            raise CoincidentPoints("not a sphere point: None")
        return SpherePoint.from_homogeneous(complex(value), 1.0 + 0.0j)

    @staticmethod
    def infinity() -> "SpherePoint":
        return SpherePoint(1.0 + 0.0j, 0.0j)

    @property
    def is_infinity(self) -> bool:
        return self.q == 0

    def value(self) -> complex:
        """Affine value p/q; raises on the point at infinity."""
        if self.q == 0:
            raise CoincidentPoints("affine value of the point at infinity")
        return self.p / self.q

    def chordal(self, other: "SpherePoint") -> float:
        """Chordal (Fubini-Study) distance, zero iff projectively equal."""
        num = abs(self.p * other.q - self.q * other.p)
        na = math.hypot(abs(self.p), abs(self.q))
        nb = math.hypot(abs(other.p), abs(other.q))
        return num / (na * nb)

    def __repr__(self):
        if self.is_infinity:
            return "SpherePoint(inf)"
        return f"SpherePoint({self.value()!r})"


def det2(a: SpherePoint, b: SpherePoint) -> complex:
    """Determinant of the two homogeneous columns; vanishes iff a = b."""
    return a.p * b.q - a.q * b.p


@dataclass(frozen=True)
class MoebiusMap:
    """Unit-determinant 2x2 complex matrix acting projectively on the sphere."""

    a: complex
    b: complex
    c: complex
    d: complex

    @staticmethod
    def from_entries(a, b, c, d) -> "MoebiusMap":
        """Normalize det to 1 (principal square root of the determinant)."""
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        if det == 0 or not math.isfinite(abs(det)):
            raise SingularMatrix("matrix is singular or non-finite")
        s = cmath.sqrt(det)
        return MoebiusMap(a / s, b / s, c / s, d / s)

    @staticmethod
    def identity() -> "MoebiusMap":
        return MoebiusMap(1 + 0j, 0j, 0j, 1 + 0j)

    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def trace(self) -> complex:
        return self.a + self.d

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """Matrix product self @ other (apply other first)."""
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusMap":
        # adjugate works since det = 1
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def negate(self) -> "MoebiusMap":
        return MoebiusMap(-self.a, -self.b, -self.c, -self.d)

    def apply(self, z: SpherePoint) -> SpherePoint:
        return SpherePoint.from_homogeneous(
            self.a * z.p + self.b * z.q, self.c * z.p + self.d * z.q
        )

    def __call__(self, z) -> SpherePoint:
        return self.apply(SpherePoint.of(z))

    def frobenius_distance(self, other: "MoebiusMap") -> float:
        return math.sqrt(
            abs(self.a - other.a) ** 2
            + abs(self.b - other.b) ** 2
            + abs(self.c - other.c) ** 2
            + abs(self.d - other.d) ** 2
        )

    def projective_distance(self, other: "MoebiusMap") -> float:
        """Frobenius distance to the closer of +/- other."""
        return min(
            self.frobenius_distance(other),
            self.frobenius_distance(other.negate()),
        )

    def canonical_sign(self) -> "MoebiusMap":
        """Fix +/-: first nonzero entry in row-major order gets Arg in (-pi/2, pi/2]."""
        scale = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        for e in self.entries():
            if abs(e) > 1e-14 * scale:
                phi = cmath.phase(e)
                if phi <= -math.pi / 2 or phi > math.pi / 2:
                    return self.negate()
                return self
        return self


def _projective_frame(z1: SpherePoint, z2: SpherePoint, z3: SpherePoint):
    """Matrix (up to scale) sending 0, 1, inf to z1, z2, z3."""
    c1 = det2(z3, z2)  # weight on z1 column
    c3 = det2(z2, z1)  # weight on z3 column
    # columns: [c3*z3 | c1*z1]; maps (1,0)->z3, (0,1)->z1, (1,1)->z2
    a = c3 * z3.p
    c = c3 * z3.q
    b = c1 * z1.p
    d = c1 * z1.q
    det = a * d - b * c
    if abs(det) <= 1e-28:
        raise DegenerateTriple("triple is projectively degenerate")
    return a, b, c, d


def mobius_from_triples(z1, z2, z3, w1, w2, w3) -> MoebiusMap:
    """Unique Moebius map sending z1, z2, z3 to w1, w2, w3, det 1, canonical sign."""
    z1, z2, z3 = SpherePoint.of(z1), SpherePoint.of(z2), SpherePoint.of(z3)
    w1, w2, w3 = SpherePoint.of(w1), SpherePoint.of(w2), SpherePoint.of(w3)
    fa, fb, fc, fd = _projective_frame(z1, z2, z3)
    ga, gb, gc, gd = _projective_frame(w1, w2, w3)
    # G @ adj(F)
    a = ga * fd + gb * (-fc)
    b = ga * (-fb) + gb * fa
    c = gc * fd + gd * (-fc)
    d = gc * (-fb) + gd * fa
    return MoebiusMap.from_entries(a, b, c, d).canonical_sign()


def edge_cross_ratio(z_k, z_i, z_l, z_j) -> complex:
    """Cross ratio -[(zi-zk)(zj-zl)] / [(zi-zl)(zj-zk)] via 2x2 determinants.

    The argument order matches the pattern convention: k is the apex of the
    left face of the oriented edge i -> j, l the apex of the right face.
    """
    z_k, z_i = SpherePoint.of(z_k), SpherePoint.of(z_i)
    z_l, z_j = SpherePoint.of(z_l), SpherePoint.of(z_j)
    num = det2(z_k, z_i) * det2(z_l, z_j)
    den = det2(z_i, z_l) * det2(z_j, z_k)
    if abs(den) == 0 or abs(num) == 0:
        raise CoincidentPoints("cross ratio of a degenerate quadruple")
    return -num / den


@dataclass(frozen=True)
class HermitianPoint:
    """Hermitian matrix [[a, b], [conj(b), d]] as a vector of R^{3,1}."""

    a: float
    b: complex
    d: float

    @staticmethod
    def from_matrix(a, b, c, d, tol: float = TOL_HERMITIAN) -> "HermitianPoint":
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        scale = max(abs(a), abs(b), abs(c), abs(d), 1.0)
        if (
            abs(a.imag) > tol * scale
            or abs(d.imag) > tol * scale
            or abs(b - c.conjugate()) > tol * scale
        ):
            raise NotInHyperboloid("matrix is not Hermitian within tolerance")
        return HermitianPoint(a.real, (b + c.conjugate()) / 2.0, d.real)

    @staticmethod
    def identity() -> "HermitianPoint":
        return HermitianPoint(1.0, 0.0j, 1.0)

    @staticmethod
    def from_minkowski(x0, x1, x2, x3) -> "HermitianPoint":
        return HermitianPoint(x0 + x3, complex(x1, x2), x0 - x3)

    def minkowski(self):
        return (
            (self.a + self.d) / 2.0,
            self.b.real,
            self.b.imag,
            (self.a - self.d) / 2.0,
        )

    def det(self) -> float:
        return self.a * self.d - abs(self.b) ** 2

    def trace(self) -> float:
        return self.a + self.d

    def scale(self, s: float) -> "HermitianPoint":
        return HermitianPoint(self.a * s, self.b * s, self.d * s)

    def add(self, other: "HermitianPoint") -> "HermitianPoint":
        return HermitianPoint(self.a + other.a, self.b + other.b, self.d + other.d)

    def is_hyperboloid(self, tol: float = TOL_GEOMETRIC) -> bool:
        return abs(self.det() - 1.0) <= tol and self.trace() > 0

    def is_light_cone(self, tol: float = TOL_GEOMETRIC) -> bool:
        norm = max(abs(self.a), abs(self.b), abs(self.d), 1.0)
        return abs(self.det()) <= tol * norm * norm and self.trace() > 0


def inner(u: HermitianPoint, v: HermitianPoint) -> float:
    """Minkowski bilinear form <U, V> = -1/2 trace(U cof(V)); <U,U> = -det U."""
    return -(u.a * v.d + u.d * v.a - 2.0 * (u.b * v.b.conjugate()).real) / 2.0


def act_on_hermitian(m: MoebiusMap, u: HermitianPoint) -> HermitianPoint:
    """Isometric action U -> M U M* on the Hermitian model."""
    ma, mb, mc, md = m.a, m.b, m.c, m.d
    bb = u.b.conjugate()
    # rows of M @ U
    r11 = ma * u.a + mb * bb
    r12 = ma * u.b + mb * u.d
    r21 = mc * u.a + md * bb
    r22 = mc * u.b + md * u.d
    a = (r11 * ma.conjugate() + r12 * mb.conjugate()).real
    b = r11 * mc.conjugate() + r12 * md.conjugate()
    d = (r21 * mc.conjugate() + r22 * md.conjugate()).real
    return HermitianPoint(a, b, d)


@dataclass(frozen=True)
class Horosphere:
    """Light-cone Hermitian point; tangency and size are derived views."""

    u: HermitianPoint

    @property
    def tangency(self) -> SpherePoint:
        # columns of U are multiples of the tangency pair (p, q)
        col1 = (self.u.a, self.u.b.conjugate())
        col2 = (self.u.b, self.u.d)
        if abs(col1[0]) + abs(col1[1]) >= abs(col2[0]) + abs(col2[1]):
            return SpherePoint.from_homogeneous(col1[0], col1[1])
        return SpherePoint.from_homogeneous(col2[0], col2[1])

    @property
    def size(self) -> float:
        """Parameter r of N_{z,r}; equals half the trace."""
        return self.u.trace() / 2.0

    def offset(self, t: float) -> "Horosphere":
        """Parallel horosphere at signed distance t toward the tangency point."""
        return Horosphere(self.u.scale(math.exp(t)))


def horosphere(z, r: float) -> Horosphere:
    """Horosphere N_{z,r} touching the boundary sphere at z."""
    if not (r > 0):
        raise NonpositiveRadius(f"horosphere size must be positive, got {r}")
    z = SpherePoint.of(z)
    n2 = abs(z.p) ** 2 + abs(z.q) ** 2
    s = 2.0 * r / n2
    return Horosphere(
        HermitianPoint(s * abs(z.p) ** 2, s * z.p * z.q.conjugate(), s * abs(z.q) ** 2)
    )


def on_horosphere(x: HermitianPoint, h: Horosphere, tol: float = TOL_GEOMETRIC):
    """Incidence test -<x, U> = 1; returns (bool, residual)."""
    if not x.is_hyperboloid(1e-8):
        raise NotInHyperboloid("incidence test requires a hyperboloid point")
    residual = abs(-inner(x, h.u) - 1.0)
    return residual <= tol, residual


def hyperbolic_distance(x: HermitianPoint, y: HermitianPoint) -> float:
    if not x.is_hyperboloid(1e-8) or not y.is_hyperboloid(1e-8):
        raise NotInHyperboloid("distance requires hyperboloid points")
    c = -inner(x, y)
    if c < 1.0 - TOL_GEOMETRIC:
        raise NotInHyperboloid(f"pairing -<x,y> = {c} below 1")
    return math.acosh(max(c, 1.0))


def to_poincare_ball(x: HermitianPoint):
    if not x.is_hyperboloid(1e-8):
        raise NotInHyperboloid("ball coordinates require a hyperboloid point")
    x0, x1, x2, x3 = x.minkowski()
    s = 1.0 + x0
    return (x1 / s, x2 / s, x3 / s)


def from_poincare_ball(v) -> HermitianPoint:
    x1, x2, x3 = v
    r2 = x1 * x1 + x2 * x2 + x3 * x3
    if r2 >= 1.0:
        raise NotInHyperboloid("point outside the open unit ball")
    s = 1.0 - r2
    return HermitianPoint.from_minkowski(
        (1.0 + r2) / s, 2.0 * x1 / s, 2.0 * x2 / s, 2.0 * x3 / s
    )


def to_upper_half_space(x: HermitianPoint):
    """Coordinates (w, t), w complex, t > 0, of a hyperboloid point."""
    if x.d <= 0:
        raise NotInHyperboloid("upper-half-space chart needs positive (2,2) entry")
    det = x.det()
    if det <= 0:
        raise NotInHyperboloid("not a hyperboloid direction")
    return x.b / x.d, math.sqrt(det) / x.d


def from_upper_half_space(w: complex, t: float) -> HermitianPoint:
    if not (t > 0):
        raise NotInHyperboloid("height must be positive")
    return HermitianPoint((abs(w) ** 2 + t * t) / t, w / t, 1.0 / t)
