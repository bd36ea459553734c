"""Hyperbolic plane primitives in the upper half-plane model.

Points are ``Point(u, v)`` with ``v > 0``. Ideal boundary points are plain
floats, with ``math.inf`` standing for the point at infinity. Geodesics are
unordered endpoint pairs stored in sorted order (infinity last).

Isometries are unit-determinant real 2x2 matrices acting by Mobius maps,
identified with their negatives. Rotations are clockwise by convention; the
mirror convention yields the mirror tiling and nothing downstream changes.

The Poincare disk and Klein disk charts used elsewhere are centred on the
basepoint ``i`` via the Cayley transform ``z -> (z - i) / (z + i)``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

INFINITY = math.inf

EPS_MAT = 1e-9
EPS_TR = 1e-9
EPS_PT = 1e-7
DET_TOL = 1e-12


class GeomError(Exception):
    pass


class NonHyperbolicElement(GeomError):
    pass


class IdenticalGeodesics(GeomError):
    pass


class PointNotOnBoth(GeomError):
    pass


@dataclass(frozen=True)
class Point:
    u: float
    v: float

    def __post_init__(self):
        if not (self.v > 0 and math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError(f"not a point of the upper half-plane: ({self.u}, {self.v})")

    @classmethod
    def from_complex(cls, z: complex) -> Point:
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(self.u, self.v)


BASEPOINT = Point(0.0, 1.0)


def boundary_angle(x: float) -> float:
    """Angle in [0, 2pi) of the ideal point ``x`` on the disk-model circle."""
    return (-2.0 * math.atan2(1.0, x)) % (2.0 * math.pi)


def boundary_from_angle(phi: float) -> float:
    """Inverse of :func:`boundary_angle`."""
    w = cmath.exp(1j * phi)
    if abs(1.0 - w) < 1e-300:
        return INFINITY
    # i(1+w)/(1-w) is real on the circle
    return (1j * (1.0 + w) / (1.0 - w)).real


def chordal(x: float, y: float) -> float:
    """Chordal distance between two ideal points on the unit circle."""
    return 2.0 * abs(math.sin(0.5 * (boundary_angle(x) - boundary_angle(y))))


@dataclass(frozen=True)
class Geodesic:
    """Complete geodesic, canonical endpoints ``e1 < e2`` (infinity last)."""

    e1: float
    e2: float

    def __post_init__(self):
        if math.isnan(self.e1) or math.isnan(self.e2) or self.e1 == -INFINITY or self.e2 == -INFINITY:
            raise ValueError("endpoints must be real or +inf")
        if self.e1 > self.e2:
            a, b = self.e2, self.e1
            object.__setattr__(self, "e1", a)
            object.__setattr__(self, "e2", b)
        if chordal(self.e1, self.e2) <= EPS_PT:
            raise ValueError(f"degenerate geodesic ({self.e1}, {self.e2})")

    @property
    def vertical(self) -> bool:
        return self.e2 == INFINITY

    @cached_property
    def angles(self) -> tuple[float, float]:
        return boundary_angle(self.e1), boundary_angle(self.e2)

    def klein_chord(self) -> tuple[complex, complex]:
        a, b = self.angles
        return cmath.exp(1j * a), cmath.exp(1j * b)

    def same_as(self, other: Geodesic, tol: float = EPS_PT) -> bool:
        d1 = chordal(self.e1, other.e1) + chordal(self.e2, other.e2)
        d2 = chordal(self.e1, other.e2) + chordal(self.e2, other.e1)
        return min(d1, d2) <= 2 * tol

    def tangent_at(self, p: Point) -> complex:
        """Unit Euclidean tangent direction at ``p`` (assumed on the line)."""
        if self.vertical:
            return 1j
        # tangent is perpendicular to the radius from the centre
        t = complex(-p.v, p.u - 0.5 * (self.e1 + self.e2))
        return t / abs(t)


class IsometryKind(enum.Enum):
    IDENTITY = "IDENTITY"
    ELLIPTIC = "ELLIPTIC"
    PARABOLIC = "PARABOLIC"
    HYPERBOLIC = "HYPERBOLIC"


@dataclass(frozen=True)
class IsometryClass:
    kind: IsometryKind
    angle: float | None = None
    translation_length: float | None = None


@dataclass(frozen=True)
class Isometry:
    """Orientation-preserving isometry ``z -> (a z + b) / (c z + d)``."""

    a: float
    b: float
    c: float
    d: float
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        scale = max(1.0, self.a**2 + self.b**2 + self.c**2 + self.d**2)
        if self.check and abs(det - 1.0) > DET_TOL * scale:
            raise ValueError(f"determinant {det!r} is not 1")
        for x in (self.a, self.b, self.c, self.d):
            if abs(x) > 1e-15:
                if x < 0:
                    for name in "abcd":
                        object.__setattr__(self, name, -getattr(self, name))
                break

    @classmethod
    def identity(cls) -> Isometry:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, m, normalize: bool = False) -> Isometry:
        (a, b), (c, d) = m
        if normalize:
            det = a * d - b * c
            if det <= 0:
                raise ValueError("matrix must have positive determinant")
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        return cls(float(a), float(b), float(c), float(d))

    @property
    def matrix(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.a, self.b), (self.c, self.d))

    @property
    def trace(self) -> float:
        return self.a + self.d

    def __matmul__(self, other: Isometry) -> Isometry:
        return Isometry(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            check=False,
        )

    def inverse(self) -> Isometry:
        return Isometry(self.d, -self.b, -self.c, self.a, check=False)

    def __pow__(self, n: int) -> Isometry:
        base = self if n >= 0 else self.inverse()
        result = Isometry.identity()
        for _ in range(abs(n)):
            result = result @ base
        return result

    def distance(self, other: Isometry) -> float:
        """Matrix distance in the sign quotient."""
        m = (self.a, self.b, self.c, self.d)
        o = (other.a, other.b, other.c, other.d)
        plus = math.sqrt(sum((x - y) ** 2 for x, y in zip(m, o)))
        minus = math.sqrt(sum((x + y) ** 2 for x, y in zip(m, o)))
        return min(plus, minus)

    def is_identity(self, tol: float = EPS_MAT) -> bool:
        return self.distance(Isometry.identity()) <= tol

    def __call__(self, p: Point) -> Point:
        z = p.z
        w = (self.a * z + self.b) / (self.c * z + self.d)
        return Point(w.real, w.imag)

    def apply_boundary(self, x: float) -> float:
        if x == INFINITY:
            n, m = self.a, self.c
        else:
            n, m = self.a * x + self.b, self.c * x + self.d
        if abs(m) <= 1e-15 * abs(n):
            return INFINITY
        return n / m

    def apply_geodesic(self, g: Geodesic) -> Geodesic:
        return Geodesic(self.apply_boundary(g.e1), self.apply_boundary(g.e2))


def hyperbolic_distance(a: Point, b: Point) -> float:
    # 2 asinh(|z-w| / (2 sqrt(v1 v2))) is the cancellation-free form of
    # cosh d = 1 + |z-w|^2 / (2 v1 v2)
    return 2.0 * math.asinh(abs(a.z - b.z) / (2.0 * math.sqrt(a.v * b.v)))


def translation_to(p: Point) -> Isometry:
    """The isometry ``z -> v z + u`` taking the basepoint ``i`` to ``p``."""
    s = math.sqrt(p.v)
    return Isometry(s, p.u / s, 0.0, 1.0 / s)


def rotation_about(center: Point, theta: float) -> Isometry:
    """Clockwise rotation through ``theta`` about ``center``."""
    if not 0.0 < theta < 2.0 * math.pi:
        raise ValueError(f"rotation angle {theta} outside (0, 2pi)")
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    rot = Isometry(c, -s, s, c, check=False)
    t = translation_to(center)
    return t @ rot @ t.inverse()


def elliptic_fixed_point(g: Isometry) -> Point:
    # c z^2 + (d - a) z - b = 0 with negative discriminant
    disc = (g.a + g.d) ** 2 - 4.0
    root = cmath.sqrt(disc)
    z = ((g.a - g.d) + root) / (2.0 * g.c)
    if z.imag < 0:
        z = ((g.a - g.d) - root) / (2.0 * g.c)
    return Point(z.real, z.imag)


def classify_isometry(g: Isometry, eps_mat: float = EPS_MAT, eps_tr: float = EPS_TR) -> IsometryClass:
    if g.is_identity(eps_mat):
        return IsometryClass(IsometryKind.IDENTITY)
    t = abs(g.trace)
    if t < 2.0 - eps_tr:
        w = elliptic_fixed_point(g)
        # derivative at the fixed point is exp(-i * clockwise angle)
        deriv = 1.0 / (g.c * w.z + g.d) ** 2
        angle = (-cmath.phase(deriv)) % (2.0 * math.pi)
        return IsometryClass(IsometryKind.ELLIPTIC, angle=angle)
    if t <= 2.0 + eps_tr:
        return IsometryClass(IsometryKind.PARABOLIC)
    return IsometryClass(IsometryKind.HYPERBOLIC, translation_length=2.0 * math.acosh(t / 2.0))


def fixed_boundary_points(g: Isometry) -> tuple[float, float]:
    """Real fixed points of a hyperbolic element (repelling order not kept)."""
    a, b, c, d = g.a, g.b, g.c, g.d
    disc = (a + d) ** 2 - 4.0
    if disc <= 0:
        raise NonHyperbolicElement("no real fixed points")
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if abs(c) <= 1e-14 * scale:
        return b / (d - a), INFINITY
    # c z^2 + (d - a) z - b = 0, stable root pair
    s = math.sqrt(disc)
    bq = d - a
    q = -0.5 * (bq + math.copysign(s, bq))
    r1 = q / c
    r2 = -b / q if q != 0 else (a - d) / c - r1
    return r1, r2


def axis_of(g: Isometry) -> Geodesic:
    if classify_isometry(g).kind is not IsometryKind.HYPERBOLIC:
        raise NonHyperbolicElement(f"isometry with trace {g.trace} has no axis")
    return Geodesic(*fixed_boundary_points(g))


def geodesics_interleave(a: Geodesic, b: Geodesic, tol: float = EPS_PT) -> bool:
    """Whether the endpoint pairs separate each other on the boundary circle."""
    if a.same_as(b, tol):
        raise IdenticalGeodesics(f"{a} and {b} coincide")
    for x in (a.e1, a.e2):
        for y in (b.e1, b.e2):
            if chordal(x, y) <= tol:
                return False
    a1, a2 = sorted(a.angles)
    inside = [a1 < t < a2 for t in b.angles]
    return inside[0] != inside[1]


def klein_to_point(k: complex) -> Point:
    r2 = min(abs(k) ** 2, 1.0)
    w = k / (1.0 + math.sqrt(1.0 - r2))
    z = 1j * (1.0 + w) / (1.0 - w)
    return Point(z.real, z.imag)


def point_to_disk(p: Point) -> complex:
    return (p.z - 1j) / (p.z + 1j)


def point_to_klein(p: Point) -> complex:
    w = point_to_disk(p)
    return 2.0 * w / (1.0 + abs(w) ** 2)


def chord_intersection(p1: complex, p2: complex, q1: complex, q2: complex) -> complex:
    """Intersection of the Euclidean lines p1p2 and q1q2."""
    dp, dq = p2 - p1, q2 - q1
    den = dp.real * dq.imag - dp.imag * dq.real
    w = q1 - p1
    s = (w.real * dq.imag - w.imag * dq.real) / den
    return p1 + s * dp


def geodesics_intersect(a: Geodesic, b: Geodesic, tol: float = EPS_PT) -> Point | None:
    """The unique crossing point of two geodesics, or ``None``."""
    if not geodesics_interleave(a, b, tol):
        return None
    k = chord_intersection(*a.klein_chord(), *b.klein_chord())
    return klein_to_point(k)


def distance_point_to_geodesic(p: Point, g: Geodesic) -> float:
    u, v = p.u, p.v
    if g.vertical:
        return math.asinh(abs(u - g.e1) / v)
    # sinh d = | |z - c|^2 - rho^2 | / (2 rho v)
    return math.asinh(abs((u - g.e1) * (u - g.e2) + v * v) / ((g.e2 - g.e1) * v))


def angle_at(p: Point, q1: Point, q2: Point) -> float:
    """Angle at ``p`` between the geodesic segments to ``q1`` and ``q2``."""
    # move p to the disk centre, where geodesics through it are diameters
    w1 = (q1.z - p.z) / (q1.z - p.z.conjugate())
    w2 = (q2.z - p.z) / (q2.z - p.z.conjugate())
    return abs(cmath.phase(w1 / w2))


def angle_between_at(a: Geodesic, b: Geodesic, p: Point, tol: float = EPS_PT) -> float:
    """Unoriented crossing angle of ``a`` and ``b`` at ``p``, in (0, pi/2].

    The other two corner angles at ``p`` are ``pi`` minus the returned value.
    """
    if distance_point_to_geodesic(p, a) > tol or distance_point_to_geodesic(p, b) > tol:
        raise PointNotOnBoth(f"{p} is not on both geodesics")
    ta, tb = a.tangent_at(p), b.tangent_at(p)
    cosine = abs(ta.real * tb.real + ta.imag * tb.imag)
    return math.acos(min(1.0, cosine))
