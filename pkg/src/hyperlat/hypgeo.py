"""Poincare-disc geometry at curvature -1.

Points are complex numbers in the open unit disc.  Public operations accept
either :class:`DiscPoint` or plain ``complex`` and return ``DiscPoint``; the
``*_z`` helpers work on raw complex values and are what the lattice builder
uses in its inner loops.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

BOUNDARY_EPS = 1e-9


class BoundaryError(ValueError):
    """A point lies on, outside, or too close to the unit circle."""


class NonHyperbolicError(ValueError):
    """A {p,q} pair does not tile the hyperbolic plane."""


@dataclass(frozen=True)
class DiscPoint:
    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not abs(z) < 1.0 - BOUNDARY_EPS:
            raise BoundaryError(f"|z| = {abs(z):.12g} is not inside the disc (limit 1 - {BOUNDARY_EPS:g})")
        object.__setattr__(self, "z", z)

    def __complex__(self):
        return self.z


Pointlike = Union[DiscPoint, complex, float]


def _z(p: Pointlike) -> complex:
    if isinstance(p, DiscPoint):
        return p.z
    z = complex(p)
    if not abs(z) < 1.0 - BOUNDARY_EPS:
        raise BoundaryError(f"|z| = {abs(z):.12g} is not inside the disc (limit 1 - {BOUNDARY_EPS:g})")
    return z


@dataclass(frozen=True)
class CurvatureScale:
    R: float = 1.0

    @property
    def K(self) -> float:
        return -1.0 / self.R**2


# --------------------------------------------------------------------------
# metric

def hyp_distance_z(a: complex, b: complex) -> float:
    # 2 artanh(|a-b| / |1 - conj(a) b|); same value as the arccosh form but
    # without cancellation for nearby points.
    num = abs(a - b)
    if num == 0.0:
        return 0.0
    den = abs(1.0 - a.conjugate() * b)
    return 2.0 * math.atanh(min(num / den, 1.0))


def hyp_distance(a: Pointlike, b: Pointlike) -> float:
    """Hyperbolic distance between two disc points, in units of R."""
    return hyp_distance_z(_z(a), _z(b))


def disc_radius(d: float) -> float:
    """Euclidean radius of a point at hyperbolic distance ``d`` from the origin."""
    return math.tanh(d / 2.0)


def midpoint_z(a: complex, b: complex) -> complex:
    """Hyperbolic midpoint of the segment ab."""
    # move a to the origin, halve the distance along the ray, move back
    w = (b - a) / (1.0 - a.conjugate() * b)
    r = abs(w)
    if r == 0.0:
        return a
    m = w / r * math.tanh(math.atanh(r) / 2.0)
    return (m + a) / (1.0 + a.conjugate() * m)


def hyp_midpoint(a: Pointlike, b: Pointlike) -> DiscPoint:
    return DiscPoint(midpoint_z(_z(a), _z(b)))


# --------------------------------------------------------------------------
# {p,q} trigonometry

def _check_pq(p: int, q: int) -> None:
    if p < 3 or q < 3:
        raise NonHyperbolicError(f"{{{p},{q}}}: polygons need p, q >= 3")
    k = (p - 2) * (q - 2)
    if k == 4:
        raise NonHyperbolicError(f"{{{p},{q}}} is a Euclidean tiling ((p-2)(q-2) = 4), not hyperbolic")
    if k < 4:
        raise NonHyperbolicError(f"{{{p},{q}}} is a spherical tiling ((p-2)(q-2) < 4), not hyperbolic")


def tile_edge_length(p: int, q: int = 3) -> float:
    """Edge length of the regular {p,q} tile; cosh(s/2) = cos(pi/p) / sin(pi/q)."""
    _check_pq(p, q)
    return 2.0 * math.acosh(math.cos(math.pi / p) / math.sin(math.pi / q))


def circumradius(p: int, q: int = 3) -> float:
    """Centre-to-vertex distance of the regular {p,q} tile; cosh R = cot(pi/p) cot(pi/q)."""
    _check_pq(p, q)
    return math.acosh(1.0 / (math.tan(math.pi / p) * math.tan(math.pi / q)))


def inradius(p: int, q: int = 3) -> float:
    """Centre-to-edge-midpoint distance; cosh r = cos(pi/q) / sin(pi/p)."""
    _check_pq(p, q)
    return math.acosh(math.cos(math.pi / q) / math.sin(math.pi / p))


def medial_spacing(p: int, q: int = 3) -> float:
    """Distance between midpoints of two tile edges meeting at a vertex.

    Law of cosines in the triangle (midpoint, vertex, midpoint) whose apex
    angle is the tile's interior angle 2*pi/q.
    """
    half = tile_edge_length(p, q) / 2.0
    c = math.cosh(half) ** 2 - math.sinh(half) ** 2 * math.cos(2.0 * math.pi / q)
    return math.acosh(c)


# --------------------------------------------------------------------------
# geodesics and reflections

@dataclass(frozen=True)
class Geodesic:
    """Either a diameter (``direction`` set) or an arc orthogonal to the unit circle.

    Internally every geodesic also carries a point on it (``anchor``) and its
    unit tangent there as seen after translating the anchor to the origin
    (``axis``); reflections are computed in that frame, which stays accurate
    for nearly straight arcs with huge radii.
    """

    center: Optional[complex] = None
    radius: Optional[float] = None
    direction: Optional[complex] = None
    anchor: Optional[complex] = field(default=None, repr=False, compare=False)
    axis: Optional[complex] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.direction is not None:
            if self.center is not None or self.radius is not None:
                raise ValueError("a diameter has no centre/radius")
            u = complex(self.direction)
            if abs(u) == 0.0:
                raise ValueError("diameter direction must be non-zero")
            object.__setattr__(self, "direction", u / abs(u))
            if self.anchor is None:
                object.__setattr__(self, "anchor", 0j)
                object.__setattr__(self, "axis", u / abs(u))
            return
        if self.center is None or self.radius is None or not self.radius > 0:
            raise ValueError("arc geodesic needs a centre and a positive radius")
        c = complex(self.center)
        if abs(abs(c) ** 2 - 1.0 - self.radius**2) > 1e-12 * max(1.0, abs(c) ** 2):
            raise ValueError("circle is not orthogonal to the unit circle")
        object.__setattr__(self, "center", c)
        if self.anchor is None:
            # point of the arc closest to the origin; |c| - rho = 1 / (|c| + rho)
            u = c / abs(c)
            object.__setattr__(self, "anchor", u / (abs(c) + self.radius))
            object.__setattr__(self, "axis", 1j * u)

    @property
    def is_diameter(self) -> bool:
        return self.direction is not None

    @classmethod
    def through(cls, a: Pointlike, b: Pointlike) -> "Geodesic":
        """The unique geodesic through two distinct disc points."""
        a, b = _z(a), _z(b)
        if a == b:
            raise ValueError("a geodesic needs two distinct points")
        w = (b - a) / (1.0 - a.conjugate() * b)
        axis = w / abs(w)
        # ideal endpoints: images of +-axis under the translation 0 -> a
        p1 = (axis + a) / (1.0 + a.conjugate() * axis)
        p2 = (-axis + a) / (1.0 - a.conjugate() * axis)
        den = 1.0 + (p1 * p2.conjugate()).real
        if den < 1e-15:
            return cls(direction=p1, anchor=a, axis=axis)
        c = (p1 + p2) / den
        return cls(center=c, radius=math.sqrt(max(abs(c) ** 2 - 1.0, 0.0)), anchor=a, axis=axis)

    def contains(self, p: Pointlike, tol: float = 1e-12) -> bool:
        z = _z(p)
        w = (z - self.anchor) / (1.0 - self.anchor.conjugate() * z)
        return abs((w * self.axis.conjugate()).imag) <= tol

    def tangent(self, p: Pointlike) -> complex:
        """Unit tangent of the geodesic at a point on it (sign arbitrary)."""
        z = _z(p)
        if self.is_diameter:
            return self.direction
        r = z - self.center
        return 1j * r / abs(r)


def reflect_z(z: complex, g: Geodesic) -> complex:
    a, u = g.anchor, g.axis
    if a == 0:
        return u * u * z.conjugate()
    w = (z - a) / (1.0 - a.conjugate() * z)
    w = u * u * w.conjugate()
    return (w + a) / (1.0 + a.conjugate() * w)


def reflect(point: Pointlike, g: Geodesic) -> DiscPoint:
    """Reflect a disc point in a geodesic; the image must stay inside the disc."""
    return DiscPoint(reflect_z(_z(point), g))


# --------------------------------------------------------------------------
# Mobius maps

@dataclass(frozen=True)
class MobiusMap:
    """z -> (a w + b) / (conj(b) w + conj(a)), w = conj(z) if ``conj`` else z.

    Normalized so |a|^2 - |b|^2 = 1.
    """

    a: complex = 1.0
    b: complex = 0.0
    conj: bool = False

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        det = abs(a) ** 2 - abs(b) ** 2
        if not det > 1e-300:
            raise ValueError(f"degenerate disc automorphism (|a|^2 - |b|^2 = {det:g})")
        s = math.sqrt(det)
        object.__setattr__(self, "a", a / s)
        object.__setattr__(self, "b", b / s)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.b.conjugate(), self.a.conjugate()]])

    @property
    def det(self) -> float:
        return abs(self.a) ** 2 - abs(self.b) ** 2

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls()

    @classmethod
    def rotation(cls, theta: float) -> "MobiusMap":
        return cls(cmath.exp(0.5j * theta), 0.0)

    @classmethod
    def translation(cls, w: Pointlike) -> "MobiusMap":
        """Hyperbolic translation taking the origin to ``w``."""
        w = _z(w)
        return cls(1.0, w)

    @classmethod
    def reflection(cls, g: Geodesic) -> "MobiusMap":
        """Orientation-reversing map fixing ``g`` pointwise."""
        t = cls.translation(g.anchor) if g.anchor != 0 else cls()
        return t @ cls(g.axis, 0.0, conj=True) @ t.inverse()

    def __call__(self, z: complex) -> complex:
        w = z.conjugate() if self.conj else z
        return (self.a * w + self.b) / (self.b.conjugate() * w + self.a.conjugate())

    def inverse(self) -> "MobiusMap":
        if not self.conj:
            return MobiusMap(self.a.conjugate(), -self.b)
        # z = conj(M^-1 w)
        return MobiusMap(self.a, -self.b.conjugate(), conj=True)

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return mobius_compose(self, other)


def mobius_compose(m1: MobiusMap, m2: MobiusMap) -> MobiusMap:
    """The map z -> m1(m2(z))."""
    a2, b2 = m2.a, m2.b
    if m1.conj:
        a2, b2 = a2.conjugate(), b2.conjugate()
    a = m1.a * a2 + m1.b * b2.conjugate()
    b = m1.a * b2 + m1.b * a2.conjugate()
    return MobiusMap(a, b, conj=m1.conj != m2.conj)


def mobius_apply(m: MobiusMap, point: Pointlike) -> DiscPoint:
    return DiscPoint(m(_z(point)))


def polygon_vertices(p: int, q: int = 3, phase: float = 0.0) -> list[complex]:
    """Vertices of the regular {p,q} tile centred on the origin, counter-clockwise."""
    r = disc_radius(circumradius(p, q))
    return [r * cmath.exp(1j * (phase + 2.0 * math.pi * k / p)) for k in range(p)]


def vertex_angle(prev: complex, vertex: complex, nxt: complex) -> float:
    """Interior angle at ``vertex`` between the geodesics to its two neighbours."""
    t1 = _outgoing(vertex, prev)
    t2 = _outgoing(vertex, nxt)
    return abs(cmath.phase(t2 / t1))


def _outgoing(z: complex, towards: complex) -> complex:
    g = Geodesic.through(z, towards)
    t = g.tangent(z)
    # orient the tangent along the direction of travel to ``towards``
    if ((towards - z) * t.conjugate()).real < 0:
        t = -t
    return t
