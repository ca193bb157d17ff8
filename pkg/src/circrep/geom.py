"""Inversive-geometry kernel.

Points, generalized circles (circles and lines), intersection
classification and orientation-preserving Mobius maps z -> (az+b)/(cz+d).

All tolerance decisions go through :func:`eps`, a single relative tolerance
scaled by the local geometric magnitude.  The default is 1e-9; the
``CREP_EPS`` environment variable or :func:`set_eps` override it.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .errors import CoincidentCircles, DegeneratePoints, NonpositiveRadius

DEFAULT_EPS = 1e-9
_eps_override: float | None = None


def eps() -> float:
    """Current global relative tolerance."""
    if _eps_override is not None:
        return _eps_override
    env = os.environ.get("CREP_EPS")
    if env:
        return float(env)
    return DEFAULT_EPS


def set_eps(value: float | None) -> None:
    """Override the global tolerance; ``None`` restores env/default lookup."""
    global _eps_override
    if value is not None and not value > 0:
        raise ValueError("tolerance must be positive")
    _eps_override = value


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "Point":
        return cls(z.real, z.imag)

    def dist(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


class _Infinity:
    """The point at infinity of the extended plane (a singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()
ExtPoint = Union[Point, _Infinity]


@dataclass(frozen=True)
class GeneralizedCircle:
    """A circle (center, radius) or a line ``a*x + b*y = c`` with unit normal."""

    kind: str
    cx: float = 0.0
    cy: float = 0.0
    r: float = 0.0
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == "circle":
            if not self.r > 0:
                raise NonpositiveRadius(f"radius must be positive, got {self.r}")
        elif self.kind == "line":
            if abs(self.a * self.a + self.b * self.b - 1.0) > 1e-12:
                raise ValueError("line normal must have unit length")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")

    @classmethod
    def circle(cls, cx: float, cy: float, r: float) -> "GeneralizedCircle":
        return cls("circle", cx=float(cx), cy=float(cy), r=float(r))

    @classmethod
    def line(cls, a: float, b: float, c: float) -> "GeneralizedCircle":
        n = math.hypot(a, b)
        if n == 0:
            raise ValueError("line normal must be nonzero")
        a, b, c = a / n, b / n, c / n
        # canonical sign so equal loci compare equal
        if a < 0 or (a == 0 and b < 0):
            a, b, c = -a, -b, -c
        return cls("line", a=a + 0.0, b=b + 0.0, c=c + 0.0)

    @property
    def is_line(self) -> bool:
        return self.kind == "line"

    @property
    def center(self) -> Point:
        if self.is_line:
            raise ValueError("a line has no center")
        return Point(self.cx, self.cy)

    @property
    def direction(self) -> tuple[float, float]:
        """Unit direction along a line (the normal turned counterclockwise)."""
        return (-self.b, self.a)

    def foot(self) -> Point:
        """Point of a line closest to the origin."""
        return Point(self.a * self.c, self.b * self.c)

    def scale(self) -> float:
        if self.is_line:
            return max(1.0, abs(self.c))
        return max(self.r, math.hypot(self.cx, self.cy))

    def distance_to(self, p: Point) -> float:
        """Unsigned distance from ``p`` to the locus."""
        if self.is_line:
            return abs(self.a * p.x + self.b * p.y - self.c)
        return abs(math.hypot(p.x - self.cx, p.y - self.cy) - self.r)

    def contains(self, p: ExtPoint, tol: float | None = None) -> bool:
        if p is INFINITY:
            return self.is_line
        tol = eps() if tol is None else tol
        local = self.r if not self.is_line else max(1.0, abs(self.c), math.hypot(p.x, p.y))
        return self.distance_to(p) <= tol * local

    def point_at(self, s: float) -> Point:
        """Angle parameter on a circle, arclength parameter from the foot on a line."""
        if self.is_line:
            f = self.foot()
            dx, dy = self.direction
            return Point(f.x + s * dx, f.y + s * dy)
        return Point(self.cx + self.r * math.cos(s), self.cy + self.r * math.sin(s))


class Tag(str, Enum):
    DISJOINT_OUTSIDE = "disjoint-outside"
    DISJOINT_NESTED = "disjoint-nested"
    TOUCHING = "touching"
    CROSSING = "crossing"


@dataclass(frozen=True)
class IntersectionClass:
    tag: Tag
    points: tuple[ExtPoint, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.points)
        if self.tag is Tag.TOUCHING and n != 1:
            raise ValueError("touching carries exactly one point")
        if self.tag is Tag.CROSSING and n != 2:
            raise ValueError("crossing carries two points")


def _point_key(p: ExtPoint) -> tuple:
    if p is INFINITY:
        return (1, 0.0, 0.0)
    return (0, p.x, p.y)


def _circle_circle(c1: GeneralizedCircle, c2: GeneralizedCircle, tol: float) -> IntersectionClass:
    dx, dy = c2.cx - c1.cx, c2.cy - c1.cy
    d = math.hypot(dx, dy)
    r1, r2 = c1.r, c2.r
    scale = max(r1, r2, d)
    if d <= tol * scale and abs(r1 - r2) <= tol * scale:
        raise CoincidentCircles("circles coincide within tolerance")
    if abs(d - (r1 + r2)) <= tol * scale:
        w = r1 / (r1 + r2)
        p = Point(c1.cx + w * dx, c1.cy + w * dy)
        return IntersectionClass(Tag.TOUCHING, (p,))
    if d > tol * scale and abs(d - abs(r1 - r2)) <= tol * scale:
        ux, uy = dx / d, dy / d
        if r1 >= r2:
            p = Point(c1.cx + r1 * ux, c1.cy + r1 * uy)
        else:
            p = Point(c2.cx - r2 * ux, c2.cy - r2 * uy)
        return IntersectionClass(Tag.TOUCHING, (p,))
    if d > r1 + r2:
        return IntersectionClass(Tag.DISJOINT_OUTSIDE)
    if d < abs(r1 - r2):
        return IntersectionClass(Tag.DISJOINT_NESTED)
    ux, uy = dx / d, dy / d
    a = (d * d + r1 * r1 - r2 * r2) / (2 * d)
    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    bx, by = c1.cx + a * ux, c1.cy + a * uy
    pts = (Point(bx - h * uy, by + h * ux), Point(bx + h * uy, by - h * ux))
    return IntersectionClass(Tag.CROSSING, tuple(sorted(pts, key=_point_key)))


def _circle_line(c: GeneralizedCircle, ln: GeneralizedCircle, tol: float) -> IntersectionClass:
    h = ln.a * c.cx + ln.b * c.cy - ln.c
    scale = max(c.r, abs(h))
    fx, fy = c.cx - h * ln.a, c.cy - h * ln.b
    if abs(abs(h) - c.r) <= tol * scale:
        return IntersectionClass(Tag.TOUCHING, (Point(fx, fy),))
    if abs(h) > c.r:
        return IntersectionClass(Tag.DISJOINT_OUTSIDE)
    s = math.sqrt(c.r * c.r - h * h)
    dx, dy = ln.direction
    pts = (Point(fx + s * dx, fy + s * dy), Point(fx - s * dx, fy - s * dy))
    return IntersectionClass(Tag.CROSSING, tuple(sorted(pts, key=_point_key)))


def _line_line(l1: GeneralizedCircle, l2: GeneralizedCircle, tol: float) -> IntersectionClass:
    cross = l1.a * l2.b - l1.b * l2.a
    if abs(cross) <= tol:
        dot = l1.a * l2.a + l1.b * l2.b
        if abs(l1.c - dot * l2.c) <= tol * max(1.0, abs(l1.c), abs(l2.c)):
            raise CoincidentCircles("lines coincide within tolerance")
        # parallel lines meet only at infinity, where they are tangent
        return IntersectionClass(Tag.TOUCHING, (INFINITY,))
    x = (l1.c * l2.b - l1.b * l2.c) / cross
    y = (l1.a * l2.c - l1.c * l2.a) / cross
    return IntersectionClass(Tag.CROSSING, (Point(x, y), INFINITY))


def classify_intersection(
    c1: GeneralizedCircle, c2: GeneralizedCircle, tol: float | None = None
) -> IntersectionClass:
    """Classify how two generalized circles meet and return the meeting points.

    Touching is decided with a tolerance relative to ``max(r1, r2, d)``;
    points are returned in a canonical order so the result does not depend on
    the argument order.
    """
    tol = eps() if tol is None else tol
    if c1.is_line and c2.is_line:
        return _line_line(c1, c2, tol)
    if c1.is_line:
        return _circle_line(c2, c1, tol)
    if c2.is_line:
        return _circle_line(c1, c2, tol)
    if (c2.cx, c2.cy, c2.r) < (c1.cx, c1.cy, c1.r):
        c1, c2 = c2, c1
    return _circle_circle(c1, c2, tol)


def _circumcircle(p1: Point, p2: Point, p3: Point) -> GeneralizedCircle | None:
    bx, by = p2.x - p1.x, p2.y - p1.y
    cx, cy = p3.x - p1.x, p3.y - p1.y
    d = 2.0 * (bx * cy - by * cx)
    if d == 0.0:
        return None
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return GeneralizedCircle.circle(p1.x + ux, p1.y + uy, math.hypot(ux, uy))


def _line_through(p: Point, q: Point) -> GeneralizedCircle:
    dx, dy = q.x - p.x, q.y - p.y
    a, b = dy, -dx
    return GeneralizedCircle.line(a, b, a * p.x + b * p.y)


def circle_through_points(p1: Point, p2: Point, p3: Point, tol: float | None = None) -> GeneralizedCircle:
    """The unique generalized circle through three distinct points."""
    tol = eps() if tol is None else tol
    pts = (p1, p2, p3)
    pairs = [(pts[i], pts[j]) for i in range(3) for j in range(i + 1, 3)]
    dists = [p.dist(q) for p, q in pairs]
    scale = max(dists + [abs(p.x) for p in pts] + [abs(p.y) for p in pts])
    if min(dists) <= tol * scale:
        raise DegeneratePoints("two of the points coincide")
    bx, by = p2.x - p1.x, p2.y - p1.y
    cx, cy = p3.x - p1.x, p3.y - p1.y
    sin_angle = (bx * cy - by * cx) / (math.hypot(bx, by) * math.hypot(cx, cy))
    if abs(sin_angle) <= tol:
        far = max(range(3), key=lambda k: dists[k])
        return _line_through(*pairs[far])
    return _circumcircle(p1, p2, p3)


@dataclass(frozen=True)
class MobiusMap:
    """Fractional linear map z -> (a z + b) / (c z + d)."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self) -> None:
        if not abs(self.det) > 1e-15:
            raise ValueError("Mobius map must have nonzero determinant")

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @property
    def pole(self) -> ExtPoint:
        """The preimage of infinity."""
        if self.c == 0:
            return INFINITY
        return _ext_point(-self.d / self.c)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """``self`` after ``other``."""
        return MobiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __call__(self, p: ExtPoint) -> ExtPoint:
        return mobius_apply_point(self, p)


def _ext_point(z: complex) -> ExtPoint:
    # a quotient that overflows is the point at infinity
    if not cmath.isfinite(z):
        return INFINITY
    return Point.from_complex(z)


def mobius_to_infinity(p: Point) -> MobiusMap:
    """The map z -> 1/(z - p), sending ``p`` to infinity."""
    return MobiusMap(0, 1, 1, -p.z)


def mobius_apply_point(m: MobiusMap, p: ExtPoint) -> ExtPoint:
    if p is INFINITY:
        if m.c == 0:
            return INFINITY
        return _ext_point(m.a / m.c)
    z = p.z
    den = m.c * z + m.d
    if abs(den) <= 1e-15 * (abs(m.c * z) + abs(m.d)):
        return INFINITY
    return _ext_point((m.a * z + m.b) / den)


def _pole_on(c: GeneralizedCircle, m: MobiusMap, tol: float) -> bool:
    pole = m.pole
    if pole is INFINITY:
        return c.is_line
    return c.contains(pole, tol)


def mobius_apply_gcircle(m: MobiusMap, c: GeneralizedCircle, tol: float | None = None) -> GeneralizedCircle:
    """Image of a generalized circle, by transporting three points and refitting.

    The image is a line exactly when the pole of ``m`` lies on ``c``.
    """
    tol = eps() if tol is None else tol
    through_pole = _pole_on(c, m, tol)
    pole = m.pole
    if c.is_line:
        span = max(1.0, abs(c.c))
        if pole is not INFINITY:
            f = c.foot()
            dx, dy = c.direction
            base = (pole.x - f.x) * dx + (pole.y - f.y) * dy
        else:
            base = 0.0
        params = [base + span * k for k in (1.0, -1.0, 2.5, -2.5, 0.0)]
    else:
        if pole is INFINITY:
            theta0 = 0.0
        else:
            theta0 = math.atan2(pole.y - c.cy, pole.x - c.cx)
        # offsets that never produce the pole twice
        params = [theta0 + k * 2 * math.pi / 3 + off for off in (0.0, 0.5) for k in range(3)]
    images: list[Point] = []
    for s in params:
        img = mobius_apply_point(m, c.point_at(s))
        if img is INFINITY:
            continue  # pole on a sample point: resample deterministically
        images.append(img)
        if len(images) == 3:
            break
    if through_pole:
        # the image is a line through all finite images; use the widest pair
        best = max(
            ((images[i], images[j]) for i in range(len(images)) for j in range(i + 1, len(images))),
            key=lambda pq: pq[0].dist(pq[1]),
        )
        return _line_through(*best)
    out = _circumcircle(*images[:3])
    if out is None:
        return _line_through(images[0], images[1])
    return out


def axis_tangent_to_circle(c) -> GeneralizedCircle:
    """Embed an axis-tangent circle (fields ``t``, ``r``, ``side``) in the plane."""
    if not c.r > 0:
        raise NonpositiveRadius(f"radius must be positive, got {c.r}")
    sign = 1.0 if c.side == "above" else -1.0
    return GeneralizedCircle.circle(c.t, sign * c.r, c.r)
