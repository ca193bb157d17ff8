"""Algebra of circles tangent to the x-axis.

A circle of radius r touching the axis at (t, 0) is fully described by
``(t, r, side)``.  Two such circles on the same side touch each other iff
``|t_j - t_i| = 2 sqrt(r_i r_j)``, which turns every question about chains
of tangent circles into arithmetic on the tangency abscissas.

The eight-circle configurations use the axis as the image of the circle
carrying the 8-cycle; circles 2, 3, 6, 7 sit above it and 1, 4, 5, 8 below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import (
    NoOuterSolution,
    NonpositiveInput,
    NonpositiveRadius,
    NotAChain,
    NotInduced,
    NotOrdered,
    NotSymmetric,
    OrderViolation,
    SideMismatch,
)
from .geom import eps

ABOVE = "above"
BELOW = "below"

TOP = (2, 3, 6, 7)
BOTTOM = (1, 4, 5, 8)
INDUCED_PAIRS = ((1, 4), (2, 7), (3, 6), (5, 8))
SYMMETRIC_PAIRS = INDUCED_PAIRS + ((1, 8), (4, 5), (2, 3), (6, 7))

# default gate for certificate/symmetrize preconditions, relative to span**2
DEFAULT_TAU = 1e-8
# relative margin by which C_1 is enlarged past C_5 when needed
ENLARGE_MARGIN = 1e-6


@dataclass(frozen=True)
class AxisTangentCircle:
    t: float
    r: float
    side: str = ABOVE

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise NonpositiveRadius(f"radius must be positive, got {self.r}")
        if not math.isfinite(self.t):
            raise ValueError("tangency abscissa must be finite")
        if self.side not in (ABOVE, BELOW):
            raise ValueError(f"side must be {ABOVE!r} or {BELOW!r}")


def side_of(index: int) -> str:
    return ABOVE if index in TOP else BELOW


def tangent_gap(rA: float, rB: float) -> float:
    """Distance between the tangency points of two touching same-side circles."""
    if not (rA > 0 and rB > 0):
        raise NonpositiveRadius("radii must be positive")
    return 2.0 * math.sqrt(rA * rB)


def tangency_residual(A: AxisTangentCircle, B: AxisTangentCircle) -> float:
    """Relative defect of the touching condition ``(dt)^2 = 4 rA rB``."""
    dt2 = (B.t - A.t) ** 2
    prod = 4.0 * A.r * B.r
    return abs(dt2 - prod) / max(dt2, prod)


def _check_pair(A: AxisTangentCircle, B: AxisTangentCircle) -> None:
    if A.side != B.side:
        raise SideMismatch("both circles must lie on the same side of the axis")
    if not A.t < B.t:
        raise OrderViolation("expected A.t < B.t")


def inner_tangent_circle(A: AxisTangentCircle, B: AxisTangentCircle) -> AxisTangentCircle:
    """The circle between A and B touching both of them and the axis."""
    _check_pair(A, B)
    s = (B.t - A.t) / (2.0 * (math.sqrt(A.r) + math.sqrt(B.r)))
    return AxisTangentCircle(A.t + 2.0 * math.sqrt(A.r) * s, s * s, A.side)


def outer_tangent_circle(A: AxisTangentCircle, B: AxisTangentCircle) -> AxisTangentCircle:
    """The circle right of B touching A, B and the axis; needs ``A.r > B.r``."""
    _check_pair(A, B)
    if not A.r > B.r * (1.0 + eps()):
        raise NoOuterSolution("no outer tangent circle unless A.r > B.r")
    s = (B.t - A.t) / (2.0 * (math.sqrt(A.r) - math.sqrt(B.r)))
    return AxisTangentCircle(B.t + 2.0 * math.sqrt(B.r) * s, s * s, A.side)


@dataclass(frozen=True)
class ChainGaps:
    l: float
    m: float
    r: float
    n: float


def chain_gaps_check(quad: Sequence[AxisTangentCircle], tol: float | None = None) -> ChainGaps:
    """Gaps of a four-circle chain with touching pairs (1,2), (2,3), (3,4), (1,4)."""
    tol = eps() if tol is None else tol
    if len(quad) != 4:
        raise NotAChain("a chain has exactly four circles")
    if len({c.side for c in quad}) != 1:
        raise NotAChain("chain circles must share a side")
    ts = [c.t for c in quad]
    if not all(ts[i] < ts[i + 1] for i in range(3)):
        raise NotAChain("chain circles must be strictly ordered by t")
    for i, j in ((0, 1), (1, 2), (2, 3), (0, 3)):
        res = tangency_residual(quad[i], quad[j])
        if res > tol:
            raise NotAChain(f"circles {i + 1} and {j + 1} do not touch (residual {res:.3g})")
    return ChainGaps(ts[1] - ts[0], ts[2] - ts[1], ts[3] - ts[2], ts[3] - ts[0])


def f_gap(l: float, r: float) -> float:
    """Middle gap of a four-chain with outer gaps ``l`` and ``r``.

    Positive root of ``l r = m (l + m + r)``, written in the cancellation-free
    form ``2 l r / (l + r + sqrt((l + r)^2 + 4 l r))``.
    """
    if not (l > 0 and r > 0):
        raise NonpositiveInput("gaps must be positive")
    s = l + r
    return 2.0 * l * r / (s + math.sqrt(s * s + 4.0 * l * r))


def f_gap_gradient(l: float, r: float) -> tuple[float, float]:
    """Partial derivatives of :func:`f_gap` in ``l`` and ``r``.

    ``df/dl = ((l + 3r)/S - 1) / 2`` with ``S = sqrt((l+r)^2 + 4lr)``; the
    numerator is rationalized to ``4 r^2 / (S (l + 3r + S))`` which is
    manifestly positive.  The ``r`` derivative is the mirror image.
    """
    if not (l > 0 and r > 0):
        raise NonpositiveInput("gaps must be positive")
    S = math.sqrt((l + r) ** 2 + 4.0 * l * r)
    dl = 4.0 * r * r / (S * (l + 3.0 * r + S))
    dr = 4.0 * l * l / (S * (r + 3.0 * l + S))
    return dl, dr


def build_chain(
    l: float, r: float, anchor_t: float = 0.0, anchor_r: float = 1.0, side: str = ABOVE
) -> tuple[AxisTangentCircle, ...]:
    """Four touching circles with outer gaps ``l``, ``r`` starting at the anchor."""
    if not (l > 0 and r > 0 and anchor_r > 0):
        raise NonpositiveInput("gaps and anchor radius must be positive")
    m = f_gap(l, r)
    ts = [anchor_t, anchor_t + l, anchor_t + l + m, anchor_t + l + m + r]
    radii = [anchor_r]
    for gap in (l, m, r):
        radii.append(gap * gap / (4.0 * radii[-1]))
    return tuple(AxisTangentCircle(t, rad, side) for t, rad in zip(ts, radii))


# -- eight-circle configurations ---------------------------------------------


@dataclass(frozen=True)
class OctupleConfig:
    """Circles C_1..C_8 (stored 0-based) with the fixed side assignment.

    Ordering is not enforced here: operations check the ordering they need,
    and the certificate deliberately accepts interleaved chains.
    """

    circles: tuple[AxisTangentCircle, ...]
    kind: str = "induced"

    def __post_init__(self) -> None:
        if len(self.circles) != 8:
            raise ValueError("an octuple has exactly eight circles")
        if self.kind not in ("induced", "symmetric"):
            raise ValueError(f"unknown configuration kind {self.kind!r}")
        for i, c in enumerate(self.circles, start=1):
            if c.side != side_of(i):
                raise SideMismatch(f"C_{i} must lie {side_of(i)} the axis")

    @classmethod
    def from_values(cls, t: Sequence[float], r: Sequence[float], kind: str = "induced") -> "OctupleConfig":
        return cls(tuple(AxisTangentCircle(float(t[i]), float(r[i]), side_of(i + 1)) for i in range(8)), kind)

    def __getitem__(self, index: int) -> AxisTangentCircle:
        """1-based access, matching the circle labels."""
        return self.circles[index - 1]

    @property
    def t(self) -> list[float]:
        return [c.t for c in self.circles]

    @property
    def r(self) -> list[float]:
        return [c.r for c in self.circles]

    @property
    def required_pairs(self) -> tuple[tuple[int, int], ...]:
        return SYMMETRIC_PAIRS if self.kind == "symmetric" else INDUCED_PAIRS

    def span(self) -> float:
        return max(self.t) - min(self.t)

    def pair_residual(self, i: int, j: int) -> float:
        """Touching defect of C_i, C_j normalized by the squared span."""
        a, b = self[i], self[j]
        span = self.span() or 1.0
        return abs((b.t - a.t) ** 2 - 4.0 * a.r * b.r) / (span * span)

    def residuals(self, pairs=None) -> dict[tuple[int, int], float]:
        pairs = self.required_pairs if pairs is None else pairs
        return {p: self.pair_residual(*p) for p in pairs}

    def is_ordered(self) -> bool:
        t = self.t
        return all(t[i] < t[i + 1] for i in range(7))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "circles": [
                {"index": i, "t": c.t, "r": c.r, "side": c.side} for i, c in enumerate(self.circles, start=1)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "OctupleConfig":
        circles = sorted(data["circles"], key=lambda c: c["index"])
        return cls.from_values([c["t"] for c in circles], [c["r"] for c in circles], data.get("kind", "induced"))


def _gate(cfg: OctupleConfig, pairs, tol: float, exc: type) -> None:
    bad = {p: res for p, res in cfg.residuals(pairs).items() if res > tol}
    if bad:
        worst = max(bad, key=bad.get)
        raise exc(f"pair C_{worst[0]},C_{worst[1]} misses tangency by {bad[worst]:.3g} (gate {tol:.3g})")


@dataclass
class SymmetrizeReport:
    old_t: dict[int, float]
    new_t: dict[int, float]
    old_r: dict[int, float]
    new_r: dict[int, float]
    c1_enlarged: bool
    claims: dict[str, bool] = field(default_factory=dict)

    @property
    def all_claims_hold(self) -> bool:
        return all(self.claims.values())


def replace_top(C2: AxisTangentCircle, C3: AxisTangentCircle, C6: AxisTangentCircle, C7: AxisTangentCircle):
    """Hold C_2 and C_6, rebuild C_3 and C_7 so all four form a chain.

    Returns ``(C3', C7', claims)`` where the claims record whether the
    rebuilt abscissas obey ``t3' < t3`` and ``t6 < t7' < t7``.
    """
    C3n = inner_tangent_circle(C2, C6)
    C7n = outer_tangent_circle(C2, C6)
    claims = {
        "t3' < t3": C3n.t < C3.t,
        "t6 < t7' < t7": C6.t < C7n.t < C7.t,
    }
    return C3n, C7n, claims


def replace_bottom(C1: AxisTangentCircle, C4: AxisTangentCircle, C5: AxisTangentCircle, C8: AxisTangentCircle):
    """Hold C_1 and C_5 (after enlarging C_1 if needed), rebuild C_4 and C_8.

    C_4 touches the left fixed circle and C_8 the right one, so the
    rebuilt circles move right: the claims are ``t4 < t4' < t5`` and
    ``t8 < t8'``.
    """
    enlarged = False
    if C1.r <= C5.r * (1.0 + ENLARGE_MARGIN):
        # keep C_1 on the axis and touching C_4; it grows and slides left
        r1 = C5.r * (1.0 + ENLARGE_MARGIN)
        C1 = AxisTangentCircle(C4.t - tangent_gap(r1, C4.r), r1, C1.side)
        enlarged = True
    C4n = inner_tangent_circle(C1, C5)
    C8n = outer_tangent_circle(C1, C5)
    claims = {
        "t4 < t4' < t5": C4.t < C4n.t < C5.t,
        "t8 < t8'": C8.t < C8n.t,
    }
    return C1, C4n, C8n, enlarged, claims


def symmetrize(cfg: OctupleConfig, tol: float = DEFAULT_TAU) -> tuple[OctupleConfig, SymmetrizeReport]:
    """Turn an (approximate) induced configuration into a symmetric one.

    Raises :class:`OrderViolation` when the rebuilt octuple is not ordered;
    the exception carries the rebuilt ``config`` and its ``report``.
    """
    if not cfg.is_ordered():
        raise NotOrdered("symmetrize needs t_1 < ... < t_8")
    _gate(cfg, INDUCED_PAIRS, tol, NotInduced)
    C3n, C7n, top_claims = replace_top(cfg[2], cfg[3], cfg[6], cfg[7])
    C1n, C4n, C8n, enlarged, bottom_claims = replace_bottom(cfg[1], cfg[4], cfg[5], cfg[8])
    circles = list(cfg.circles)
    for idx, c in ((1, C1n), (3, C3n), (4, C4n), (7, C7n), (8, C8n)):
        circles[idx - 1] = c
    out = OctupleConfig(tuple(circles), "symmetric")
    report = SymmetrizeReport(
        old_t=dict(enumerate(cfg.t, start=1)),
        new_t=dict(enumerate(out.t, start=1)),
        old_r=dict(enumerate(cfg.r, start=1)),
        new_r=dict(enumerate(out.r, start=1)),
        c1_enlarged=enlarged,
        claims={**top_claims, **bottom_claims},
    )
    if not out.is_ordered():
        # an exactly tangent, ordered symmetric octuple cannot exist, so this is
        # the expected outcome; the rebuilt circles travel with the error
        exc = OrderViolation(f"rebuilt configuration is not ordered: t = {out.t}")
        exc.config, exc.report = out, report
        raise exc
    return out, report


@dataclass
class ContradictionReport:
    m_top: float
    m_bottom: float
    monotonicity_bound: float
    nesting_bound: float
    violated: str
    magnitude: float
    l_top: float = 0.0
    r_top: float = 0.0
    l_bottom: float = 0.0
    r_bottom: float = 0.0
    order_failures: list[str] = field(default_factory=list)
    measured_nesting: float = 0.0
    defect_top: float = 0.0
    defect_bottom: float = 0.0

    @property
    def conflict(self) -> bool:
        return self.magnitude > 0

    def to_json(self) -> dict:
        return {
            "m_top": self.m_top,
            "m_bottom": self.m_bottom,
            "l_top": self.l_top,
            "r_top": self.r_top,
            "l_bottom": self.l_bottom,
            "r_bottom": self.r_bottom,
            "monotonicity_bound": self.monotonicity_bound,
            "nesting_bound": self.nesting_bound,
            "measured_nesting": self.measured_nesting,
            "defect_top": self.defect_top,
            "defect_bottom": self.defect_bottom,
            "violated": self.violated,
            "magnitude": self.magnitude,
            "conflict": self.conflict,
            "order_failures": list(self.order_failures),
        }


def contradiction_certificate(cfg: OctupleConfig, tol: float = DEFAULT_TAU) -> ContradictionReport:
    """Exhibit the inequality clash that rules out a symmetric configuration.

    Each side is a four-chain, so its middle gap is fixed by its outer gaps:
    ``m_top = f(l, r)`` and ``m_bottom = f(l', r')``.  Full ordering gives
    ``l < l'`` and ``r < r'``, so monotonicity of ``f`` forces
    ``m_top < m_bottom``; nesting ``t3 < t4 < t5 < t6`` forces the reverse.

    ``monotonicity_bound = f(l', r') - f(l, r)`` must be positive for the
    first inequality and ``nesting_bound = m_top - m_bottom`` for the
    second, with both middle gaps taken from the chain law.  The two sum to
    zero, so at least one fails and ``magnitude`` is the size of the
    failure.  On an approximately tangent input the measured middle gaps
    differ from the chain-law ones by ``defect_top``/``defect_bottom``; the
    measured nesting holds only to the extent those defects pay for it.

    Each chain must be ordered on its own; the interleaving across the axis
    is audited in ``order_failures``.
    """
    _gate(cfg, SYMMETRIC_PAIRS, tol, NotSymmetric)
    t = cfg.t
    for side in (TOP, BOTTOM):
        ts = [t[i - 1] for i in side]
        if not all(ts[k] < ts[k + 1] for k in range(3)):
            raise NotOrdered(f"circles {side} are not ordered along the axis")
    t1, t2, t3, t4, t5, t6, t7, t8 = t
    l, r = t3 - t2, t7 - t6
    lp, rp = t4 - t1, t8 - t5
    m_top, m_bottom = f_gap(l, r), f_gap(lp, rp)
    measured_top, measured_bottom = t6 - t3, t5 - t4
    mono = m_bottom - m_top
    nest = m_top - m_bottom
    failures = [f"t{i + 1} >= t{i + 2}" for i in range(7) if not t[i] < t[i + 1]]
    violated = []
    if nest <= 0:
        violated.append("nesting: t3<t4<t5<t6 needs m_top > m_bottom")
    if mono <= 0:
        violated.append("monotonicity: l<l', r<r' needs f(l,r) < f(l',r')")
    magnitude = max(-nest, -mono, 0.0)
    return ContradictionReport(
        m_top=m_top,
        m_bottom=m_bottom,
        monotonicity_bound=mono,
        nesting_bound=nest,
        violated="; ".join(violated) or "none",
        magnitude=magnitude,
        l_top=l,
        r_top=r,
        l_bottom=lp,
        r_bottom=rp,
        order_failures=failures,
        measured_nesting=measured_top - measured_bottom,
        defect_top=measured_top - m_top,
        defect_bottom=measured_bottom - m_bottom,
    )


def interleave(top: Sequence[AxisTangentCircle], bottom: Sequence[AxisTangentCircle], kind: str = "symmetric") -> OctupleConfig:
    """Place a top chain at C_2, C_3, C_6, C_7 and a bottom chain at C_1, C_4, C_5, C_8."""
    slots: list[AxisTangentCircle | None] = [None] * 8
    for idx, c in zip(TOP, top):
        slots[idx - 1] = replace(c, side=ABOVE)
    for idx, c in zip(BOTTOM, bottom):
        slots[idx - 1] = replace(c, side=BELOW)
    return OctupleConfig(tuple(slots), kind)
