"""Circle sets, their contact multigraphs, and verification against a target graph.

The contact multigraph of a circle set has one vertex per point lying on two
members and one edge per arc between consecutive such points.  Arcs run
counterclockwise around circles and by increasing abscissa along the (at
most one) line member, whose last arc closes through infinity.  The rotation
at each point is read off the tangent directions of its four arc-ends; at a
touching point the ends share a tangent line and are separated by signed
curvature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .errors import CoincidentCircles, FreeCircle, IoFailure, PoleOnCircle, TriplePoint, UnknownId
from .geom import (
    GeneralizedCircle,
    MobiusMap,
    Point,
    Tag,
    classify_intersection,
    eps,
    mobius_apply_gcircle,
)
from .graphs import PlaneMultigraph, isomorphic, natural_key


@dataclass
class CircleSet:
    members: list[tuple[str, GeneralizedCircle]] = field(default_factory=list)

    def __post_init__(self) -> None:
        ids = [cid for cid, _ in self.members]
        if len(set(ids)) != len(ids):
            raise ValueError("circle ids must be unique")
        if sum(1 for _, c in self.members if c.is_line) > 1:
            raise ValueError("at most one line member is allowed")

    def __len__(self) -> int:
        return len(self.members)

    @property
    def ids(self) -> list[str]:
        return [cid for cid, _ in self.members]

    def get(self, cid: str) -> GeneralizedCircle:
        for k, c in self.members:
            if k == cid:
                return c
        raise UnknownId(f"no member {cid!r}")

    def without(self, ids) -> "CircleSet":
        ids = set(ids)
        missing = ids - set(self.ids)
        if missing:
            raise UnknownId(f"unknown ids {sorted(missing, key=natural_key)}")
        return CircleSet([(k, c) for k, c in self.members if k not in ids])

    def to_json(self) -> dict:
        out: dict = {"circles": []}
        for cid, c in self.members:
            if c.is_line:
                out["line"] = {"id": cid, "a": c.a, "b": c.b, "c": c.c}
            else:
                out["circles"].append({"id": cid, "cx": c.cx, "cy": c.cy, "r": c.r})
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CircleSet":
        members = [
            (str(e["id"]), GeneralizedCircle.circle(e["cx"], e["cy"], e["r"])) for e in data.get("circles", [])
        ]
        line = data.get("line")
        if line:
            members.append((str(line.get("id", "line")), GeneralizedCircle.line(line["a"], line["b"], line["c"])))
        return cls(members)


@dataclass(frozen=True)
class ContactPoint:
    id: str
    point: Point
    members: tuple[str, str]
    tag: Tag


@dataclass(frozen=True)
class Arc:
    edge: str
    member: str
    start: str
    end: str


@dataclass
class ContactStructure:
    points: list[ContactPoint]
    arcs: dict[str, list[Arc]]
    graph: PlaneMultigraph

    def point(self, pid: str) -> ContactPoint:
        for p in self.points:
            if p.id == pid:
                return p
        raise KeyError(pid)


def _local_scale(c: GeneralizedCircle, p: Point) -> float:
    if c.is_line:
        return max(1.0, abs(c.c), math.hypot(p.x, p.y))
    return max(c.r, math.hypot(p.x - c.cx, p.y - c.cy))


def _param(c: GeneralizedCircle, p: Point) -> float:
    """Position of ``p`` along ``c``: angle on a circle, abscissa on a line."""
    if c.is_line:
        f = c.foot()
        dx, dy = c.direction
        return (p.x - f.x) * dx + (p.y - f.y) * dy
    return math.atan2(p.y - c.cy, p.x - c.cx) % (2 * math.pi)


def _tangent(c: GeneralizedCircle, p: Point) -> tuple[float, float]:
    """Unit tangent in the direction of traversal (ccw / increasing abscissa)."""
    if c.is_line:
        return c.direction
    dx, dy = p.x - c.cx, p.y - c.cy
    n = math.hypot(dx, dy)
    return (-dy / n, dx / n)


def extract_contact_graph(cs: CircleSet, tol: float | None = None) -> ContactStructure:
    tol = eps() if tol is None else tol
    members = dict(cs.members)
    raw: list[tuple[Point, tuple[str, str], Tag, float]] = []
    ids = cs.ids
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            a, b = ids[i], ids[j]
            cls = classify_intersection(members[a], members[b], tol)
            for p in cls.points:
                if not isinstance(p, Point):
                    continue  # only two lines meet at infinity, and one line is allowed
                s = max(_local_scale(members[a], p), _local_scale(members[b], p))
                raw.append((p, (a, b), cls.tag, s))

    # cluster coincident intersection points (union-find)
    parent = list(range(len(raw)))

    def find(k: int) -> int:
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for i in range(len(raw)):
        for j in range(i + 1, len(raw)):
            pi, _, _, si = raw[i]
            pj, _, _, sj = raw[j]
            if pi.dist(pj) <= tol * max(si, sj):
                parent[find(i)] = find(j)
    clusters: dict[int, list[int]] = {}
    for k in range(len(raw)):
        clusters.setdefault(find(k), []).append(k)

    found = []
    for ks in clusters.values():
        incident = sorted({m for k in ks for m in raw[k][1]}, key=ids.index)
        if len(incident) > 2:
            p = raw[ks[0]][0]
            raise TriplePoint(f"point ({p.x:.6g}, {p.y:.6g}) lies on {', '.join(incident)}")
        k0 = ks[0]
        x = sum(raw[k][0].x for k in ks) / len(ks)
        y = sum(raw[k][0].y for k in ks) / len(ks)
        found.append((Point(x, y), (incident[0], incident[1]), raw[k0][2]))
    found.sort(key=lambda f: (ids.index(f[1][0]), ids.index(f[1][1]), f[0].x, f[0].y))
    points = [ContactPoint(f"p{k}", p, pair, tag) for k, (p, pair, tag) in enumerate(found, start=1)]

    on_member: dict[str, list[ContactPoint]] = {cid: [] for cid in ids}
    for cp in points:
        for m in cp.members:
            on_member[m].append(cp)
    for cid in ids:
        if not on_member[cid]:
            raise FreeCircle(f"member {cid} meets no other member")

    edges: dict[str, tuple[str, str]] = {}
    arcs: dict[str, list[Arc]] = {}
    # arc-end data per point: (end, tangent direction leaving the point, signed curvature)
    ends_at: dict[str, list[tuple[tuple[str, int], tuple[float, float], float]]] = {cp.id: [] for cp in points}
    n_edge = 0
    for cid in ids:
        c = members[cid]
        seq = sorted(on_member[cid], key=lambda cp: _param(c, cp.point))
        kappa = 0.0 if c.is_line else 1.0 / c.r
        arcs[cid] = []
        for k, cp in enumerate(seq):
            nxt = seq[(k + 1) % len(seq)]
            n_edge += 1
            eid = f"a{n_edge}"
            edges[eid] = (cp.id, nxt.id)
            arcs[cid].append(Arc(eid, cid, cp.id, nxt.id))
            tx, ty = _tangent(c, cp.point)
            ends_at[cp.id].append(((eid, 0), (tx, ty), kappa))
            tx, ty = _tangent(c, nxt.point)
            ends_at[nxt.id].append(((eid, 1), (-tx, -ty), -kappa))

    rotation = {}
    for cp in points:
        ends = ends_at[cp.id]
        if cp.tag is Tag.TOUCHING:
            # all four ends share one tangent line: two groups of two
            rx, ry = ends[0][1]
            ref = math.atan2(ry, rx)
            keyed = []
            for end, (tx, ty), kap in ends:
                ang = ref if tx * rx + ty * ry > 0 else ref + math.pi
                keyed.append(((ang % (2 * math.pi), kap), end))
        else:
            keyed = [((math.atan2(ty, tx) % (2 * math.pi), kap), end) for end, (tx, ty), kap in ends]
        rotation[cp.id] = [end for _, end in sorted(keyed)]
    graph = PlaneMultigraph([cp.id for cp in points], edges, rotation)
    return ContactStructure(points, arcs, graph)


@dataclass
class DigonCheck:
    vertices: tuple[str, str]
    points: tuple[str, str]
    two_cut: bool
    same_circle: bool
    touching: bool
    consecutive: bool

    def to_json(self) -> dict:
        return dict(self.__dict__, vertices=list(self.vertices), points=list(self.points))


@dataclass
class VerificationReport:
    ok: bool
    mapping: dict[str, str] | None = None
    failure_reason: str | None = None
    digons: list[DigonCheck] = field(default_factory=list)
    unsupported_surgery: bool = False
    detail: str = ""

    def __post_init__(self) -> None:
        if self.ok != (self.mapping is not None):
            raise ValueError("ok must hold exactly when a mapping is present")

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "mapping": dict(sorted(self.mapping.items(), key=lambda kv: natural_key(kv[0]))) if self.mapping else None,
            "failure_reason": self.failure_reason,
            "unsupported_surgery": self.unsupported_surgery,
            "digons": [d.to_json() for d in self.digons],
            "detail": self.detail,
        }


def _consecutive(G: PlaneMultigraph, v: str, e1: str, e2: str) -> bool:
    rot = G.rotation[v]
    pos = [k for k, (eid, _) in enumerate(rot) if eid in (e1, e2)]
    if len(pos) != 2:
        return False
    d = abs(pos[0] - pos[1])
    return d == 1 or d == len(rot) - 1


def _digon_checks(cs: ContactStructure, target: PlaneMultigraph, mapping: dict[str, str]) -> list[DigonCheck]:
    inverse = {t: p for p, t in mapping.items()}
    G = cs.graph
    member_of = {arc.edge: arc.member for arcs in cs.arcs.values() for arc in arcs}
    tags = {cp.id: cp.tag for cp in cs.points}
    out = []
    for u, w, _ in target.digons():
        p, q = inverse[u], inverse[w]
        two_cut = target.components([u, w]) > 1
        eids = [e for e, pair in G.edges.items() if set(pair) == {p, q}]
        same = len(eids) == 2 and member_of[eids[0]] == member_of[eids[1]]
        consecutive = len(eids) == 2 and _consecutive(G, p, *eids) and _consecutive(G, q, *eids)
        touching = tags[p] is Tag.TOUCHING and tags[q] is Tag.TOUCHING
        out.append(DigonCheck((u, w), (p, q), two_cut, same, touching, consecutive))
    return out


def verify_representation(cs: CircleSet, target: PlaneMultigraph, tol: float | None = None) -> VerificationReport:
    """Check whether ``cs`` is a circle representation of ``target``.

    Invalid circle sets are reported through ``failure_reason`` rather than
    raised, so callers always get a verdict.
    """
    try:
        contact = extract_contact_graph(cs, tol)
    except (TriplePoint, FreeCircle, CoincidentCircles) as exc:
        return VerificationReport(False, failure_reason=type(exc).__name__, detail=str(exc))
    mapping = isomorphic(contact.graph, target)
    if mapping is None:
        return VerificationReport(
            False,
            failure_reason="NotIsomorphic",
            detail=f"contact graph has order {contact.graph.order}, size {contact.graph.size}",
        )
    return VerificationReport(True, mapping=mapping, digons=_digon_checks(contact, target, mapping))


def transport(cs: CircleSet, m: MobiusMap, tol: float | None = None) -> CircleSet:
    tol = eps() if tol is None else tol
    pole = m.pole
    if isinstance(pole, Point):
        for cid, c in cs.members:
            if c.contains(pole, tol):
                raise PoleOnCircle(f"pole ({pole.x:.6g}, {pole.y:.6g}) lies on {cid}")
    return CircleSet([(cid, mobius_apply_gcircle(m, c, tol)) for cid, c in cs.members])


def prune_circles(
    cs: CircleSet, ids, expected: PlaneMultigraph, tol: float | None = None
) -> tuple[CircleSet, VerificationReport]:
    """Delete members and re-verify against ``expected``.

    Only plain deletion is performed.  When the remaining arcs would need
    rerouting to represent ``expected`` the verdict fails and the report is
    flagged ``unsupported_surgery``.
    """
    remaining = cs.without(ids)
    report = verify_representation(remaining, expected, tol)
    if report.failure_reason in ("FreeCircle", "NotIsomorphic"):
        report.unsupported_surgery = True
    return remaining, report


# -- fixtures -------------------------------------------------------------------


def crossing_pair() -> CircleSet:
    return CircleSet([("c1", GeneralizedCircle.circle(0, 0, 1)), ("c2", GeneralizedCircle.circle(1, 0, 1))])


def tangent_triangle() -> CircleSet:
    return CircleSet(
        [
            ("c1", GeneralizedCircle.circle(0, 0, 1)),
            ("c2", GeneralizedCircle.circle(2, 0, 1)),
            ("c3", GeneralizedCircle.circle(1, math.sqrt(3.0), 1)),
        ]
    )


def triple_point() -> CircleSet:
    return CircleSet(
        [
            ("c1", GeneralizedCircle.circle(1, 0, 1)),
            ("c2", GeneralizedCircle.circle(0, 1, 1)),
            ("c3", GeneralizedCircle.circle(-1, 0, 1)),
        ]
    )


# -- rendering ------------------------------------------------------------------


def _svg_doc(width: float, height: float, view: tuple[float, float, float, float], body: list[str]) -> str:
    x0, y0, w, h = view
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="{x0:.6g} {y0:.6g} {w:.6g} {h:.6g}">\n'
    )
    return head + "\n".join(body) + ("\n" if body else "") + "</svg>\n"


def _circle_set_svg(cs: CircleSet) -> str:
    circles = [(cid, c) for cid, c in cs.members if not c.is_line]
    dots: list[tuple[Point, Tag]] = []
    ids = cs.ids
    members = dict(cs.members)
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            try:
                cls = classify_intersection(members[ids[i]], members[ids[j]])
            except CoincidentCircles:
                continue
            dots += [(p, cls.tag) for p in cls.points if isinstance(p, Point)]
    if circles:
        xmin = min(c.cx - c.r for _, c in circles)
        xmax = max(c.cx + c.r for _, c in circles)
        ymin = min(c.cy - c.r for _, c in circles)
        ymax = max(c.cy + c.r for _, c in circles)
    else:
        xmin, xmax, ymin, ymax = -1.0, 1.0, -1.0, 1.0
    for p, _ in dots:
        xmin, xmax, ymin, ymax = min(xmin, p.x), max(xmax, p.x), min(ymin, p.y), max(ymax, p.y)
    pad = 0.05 * max(xmax - xmin, ymax - ymin, 1e-9)
    xmin, xmax, ymin, ymax = xmin - pad, xmax + pad, ymin - pad, ymax + pad
    size = max(xmax - xmin, ymax - ymin)
    stroke = size / 400
    # y axis points up in the plane, down in SVG
    view = (xmin, -ymax, xmax - xmin, ymax - ymin)
    body = []
    for cid, c in circles:
        body.append(
            f'  <circle id="{escape(cid)}" cx="{c.cx:.9g}" cy="{-c.cy:.9g}" r="{c.r:.9g}" '
            f'fill="none" stroke="black" stroke-width="{stroke:.3g}"/>'
        )
    for cid, c in cs.members:
        if not c.is_line:
            continue
        f = c.foot()
        dx, dy = c.direction
        # long enough to cross the whole canvas
        reach = 4 * size + math.hypot(f.x - (xmin + xmax) / 2, f.y - (ymin + ymax) / 2)
        ox = (xmin + xmax) / 2 - f.x
        oy = (ymin + ymax) / 2 - f.y
        s0 = ox * dx + oy * dy
        x1, y1 = f.x + (s0 - reach) * dx, f.y + (s0 - reach) * dy
        x2, y2 = f.x + (s0 + reach) * dx, f.y + (s0 + reach) * dy
        body.append(
            f'  <line id="{escape(cid)}" x1="{x1:.9g}" y1="{-y1:.9g}" x2="{x2:.9g}" y2="{-y2:.9g}" '
            f'stroke="black" stroke-width="{stroke:.3g}"/>'
        )
    for p, tag in dots:
        color = "red" if tag is Tag.TOUCHING else "blue"
        body.append(
            f'  <circle class="{tag.value}" cx="{p.x:.9g}" cy="{-p.y:.9g}" r="{3 * stroke:.3g}" fill="{color}"/>'
        )
    return _svg_doc(600, 600 * (ymax - ymin) / (xmax - xmin), view, body)


def _graph_svg(G: PlaneMultigraph) -> str:
    """Schematic drawing: vertices on a circle, parallel edges fanned out."""
    n = max(G.order, 1)
    vs = sorted(G.vertices, key=natural_key)
    pos = {v: (math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)) for k, v in enumerate(vs)}
    body = []
    seen: dict[frozenset, int] = {}
    for eid in sorted(G.edges, key=natural_key):
        u, w = G.edges[eid]
        key = frozenset((u, w))
        k = seen.get(key, 0)
        seen[key] = k + 1
        (x1, y1), (x2, y2) = pos[u], pos[w]
        if u == w:
            r = 0.08 * (k + 1)
            body.append(
                f'  <circle class="loop" cx="{x1 * (1 + r):.6g}" cy="{-y1 * (1 + r):.6g}" r="{r:.6g}" '
                'fill="none" stroke="gray" stroke-width="0.005"/>'
            )
            continue
        off = 0.1 * ((k + 1) // 2) * (1 if k % 2 else -1) if k else 0.0
        mx, my = (x1 + x2) / 2 - off * (y2 - y1), (y1 + y2) / 2 + off * (x2 - x1)
        body.append(
            f'  <path d="M {x1:.6g} {-y1:.6g} Q {mx:.6g} {-my:.6g} {x2:.6g} {-y2:.6g}" '
            'fill="none" stroke="gray" stroke-width="0.005"/>'
        )
    for v in vs:
        x, y = pos[v]
        body.append(f'  <circle class="vertex" cx="{x:.6g}" cy="{-y:.6g}" r="0.02" fill="black"/>')
    return _svg_doc(600, 600, (-1.3, -1.3, 2.6, 2.6), body)


def render_svg(obj: CircleSet | PlaneMultigraph, path) -> None:
    text = _graph_svg(obj) if isinstance(obj, PlaneMultigraph) else _circle_set_svg(obj)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
