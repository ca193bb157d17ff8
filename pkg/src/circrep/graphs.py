"""Plane multigraphs given by rotation systems, and the constructions built on them.

A rotation lists, for each vertex, the incident edge-ends in counterclockwise
order.  An edge-end is ``(edge_id, side)`` with side 0 at ``ends[0]`` and
side 1 at ``ends[1]``, so loops and parallel edges stay distinguishable.
Faces are traced by leaving each vertex through the counterclockwise
successor of the end we arrived on; a connected rotation system is planar
iff ``V - E + F = 2``.

Constructions:

* the octahedron, the octahedral mini-gadget (one outer edge subdivided) and
  the octahedral mini-bigadget (one outer vertex split into two degree-2
  vertices);
* ``M``: an 8-cycle v1..v8 plus red vertices x14, x27, x36, x58, each
  joined by a digon to both of its cycle vertices;
* the two simple 68-vertex graphs obtained from ``M`` by subdividing a
  digon edge and hanging a mini-gadget (or, subdividing twice, a
  mini-bigadget) off every digon.
"""

from __future__ import annotations

import math
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .errors import DegreeMismatch, InvalidGraph, InvalidInstance, NoSuchEdge

End = tuple[str, int]


def natural_key(s: str):
    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", s)]


def _end_str(end: End) -> str:
    return f"{end[0]}{'+' if end[1] == 0 else '-'}"


def _parse_end(s: str) -> End:
    if not s or s[-1] not in "+-":
        raise InvalidGraph(f"bad edge-end {s!r}")
    return (s[:-1], 0 if s[-1] == "+" else 1)


@dataclass
class PlaneMultigraph:
    vertices: list[str]
    edges: dict[str, tuple[str, str]]
    rotation: dict[str, list[End]]

    def __post_init__(self) -> None:
        self.check()

    def check(self) -> None:
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise InvalidGraph("duplicate vertex ids")
        seen: set[End] = set()
        for v in self.vertices:
            for end in self.rotation.get(v, []):
                eid, side = end
                if eid not in self.edges:
                    raise InvalidGraph(f"rotation at {v} names unknown edge {eid}")
                if self.edges[eid][side] != v:
                    raise InvalidGraph(f"end {_end_str(end)} is not at {v}")
                if end in seen:
                    raise InvalidGraph(f"end {_end_str(end)} appears twice")
                seen.add(end)
        for eid, (u, w) in self.edges.items():
            if u not in vs or w not in vs:
                raise InvalidGraph(f"edge {eid} has an endpoint outside the vertex set")
            for side in (0, 1):
                if (eid, side) not in seen:
                    raise InvalidGraph(f"end {_end_str((eid, side))} missing from rotation")

    # -- basic queries -------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return len(self.edges)

    def degree(self, v: str) -> int:
        return len(self.rotation.get(v, []))

    def degrees(self) -> dict[str, int]:
        return {v: self.degree(v) for v in self.vertices}

    def other(self, end: End) -> str:
        eid, side = end
        return self.edges[eid][1 - side]

    def neighbors(self, v: str) -> list[str]:
        return [self.other(end) for end in self.rotation.get(v, [])]

    def multiplicity(self, u: str, w: str) -> int:
        target = {u, w}
        return sum(1 for a, b in self.edges.values() if {a, b} == target and (u != w or a == b))

    def edge_multiset(self) -> Counter:
        return Counter(frozenset(ends) for ends in self.edges.values())

    def is_simple(self) -> bool:
        if any(u == w for u, w in self.edges.values()):
            return False
        return all(c == 1 for c in self.edge_multiset().values())

    def digons(self) -> list[tuple[str, str, list[str]]]:
        """Vertex pairs joined by exactly two parallel (non-loop) edges."""
        groups: dict[frozenset, list[str]] = {}
        for eid, (u, w) in self.edges.items():
            if u != w:
                groups.setdefault(frozenset((u, w)), []).append(eid)
        out = []
        for pair, eids in groups.items():
            if len(eids) == 2:
                u, w = sorted(pair, key=natural_key)
                out.append((u, w, sorted(eids, key=natural_key)))
        return sorted(out, key=lambda d: (natural_key(d[0]), natural_key(d[1])))

    def copy(self) -> "PlaneMultigraph":
        return PlaneMultigraph(
            list(self.vertices), dict(self.edges), {v: list(r) for v, r in self.rotation.items()}
        )

    def fresh_edge_id(self, stem: str = "e") -> str:
        k = len(self.edges) + 1
        while f"{stem}{k}" in self.edges:
            k += 1
        return f"{stem}{k}"

    def fresh_vertex_id(self, stem: str = "u") -> str:
        vs = set(self.vertices)
        k = len(vs) + 1
        while f"{stem}{k}" in vs:
            k += 1
        return f"{stem}{k}"

    # -- embedding -----------------------------------------------------------

    def _successor(self) -> dict[End, End]:
        succ = {}
        for v in self.vertices:
            rot = self.rotation.get(v, [])
            for i, end in enumerate(rot):
                succ[end] = rot[(i + 1) % len(rot)]
        return succ

    def faces(self) -> list[list[End]]:
        """Face boundaries as cyclic lists of darts (edge, side of departure)."""
        succ = self._successor()
        seen: set[End] = set()
        faces = []
        for eid in sorted(self.edges, key=natural_key):
            for side in (0, 1):
                dart = (eid, side)
                if dart in seen:
                    continue
                face = []
                while dart not in seen:
                    seen.add(dart)
                    face.append(dart)
                    dart = succ[(dart[0], 1 - dart[1])]
                faces.append(face)
        return faces

    def euler_characteristic(self) -> int:
        return self.order - self.size + len(self.faces())

    def components(self, removed: Iterable[str] = ()) -> int:
        removed = set(removed)
        adj = _adjacency(self)
        left = [v for v in self.vertices if v not in removed]
        seen: set[str] = set()
        count = 0
        for s in left:
            if s in seen:
                continue
            count += 1
            seen.add(s)
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in adj[u]:
                    if w not in seen and w not in removed:
                        seen.add(w)
                        queue.append(w)
        return count

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        rotation = {}
        for v in sorted(self.vertices, key=natural_key):
            rot = self.rotation.get(v, [])
            if rot:
                k = min(range(len(rot)), key=lambda i: natural_key(_end_str(rot[i])))
                rot = rot[k:] + rot[:k]
            rotation[v] = [_end_str(e) for e in rot]
        return {
            "vertices": sorted(self.vertices, key=natural_key),
            "edges": [
                {"id": eid, "ends": list(self.edges[eid])} for eid in sorted(self.edges, key=natural_key)
            ],
            "rotation": rotation,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PlaneMultigraph":
        try:
            vertices = [str(v) for v in data["vertices"]]
            edges = {str(e["id"]): (str(e["ends"][0]), str(e["ends"][1])) for e in data["edges"]}
            rotation = {str(v): [_parse_end(s) for s in ends] for v, ends in data["rotation"].items()}
        except (KeyError, IndexError, TypeError) as exc:
            raise InvalidGraph(f"malformed graph JSON: {exc}") from exc
        if len(edges) != len(data["edges"]):
            raise InvalidGraph("duplicate edge ids")
        return cls(vertices, edges, rotation)


def _adjacency(G: PlaneMultigraph) -> dict[str, Counter]:
    adj: dict[str, Counter] = {v: Counter() for v in G.vertices}
    for u, w in G.edges.values():
        adj[u][w] += 1
        if u != w:
            adj[w][u] += 1
    return adj


def rotation_from_layout(
    vertices: list[str],
    edges: dict[str, tuple[str, str]],
    pos: dict[str, tuple[float, float]],
    bulge: dict[str, float] | None = None,
    override: dict[End, float] | None = None,
) -> dict[str, list[End]]:
    """Counterclockwise rotations read off a drawing.

    Each edge leaves its endpoints along the straight segment, turned by
    ``bulge`` radians (positive bulges to the right of ends[0] -> ends[1]);
    ``override`` fixes departure angles of individual ends.
    """
    bulge = bulge or {}
    override = override or {}
    angles: dict[str, list[tuple[float, End]]] = {v: [] for v in vertices}
    for eid, (u, w) in edges.items():
        theta = math.atan2(pos[w][1] - pos[u][1], pos[w][0] - pos[u][0])
        b = bulge.get(eid, 0.0)
        for side, v, ang in ((0, u, theta - b), (1, w, theta + math.pi + b)):
            ang = override.get((eid, side), ang)
            angles[v].append((ang % (2 * math.pi), (eid, side)))
    return {v: [end for _, end in sorted(angles[v])] for v in vertices}


# -- builders -------------------------------------------------------------------

_OCTA_POS = {
    "o1": (0.0, 2.0),
    "o2": (-math.sqrt(3.0), -1.0),
    "o3": (math.sqrt(3.0), -1.0),
    "o4": (0.0, -0.5),
    "o5": (0.25 * math.sqrt(3.0), 0.25),
    "o6": (-0.25 * math.sqrt(3.0), 0.25),
}
# outer triangle o1 o2 o3; inner triangle o4 o5 o6 with o4, o5, o6 opposite o1, o2, o3
_OCTA_EDGES = [
    ("o1", "o2"), ("o2", "o3"), ("o3", "o1"),
    ("o4", "o5"), ("o5", "o6"), ("o6", "o4"),
    ("o4", "o2"), ("o4", "o3"), ("o5", "o3"), ("o5", "o1"), ("o6", "o1"), ("o6", "o2"),
]


def build_octahedron() -> PlaneMultigraph:
    vertices = list(_OCTA_POS)
    edges = {f"e{k}": pair for k, pair in enumerate(_OCTA_EDGES, start=1)}
    return PlaneMultigraph(vertices, edges, rotation_from_layout(vertices, edges, _OCTA_POS))


def build_mini_gadget_octahedral() -> tuple[PlaneMultigraph, str]:
    """Octahedron with the outer edge o1-o2 replaced by a path through ``s``."""
    G, s = subdivide_edge(build_octahedron(), "e1", new_vertex="s")
    return G, s


def build_mini_bigadget_octahedral() -> tuple[PlaneMultigraph, str, str]:
    """Octahedron with outer vertex o1 split into degree-2 vertices ``s1``, ``s2``.

    ``s1`` keeps two consecutive ends of o1's rotation and ``s2`` the other
    two; both land on the merged outer face.
    """
    G = build_octahedron()
    rot = G.rotation["o1"]
    edges = dict(G.edges)
    rotation = {v: list(r) for v, r in G.rotation.items() if v != "o1"}
    for name, ends in (("s1", rot[:2]), ("s2", rot[2:])):
        rotation[name] = list(ends)
        for eid, side in ends:
            pair = list(edges[eid])
            pair[side] = name
            edges[eid] = (pair[0], pair[1])
    vertices = [v for v in G.vertices if v != "o1"] + ["s1", "s2"]
    return PlaneMultigraph(vertices, edges, rotation), "s1", "s2"


def build_small_multigraph(name: str) -> PlaneMultigraph:
    """Tiny plane multigraphs used as verification targets.

    ``digon4``: two vertices joined by four parallel edges (two crossing
    circles); ``doubled-triangle``: a triangle with every edge doubled (three
    mutually tangent circles); ``double-loop``: one vertex carrying two
    loops (two tangent circles).
    """
    if name == "double-loop":
        edges = {"l1": ("p1", "p1"), "l2": ("p1", "p1")}
        return PlaneMultigraph(["p1"], edges, {"p1": [("l1", 0), ("l1", 1), ("l2", 0), ("l2", 1)]})
    if name == "digon4":
        pos = {"p1": (0.0, 0.0), "p2": (1.0, 0.0)}
        pairs = [("p1", "p2")] * 4
        bulges = [0.4, 0.2, -0.2, -0.4]
    elif name == "doubled-triangle":
        pos = {"p1": (0.0, 0.0), "p2": (1.0, 0.0), "p3": (0.5, 0.8)}
        pairs = [("p1", "p2"), ("p1", "p2"), ("p2", "p3"), ("p2", "p3"), ("p3", "p1"), ("p3", "p1")]
        bulges = [0.2, -0.2] * 3
    else:
        raise ValueError(f"unknown small multigraph {name!r}")
    edges = {f"e{k}": pair for k, pair in enumerate(pairs, start=1)}
    bulge = {f"e{k}": b for k, b in enumerate(bulges, start=1)}
    vertices = list(pos)
    return PlaneMultigraph(vertices, edges, rotation_from_layout(vertices, edges, pos, bulge))


M_DIGON_PAIRS = ((1, 4), (2, 7), (3, 6), (5, 8))


def build_base_multigraph_m() -> tuple[PlaneMultigraph, dict[int, str], list[str]]:
    """The order-12 multigraph ``M``.

    Drawn with v1..v8 on a horizontal line, the cycle edge v8-v1 closing
    through infinity, x27 and x36 nested above the line and x14, x58 below
    it.  Returns the graph, the cycle labels ``{i: "v<i>"}`` and the red
    vertices.
    """
    labels = {i: f"v{i}" for i in range(1, 9)}
    reds = [f"x{i}{j}" for i, j in M_DIGON_PAIRS]
    pos = {labels[i]: (float(i), 0.0) for i in range(1, 9)}
    pos.update({"x14": (2.5, -1.5), "x27": (4.5, 3.0), "x36": (4.5, 1.2), "x58": (6.5, -1.5)})
    edges: dict[str, tuple[str, str]] = {}
    for i in range(1, 9):
        edges[f"c{i}"] = (labels[i], labels[i % 8 + 1])
    bulge = {}
    for (i, j), red in zip(M_DIGON_PAIRS, reds):
        for v in (i, j):
            edges[f"d{v}a"] = (labels[v], red)
            edges[f"d{v}b"] = (labels[v], red)
            bulge[f"d{v}a"] = 0.2
            bulge[f"d{v}b"] = -0.2
    override = {("c8", 0): 0.0, ("c8", 1): math.pi}
    vertices = [labels[i] for i in range(1, 9)] + reds
    rotation = rotation_from_layout(vertices, edges, pos, bulge, override)
    return PlaneMultigraph(vertices, edges, rotation), labels, reds


# -- local surgery ----------------------------------------------------------------


def subdivide_edge(
    G: PlaneMultigraph, e: str, new_vertex: str | None = None, new_edge: str | None = None
) -> tuple[PlaneMultigraph, str]:
    """Replace edge ``e = (u, w)`` by ``e = (u, s)`` and a new edge ``(s, w)``."""
    if e not in G.edges:
        raise NoSuchEdge(f"no edge {e!r}")
    s = new_vertex or G.fresh_vertex_id("s")
    if s in G.vertices:
        raise InvalidGraph(f"vertex {s!r} already exists")
    f = new_edge or G.fresh_edge_id(f"{e}_")
    if f in G.edges:
        raise InvalidGraph(f"edge {f!r} already exists")
    H = G.copy()
    u, w = G.edges[e]
    H.edges[e] = (u, s)
    H.edges[f] = (s, w)
    H.vertices.append(s)
    rot_w = H.rotation[w]
    rot_w[rot_w.index((e, 1))] = (f, 1)
    H.rotation[s] = [(e, 1), (f, 0)]
    H.check()
    return H, s


def prefixed(H: PlaneMultigraph, prefix: str) -> PlaneMultigraph:
    """Copy of ``H`` with every vertex and edge id prefixed."""
    return PlaneMultigraph(
        [prefix + v for v in H.vertices],
        {prefix + e: (prefix + u, prefix + w) for e, (u, w) in H.edges.items()},
        {prefix + v: [(prefix + e, s) for e, s in rot] for v, rot in H.rotation.items()},
    )


def _disjoint_union(G: PlaneMultigraph, H: PlaneMultigraph) -> PlaneMultigraph:
    if set(G.vertices) & set(H.vertices) or set(G.edges) & set(H.edges):
        raise InvalidGraph("graphs to be joined share vertex or edge ids")
    return PlaneMultigraph(
        G.vertices + H.vertices,
        {**G.edges, **H.edges},
        {**{v: list(r) for v, r in G.rotation.items()}, **{v: list(r) for v, r in H.rotation.items()}},
    )


def _identify(U: PlaneMultigraph, keep: str, drop: str, rotation: list[End]) -> PlaneMultigraph:
    edges = {}
    for eid, (a, b) in U.edges.items():
        edges[eid] = (keep if a == drop else a, keep if b == drop else b)
    rot = {v: list(r) for v, r in U.rotation.items() if v != drop}
    rot[keep] = rotation
    return PlaneMultigraph([v for v in U.vertices if v != drop], edges, rot)


def attach_at_degree2(G: PlaneMultigraph, u: str, H: PlaneMultigraph, a: str, prefix: str = "") -> PlaneMultigraph:
    """Glue ``H`` onto ``G`` by identifying degree-2 vertices ``a`` and ``u``.

    ``H``'s two ends at ``a`` are inserted between ``G``'s two ends at ``u``;
    the merged vertex keeps the id ``u``.
    """
    if G.degree(u) != 2 or H.degree(a) != 2:
        raise DegreeMismatch(f"attachment needs degree 2 on both sides, got {G.degree(u)} and {H.degree(a)}")
    if prefix:
        H, a = prefixed(H, prefix), prefix + a
    U = _disjoint_union(G, H)
    g1, g2 = G.rotation[u]
    h1, h2 = U.rotation[a]
    return _identify(U, u, a, [g1, h1, h2, g2])


def _shared_face_corners(H: PlaneMultigraph, a: str, b: str) -> tuple[tuple[End, End], tuple[End, End]]:
    """For a face through both ``a`` and ``b``: (arrival, departure) ends at each."""
    succ = H._successor()
    for face in H.faces():
        corners: dict[str, tuple[End, End]] = {}
        for k, dart in enumerate(face):
            nxt = face[(k + 1) % len(face)]
            head = H.edges[dart[0]][1 - dart[1]]
            arrival = (dart[0], 1 - dart[1])
            if succ[arrival] == nxt and head in (a, b) and head not in corners:
                corners[head] = (arrival, nxt)
        if a in corners and b in corners:
            return corners[a], corners[b]
    raise InvalidGraph(f"{a} and {b} do not share a face")


def attach_bigadget(
    G: PlaneMultigraph, p: str, q: str, H: PlaneMultigraph, a: str, b: str, prefix: str = ""
) -> PlaneMultigraph:
    """Glue ``H`` onto adjacent degree-2 vertices ``p``, ``q`` of ``G`` (a -> p, b -> q).

    Equivalent to adding the edge ``ab`` inside a common face of ``H`` and
    gluing that edge onto ``pq``, which keeps the result plane.
    """
    if G.degree(p) != 2 or G.degree(q) != 2 or H.degree(a) != 2 or H.degree(b) != 2:
        raise DegreeMismatch("bigadget attachment needs four degree-2 vertices")
    pq = [end for end in G.rotation[p] if G.other(end) == q]
    if not pq:
        raise InvalidGraph(f"{p} and {q} are not adjacent")
    end_p = pq[0]
    end_q = (end_p[0], 1 - end_p[1])
    if prefix:
        H, a, b = prefixed(H, prefix), prefix + a, prefix + b
    (x, y), (u_, v_) = _shared_face_corners(H, a, b)
    # with ab inserted into that face: rot(a) = (ab, y, x), rot(b) = (ba, v, u)
    h1, h2 = y, x
    k1, k2 = v_, u_
    U = _disjoint_union(G, H)
    rot_p = list(G.rotation[p])
    i = rot_p.index(end_p)
    rot_p[i + 1 : i + 1] = [h1, h2]
    rot_q = list(G.rotation[q])
    j = rot_q.index(end_q)
    rot_q[j:j] = [k1, k2]
    U = _identify(U, p, a, rot_p)
    return _identify(U, q, b, rot_q)


@dataclass
class GadgetInstance:
    """Role labels of one (bi)gadget-subgraph and the vertex sets of its two mini-(bi)gadgets."""

    roles: dict[str, str]
    mini_gadget_vertices: tuple[frozenset, ...]
    kind: str = "gadget"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "roles": dict(sorted(self.roles.items())),
            "mini_gadget_vertices": [sorted(s, key=natural_key) for s in self.mini_gadget_vertices],
        }


def build_counterexample_68(variant: str = "gadget") -> tuple[PlaneMultigraph, list[GadgetInstance]]:
    """One of the two simple 4-regular plane graphs of order 68.

    Every digon v-x of ``M`` gets one edge subdivided; the ``gadget``
    variant glues an octahedral mini-gadget at the subdivision vertex, the
    ``bigadget`` variant subdivides the same edge twice (v - w_i - w_i' - x)
    and glues an octahedral mini-bigadget onto the middle edge.
    """
    if variant not in ("gadget", "bigadget"):
        raise ValueError(f"unknown variant {variant!r}")
    G, labels, reds = build_base_multigraph_m()
    instances = []
    for (i, j), red in zip(M_DIGON_PAIRS, reds):
        roles = {"w": red, "v1": labels[i], "v2": labels[j]}
        sets = []
        for k, v in ((1, i), (2, j)):
            prefix = f"g{v}_"
            if variant == "gadget":
                G, s = subdivide_edge(G, f"d{v}a", new_vertex=f"s{v}", new_edge=f"d{v}c")
                H, a = build_mini_gadget_octahedral()
                G = attach_at_degree2(G, s, H, a, prefix)
                roles[f"w{k}"] = s
                sets.append(frozenset([s] + [prefix + x for x in H.vertices if x != a]))
            else:
                G, p = subdivide_edge(G, f"d{v}a", new_vertex=f"s{v}", new_edge=f"d{v}c")
                G, q = subdivide_edge(G, f"d{v}c", new_vertex=f"t{v}", new_edge=f"d{v}d")
                H, a, b = build_mini_bigadget_octahedral()
                G = attach_bigadget(G, p, q, H, a, b, prefix)
                roles[f"w{k}"] = p
                roles[f"w{k}'"] = q
                sets.append(frozenset([p, q] + [prefix + x for x in H.vertices if x not in (a, b)]))
        instances.append(GadgetInstance(roles, tuple(sets), variant))
    return G, instances


def prune_mini_gadget(G: PlaneMultigraph, inst: GadgetInstance, which: int) -> PlaneMultigraph:
    """Delete one mini-(bi)gadget and join ``v_which`` to ``w`` by a new edge.

    The new edge takes over the rotation positions of the two deleted
    boundary edges, so the result stays plane and 4-regular.
    """
    if which not in (1, 2):
        raise InvalidInstance("which must be 1 or 2")
    try:
        S = set(inst.mini_gadget_vertices[which - 1])
        v, w = inst.roles[f"v{which}"], inst.roles["w"]
    except (IndexError, KeyError) as exc:
        raise InvalidInstance(f"incomplete instance: {exc}") from exc
    vs = set(G.vertices)
    if not S <= vs or v not in vs or w not in vs or v in S or w in S:
        raise InvalidInstance("instance vertices do not match the graph")
    boundary = {}
    for eid, (a, b) in G.edges.items():
        inside = (a in S) + (b in S)
        if inside == 1:
            outer = b if a in S else a
            if outer in boundary or outer not in (v, w):
                raise InvalidInstance(f"mini-gadget meets the host outside {v}, {w}")
            boundary[outer] = (eid, 1 if a in S else 0)
    if set(boundary) != {v, w}:
        raise InvalidInstance("mini-gadget must meet the host exactly at v_i and w")
    new = G.fresh_edge_id("n")
    edges = {eid: pair for eid, pair in G.edges.items() if not (set(pair) & S)}
    edges[new] = (v, w)
    rotation = {}
    for x in G.vertices:
        if x in S:
            continue
        rot = []
        for end in G.rotation[x]:
            if end == boundary.get(v) and x == v:
                rot.append((new, 0))
            elif end == boundary.get(w) and x == w:
                rot.append((new, 1))
            else:
                rot.append(end)
        rotation[x] = rot
    return PlaneMultigraph([x for x in G.vertices if x not in S], edges, rotation)


# -- validation -------------------------------------------------------------------


@dataclass
class ValidationReport:
    order: int
    size: int
    regular4: bool
    simple: bool
    euler_ok: bool
    two_connected: bool
    three_connected: bool
    faces: int = 0
    components: int = 1

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _separated_by(G: PlaneMultigraph, k: int) -> bool:
    """Whether removing some set of at most ``k`` vertices disconnects ``G``."""
    for size in range(1, k + 1):
        if G.order - size < 2:
            break
        for cut in combinations(G.vertices, size):
            if G.components(cut) > 1:
                return True
    return False


def is_k_connected(G: PlaneMultigraph, k: int) -> bool:
    if G.order == 0 or G.components() != 1:
        return False
    if G.order <= k:
        return False
    return not _separated_by(G, k - 1)


def validate(G: PlaneMultigraph) -> ValidationReport:
    comps = G.components()
    faces = len(G.faces())
    return ValidationReport(
        order=G.order,
        size=G.size,
        regular4=all(d == 4 for d in G.degrees().values()),
        simple=G.is_simple(),
        euler_ok=G.order - G.size + faces == 1 + comps,
        two_connected=is_k_connected(G, 2),
        three_connected=is_k_connected(G, 3),
        faces=faces,
        components=comps,
    )


# -- isomorphism ------------------------------------------------------------------


def _refine(adjs: list[dict[str, Counter]]) -> list[dict[str, int]]:
    """Joint colour refinement on several multigraphs (shared palette)."""
    colors = []
    for adj in adjs:
        colors.append({v: (sum(c.values()) + c[v], c[v]) for v, c in adj.items()})
    n_classes = -1
    while True:
        sigs = []
        for adj, col in zip(adjs, colors):
            sigs.append(
                {
                    v: (col[v], tuple(sorted((col[w], m) for w, m in adj[v].items() if w != v)))
                    for v in adj
                }
            )
        palette = {s: k for k, s in enumerate(sorted({s for sig in sigs for s in sig.values()}, key=repr))}
        colors = [{v: palette[s] for v, s in sig.items()} for sig in sigs]
        if len(palette) == n_classes:
            return colors
        n_classes = len(palette)


def isomorphic(G: PlaneMultigraph, H: PlaneMultigraph) -> dict[str, str] | None:
    """A vertex bijection G -> H preserving all edge multiplicities, or None."""
    if G.order != H.order or G.size != H.size:
        return None
    adj_g, adj_h = _adjacency(G), _adjacency(H)
    col_g, col_h = _refine([adj_g, adj_h])
    if Counter(col_g.values()) != Counter(col_h.values()):
        return None
    by_color: dict[int, list[str]] = {}
    for v in H.vertices:
        by_color.setdefault(col_h[v], []).append(v)
    class_size = Counter(col_g.values())

    # match in an order that keeps each new vertex adjacent to matched ones
    order: list[str] = []
    placed: set[str] = set()
    remaining = sorted(G.vertices, key=lambda v: (class_size[col_g[v]], natural_key(v)))
    while remaining:
        best = max(remaining, key=lambda v: (sum(1 for w in adj_g[v] if w in placed), -class_size[col_g[v]]))
        order.append(best)
        placed.add(best)
        remaining.remove(best)

    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(g: str, h: str) -> bool:
        if adj_g[g][g] != adj_h[h][h]:
            return False
        for g2, h2 in mapping.items():
            if adj_g[g][g2] != adj_h[h][h2]:
                return False
        return True

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        g = order[k]
        for h in by_color[col_g[g]]:
            if h in used or not consistent(g, h):
                continue
            mapping[g] = h
            used.add(h)
            if extend(k + 1):
                return True
            del mapping[g]
            used.discard(h)
        return False

    return dict(mapping) if extend(0) else None
