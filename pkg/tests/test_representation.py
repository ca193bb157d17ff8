import math
import random
import xml.etree.ElementTree as ET

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from circrep.errors import IoFailure, PoleOnCircle, UnknownId
from circrep.geom import GeneralizedCircle, MobiusMap, Point, Tag
from circrep.graphs import build_small_multigraph, validate
from circrep.representation import (
    CircleSet,
    crossing_pair,
    extract_contact_graph,
    prune_circles,
    render_svg,
    tangent_triangle,
    transport,
    triple_point,
    verify_representation,
)

C = GeneralizedCircle.circle
SVG = "{http://www.w3.org/2000/svg}"

FIXTURES = [
    (crossing_pair, "digon4"),
    (tangent_triangle, "doubled-triangle"),
]


def random_admissible_map(rng: random.Random, cs: CircleSet, margin: float = 0.05) -> MobiusMap:
    """A random Möbius map whose finite pole stays clear of every member."""
    while True:
        a, b, c, d = (complex(rng.uniform(-3, 3), rng.uniform(-3, 3)) for _ in range(4))
        if abs(a * d - b * c) < 0.1:
            continue
        m = MobiusMap(a, b, c, d)
        pole = m.pole
        if not isinstance(pole, Point) or all(g.distance_to(pole) > margin for _, g in cs.members):
            return m


@pytest.mark.parametrize("make, target", FIXTURES)
def test_fixture_verifies(make, target):
    rep = verify_representation(make(), build_small_multigraph(target))
    assert rep.ok and rep.failure_reason is None
    assert len(rep.mapping) == build_small_multigraph(target).order


def test_crossing_pair_contact_structure():
    cs = extract_contact_graph(crossing_pair())
    assert len(cs.points) == 2
    assert all(p.tag is Tag.CROSSING for p in cs.points)
    # hand solution: x = 1/2, y = ±sqrt(3)/2
    ys = sorted(p.point.y for p in cs.points)
    assert ys == pytest.approx([-math.sqrt(3) / 2, math.sqrt(3) / 2], abs=1e-12)
    assert {len(a) for a in cs.arcs.values()} == {2}
    # a crossing alternates the two circles around the vertex
    for v, rot in cs.graph.rotation.items():
        members = [next(a.member for arcs in cs.arcs.values() for a in arcs if a.edge == e) for e, _ in rot]
        assert members[0] == members[2] and members[1] == members[3] and members[0] != members[1]


def test_tangent_triangle_contact_structure():
    cs = extract_contact_graph(tangent_triangle())
    assert len(cs.points) == 3 and all(p.tag is Tag.TOUCHING for p in cs.points)
    rep = validate(cs.graph)
    assert rep.regular4 and rep.euler_ok
    assert len(cs.graph.digons()) == 3


def test_triple_point_rejected():
    rep = verify_representation(triple_point(), build_small_multigraph("doubled-triangle"))
    assert not rep.ok and rep.mapping is None
    assert rep.failure_reason == "TriplePoint"


def test_free_circle_rejected():
    cs = CircleSet([("c1", C(0, 0, 1)), ("c2", C(1, 0, 1)), ("c3", C(10, 0, 1))])
    rep = verify_representation(cs, build_small_multigraph("digon4"))
    assert rep.failure_reason == "FreeCircle"


def test_wrong_target_not_isomorphic():
    rep = verify_representation(crossing_pair(), build_small_multigraph("doubled-triangle"))
    assert not rep.ok and rep.failure_reason == "NotIsomorphic"


def test_line_member_closes_through_infinity():
    cs = CircleSet([("c1", C(0, 0, 1)), ("axis", GeneralizedCircle.line(0, 1, 0))])
    assert verify_representation(cs, build_small_multigraph("digon4")).ok
    assert CircleSet.from_json(cs.to_json()).to_json() == cs.to_json()


def test_digon_checks_on_tangent_triangle():
    rep = verify_representation(tangent_triangle(), build_small_multigraph("doubled-triangle"))
    assert len(rep.digons) == 3
    # both arcs of each digon are the two halves of one circle cut at its two touching points
    for d in rep.digons:
        assert d.touching and d.consecutive and d.same_circle


@pytest.mark.parametrize("make, target", FIXTURES)
def test_verdict_survives_random_transports(make, target):
    rng = random.Random(2024)
    cs, G = make(), build_small_multigraph(target)
    for _ in range(100):
        image = transport(cs, random_admissible_map(rng, cs))
        assert verify_representation(image, G).ok


def test_triple_point_rejection_survives_transports():
    rng = random.Random(7)
    cs, G = triple_point(), build_small_multigraph("doubled-triangle")
    for _ in range(100):
        rep = verify_representation(transport(cs, random_admissible_map(rng, cs)), G)
        assert rep.failure_reason == "TriplePoint"


def test_pole_inside_a_face():
    # inverting at the centre of the middle gap turns the outer face into a bounded one
    cs = tangent_triangle()
    m = MobiusMap(0, 1, 1, -complex(1, 1 / math.sqrt(3)))
    assert verify_representation(transport(cs, m), build_small_multigraph("doubled-triangle")).ok


def test_pole_on_circle_raises():
    m = MobiusMap(0, 1, 1, -complex(1, 0))
    with pytest.raises(PoleOnCircle):
        transport(crossing_pair(), m)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 20), st.floats(-50, 50), st.floats(-50, 50))
def test_similarity_invariance(s, dx, dy):
    def moved(cs):
        return CircleSet([(k, C(s * c.cx + dx, s * c.cy + dy, s * c.r)) for k, c in cs.members])

    for make, target in FIXTURES:
        assert verify_representation(moved(make()), build_small_multigraph(target)).ok
    assert verify_representation(moved(triple_point()), build_small_multigraph("doubled-triangle")).failure_reason == (
        "TriplePoint"
    )


@settings(max_examples=100, deadline=None)
@given(st.floats(0.3, 3), st.floats(0, 2 * math.pi), st.floats(0.3, 3))
def test_random_touching_triples_are_four_regular(r1, ang, r2):
    # three mutually touching circles: a chain c1 - c2 touching, then c3 touching both
    c1 = C(0, 0, r1)
    c2 = C((r1 + r2) * math.cos(ang), (r1 + r2) * math.sin(ang), r2)
    r3 = 1.0
    # centre of c3 at distances r1 + r3 and r2 + r3 from the other centres
    d = r1 + r2
    a = ((r1 + r3) ** 2 - (r2 + r3) ** 2 + d * d) / (2 * d)
    h = math.sqrt(max((r1 + r3) ** 2 - a * a, 0.0))
    assume(h > 1e-3)
    ux, uy = math.cos(ang), math.sin(ang)
    c3 = C(a * ux - h * uy, a * uy + h * ux, r3)
    cs = CircleSet([("c1", c1), ("c2", c2), ("c3", c3)])
    structure = extract_contact_graph(cs, tol=1e-9)
    rep = validate(structure.graph)
    assert rep.regular4 and rep.euler_ok
    assert verify_representation(cs, build_small_multigraph("doubled-triangle"), tol=1e-9).ok


def test_prune_to_single_circle_is_unsupported():
    remaining, rep = prune_circles(tangent_triangle(), ["c3"], build_small_multigraph("digon4"))
    assert remaining.ids == ["c1", "c2"]
    assert not rep.ok and rep.unsupported_surgery


def test_prune_stray_circle():
    # a detached third circle makes the set invalid; deleting it leaves the crossing pair
    cs = CircleSet([("c1", C(0, 0, 1)), ("c2", C(1, 0, 1)), ("c3", C(0.5, 3, 1))])
    remaining, rep = prune_circles(cs, ["c3"], build_small_multigraph("digon4"))
    assert rep.ok and not rep.unsupported_surgery
    assert len(remaining) == 2


def test_prune_unknown_id():
    with pytest.raises(UnknownId):
        prune_circles(crossing_pair(), ["nope"], build_small_multigraph("digon4"))
    with pytest.raises(UnknownId):
        crossing_pair().get("nope")


def test_circle_set_validation():
    with pytest.raises(ValueError):
        CircleSet([("a", C(0, 0, 1)), ("a", C(1, 0, 1))])
    with pytest.raises(ValueError):
        CircleSet([("a", GeneralizedCircle.line(0, 1, 0)), ("b", GeneralizedCircle.line(1, 0, 0))])


def test_report_json():
    rep = verify_representation(tangent_triangle(), build_small_multigraph("doubled-triangle"))
    data = rep.to_json()
    assert data["ok"] is True and len(data["digons"]) == 3
    assert set(data["mapping"]) == {"p1", "p2", "p3"}


def test_render_circle_set(tmp_path):
    path = tmp_path / "tri.svg"
    render_svg(tangent_triangle(), path)
    root = ET.parse(path).getroot()
    circles = root.findall(f"{SVG}circle")
    assert len([c for c in circles if c.get("id")]) == 3
    assert len([c for c in circles if c.get("fill") == "red"]) == 3


def test_render_crossing_and_line(tmp_path):
    cs = CircleSet([("c1", C(0, 0, 1)), ("axis", GeneralizedCircle.line(0, 1, 0))])
    path = tmp_path / "line.svg"
    render_svg(cs, path)
    root = ET.parse(path).getroot()
    assert len(root.findall(f"{SVG}line")) == 1
    assert len([c for c in root.findall(f"{SVG}circle") if c.get("fill") == "blue"]) == 2


def test_render_empty_and_graph(tmp_path):
    render_svg(CircleSet([]), tmp_path / "empty.svg")
    assert ET.parse(tmp_path / "empty.svg").getroot().findall(f"{SVG}circle") == []
    G = build_small_multigraph("doubled-triangle")
    render_svg(G, tmp_path / "g.svg")
    root = ET.parse(tmp_path / "g.svg").getroot()
    assert len(root.findall(f"{SVG}path")) == 6
    assert len([c for c in root.findall(f"{SVG}circle") if c.get("class") == "vertex"]) == 3


def test_render_io_failure(tmp_path):
    with pytest.raises(IoFailure):
        render_svg(crossing_pair(), tmp_path / "missing" / "x.svg")
