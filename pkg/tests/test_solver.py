import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circrep.chains import build_chain
from circrep.errors import DimensionMismatch, UnknownKind
from circrep.solver import (
    DEFAULT_MU,
    Assignment,
    ConstraintSystem,
    build_constraint_system,
    residual_norm,
    residuals,
    solve_feasibility,
)


def test_induced_system_structure():
    s = build_constraint_system("induced")
    assert s.equalities == ((1, 4), (2, 7), (3, 6), (5, 8))
    assert set(s.disjoint) == {(1, 5), (4, 8), (1, 8), (4, 5), (2, 3), (2, 6), (3, 7), (6, 7)}
    assert s.ordering == tuple((i, i + 1) for i in range(1, 8))
    assert s.n_residuals == 4 + 8 + 8


def test_symmetric_system_structure():
    s = build_constraint_system("symmetric")
    assert len(s.equalities) == 8
    assert set(s.disjoint) == {(1, 5), (4, 8), (2, 6), (3, 7)}


def test_single_chain_system_structure():
    for name in ("single_chain_top", "single-chain"):
        s = build_constraint_system(name)
        assert s.indices == (2, 3, 6, 7)
        assert len(s.equalities) == 4
        assert s.disjoint == ((2, 6), (3, 7))


def test_unknown_kind():
    with pytest.raises(UnknownKind):
        build_constraint_system("triangle")


def test_exact_chain_has_zero_residual():
    s = build_constraint_system("single_chain_top")
    # a scaled copy of the unit chain, whose non-touching pairs (2,6), (3,7) are disjoint
    chain = build_chain(1.3, 1.3, 2.0, 1.3)
    a = Assignment(s.indices, tuple(c.t for c in chain), tuple(c.r for c in chain))
    assert np.max(np.abs(residuals(s, a))) <= 1e-12


def test_misordered_assignment_has_positive_hinge():
    s = build_constraint_system("single_chain_top")
    chain = build_chain(1.0, 1.0)
    t = [c.t for c in chain]
    t[0], t[1] = t[1], t[0]
    a = Assignment(s.indices, tuple(t), tuple(c.r for c in chain))
    res = residuals(s, a)
    n_eq = len(s.equalities)
    assert res[n_eq] > 0  # first ordering term: t_2 before t_3


def test_dimension_mismatch():
    s = build_constraint_system("induced")
    with pytest.raises(DimensionMismatch):
        residuals(s, Assignment((2, 3, 6, 7), (0, 1, 2, 3), (1, 1, 1, 1)))


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=8, max_size=8),
    st.lists(st.floats(1e-3, 1e3), min_size=8, max_size=8),
)
def test_symmetric_system_never_vanishes(t, r):
    s = build_constraint_system("symmetric")
    a = Assignment(s.indices, tuple(t), tuple(r))
    assert residual_norm(s, a) > 0


def test_single_chain_solves():
    res = solve_feasibility(build_constraint_system("single_chain_top"), seed=1, restarts=20, iterations=500)
    assert res.residual < 1e-10


def test_empty_system_has_zero_residual():
    s = ConstraintSystem(indices=(1, 2), equalities=(), ordering=(), disjoint=())
    res = solve_feasibility(s, seed=1, restarts=3, iterations=5)
    assert res.residual == 0.0


def test_solver_is_deterministic():
    s = build_constraint_system("symmetric")
    a = solve_feasibility(s, seed=4, restarts=6, iterations=150)
    b = solve_feasibility(s, seed=4, restarts=6, iterations=150)
    assert a.to_json("symmetric") == b.to_json("symmetric")
    assert [c[0] for c in a.candidates] == [c[0] for c in b.candidates]


def test_restarts_are_monotone():
    s = build_constraint_system("induced")
    values = [solve_feasibility(s, seed=2, restarts=k, iterations=150).residual for k in (1, 3, 6, 12)]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_restart_trajectories_do_not_interact():
    s = build_constraint_system("symmetric")
    few = solve_feasibility(s, seed=9, restarts=3, iterations=100)
    many = solve_feasibility(s, seed=9, restarts=8, iterations=100)
    assert [c[0] for c in many.candidates[:3]] == [c[0] for c in few.candidates]


@pytest.mark.parametrize("mu", [0.01, 0.02, 0.03])
def test_residual_floor_scales_with_margin(mu):
    # the floor of both infeasible systems sits close to 8 * mu**2
    for kind in ("induced", "symmetric"):
        res = solve_feasibility(build_constraint_system(kind, mu=mu), seed=1, restarts=30, iterations=800)
        assert 7.0 <= res.residual / mu**2 <= 9.0


def test_assignment_json_roundtrip():
    s = build_constraint_system("symmetric")
    res = solve_feasibility(s, seed=1, restarts=2, iterations=20)
    data = res.to_json("symmetric")
    assert Assignment.from_json(data) == res.best
    assert data["residual"] == res.residual
    cfg = res.best.to_config("symmetric")
    assert cfg.t == list(res.best.t)


def test_default_margin():
    assert build_constraint_system("induced").mu == DEFAULT_MU
