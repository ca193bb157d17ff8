"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

All tolerances and budgets are pinned below.  A criterion reports FAIL
(and the test fails) rather than loosening a constant.
"""

import hashlib
import json
import math
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from circrep.chains import (
    AxisTangentCircle,
    OctupleConfig,
    build_chain,
    contradiction_certificate,
    f_gap,
    f_gap_gradient,
    inner_tangent_circle,
    interleave,
    outer_tangent_circle,
    replace_top,
    tangent_gap,
)
from circrep.errors import PreconditionError
from circrep.geom import MobiusMap, Point
from circrep.graphs import (
    build_base_multigraph_m,
    build_counterexample_68,
    build_mini_bigadget_octahedral,
    build_mini_gadget_octahedral,
    build_octahedron,
    build_small_multigraph,
    isomorphic,
    prune_mini_gadget,
    validate,
)
from circrep.representation import crossing_pair, tangent_triangle, transport, triple_point, verify_representation
from circrep.solver import build_constraint_system, solve_feasibility

# criterion 1 and 2 budgets
GRAPH_SUITE_SECONDS = 1.0
PRUNE_SECONDS = 5.0
# criterion 3
CHAIN_SAMPLES = 1000
CHAIN_LAW_TOL = 1e-9
SPECIAL_VALUE_TOL = 1e-12
GRID_N = 100
GRID_LO, GRID_HI = 0.1, 10.0
GRADIENT_TOL = 1e-6
FD_STEP = 1e-6
MONOTONE_PAIRS = 10_000
# criterion 4
REPLACEMENT_SAMPLES = 500
# criterion 5
SOLVE_SEED = 1
SOLVE_RESTARTS = 100
SOLVE_ITERS = 2000
FLOOR = 1e-3
CONTROL_TOL = 1e-10
SOLVE_SECONDS = 60.0
# criterion 6
CERTIFICATE_GATE = 1e-2
INTERLEAVED_MAGNITUDE = 0.29
INTERLEAVED_TOL = 0.02
# criterion 7
TRANSPORTS = 100
TRANSPORT_SEED = 2024
POLE_MARGIN = 0.05
# criterion 8
DETERMINISM_RESTARTS = 20
DETERMINISM_ITERS = 300


@pytest.fixture
def say(capsys):
    def emit(k: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}")

    return emit


# -- criterion 1 -------------------------------------------------------------------


def test_criterion_1_graph_suite(say):
    start = time.perf_counter()
    M = validate(build_base_multigraph_m()[0])
    gadget = validate(build_counterexample_68("gadget")[0])
    bigadget = validate(build_counterexample_68("bigadget")[0])
    elapsed = time.perf_counter() - start
    checks = {
        "M order 12": M.order == 12,
        "M size 24": M.size == 24,
        "M 4-regular": M.regular4,
        "M 2-connected": M.two_connected,
        "M Euler": M.euler_ok,
    }
    for name, rep in (("gadget", gadget), ("bigadget", bigadget)):
        checks[f"{name} order 68"] = rep.order == 68
        checks[f"{name} size 136"] = rep.size == 136
        checks[f"{name} simple"] = rep.simple
        checks[f"{name} 4-regular"] = rep.regular4
        checks[f"{name} Euler"] = rep.euler_ok
    checks["bigadget 2-connected"] = bigadget.two_connected
    checks["gadget not 2-connected"] = not gadget.two_connected
    checks[f"runtime < {GRAPH_SUITE_SECONDS}s"] = elapsed < GRAPH_SUITE_SECONDS
    failed = [k for k, v in checks.items() if not v]
    say(1, not failed, f"graph suite ({elapsed:.3f}s){' failed: ' + ', '.join(failed) if failed else ''}")
    assert not failed


# -- criterion 2 -------------------------------------------------------------------


def test_criterion_2_pruning_round_trip(say):
    start = time.perf_counter()
    G, instances = build_counterexample_68("gadget")
    steps, regular_every_step = 0, True
    for inst in instances:
        for which in (1, 2):
            G = prune_mini_gadget(G, inst, which)
            steps += 1
            regular_every_step &= all(d == 4 for d in G.degrees().values())
    iso = isomorphic(G, build_base_multigraph_m()[0]) is not None
    elapsed = time.perf_counter() - start
    ok = steps == 8 and regular_every_step and iso and elapsed < PRUNE_SECONDS
    say(2, ok, f"{steps} prunes, 4-regular throughout={regular_every_step}, isomorphic to M={iso} ({elapsed:.3f}s)")
    assert ok


# -- criterion 3 -------------------------------------------------------------------


def test_criterion_3_chain_identities(say):
    rng = random.Random(3)
    worst_law = 0.0
    for _ in range(CHAIN_SAMPLES):
        l, r = math.exp(rng.uniform(-3, 3)), math.exp(rng.uniform(-3, 3))
        chain = build_chain(l, r, rng.uniform(-10, 10), math.exp(rng.uniform(-3, 3)))
        t = [c.t for c in chain]
        gl, m, gr = t[1] - t[0], t[2] - t[1], t[3] - t[2]
        n = t[3] - t[0]
        worst_law = max(worst_law, abs(m * n - gl * gr) / (n * n))
    law_ok = worst_law <= CHAIN_LAW_TOL

    special_err = max(
        abs(f_gap(1, 1) - (math.sqrt(2) - 1)),
        abs(f_gap(1, 2) - (-3 + math.sqrt(17)) / 2),
    )
    special_ok = special_err <= SPECIAL_VALUE_TOL

    grid = np.linspace(GRID_LO, GRID_HI, GRID_N)
    worst_grad = 0.0
    for l in grid:
        for r in grid:
            dl, dr = f_gap_gradient(l, r)
            fd_l = (f_gap(l + FD_STEP, r) - f_gap(l - FD_STEP, r)) / (2 * FD_STEP)
            fd_r = (f_gap(l, r + FD_STEP) - f_gap(l, r - FD_STEP)) / (2 * FD_STEP)
            worst_grad = max(worst_grad, abs(dl - fd_l), abs(dr - fd_r))
    grad_ok = worst_grad <= GRADIENT_TOL

    rng = random.Random(33)
    mono_fail = 0
    for _ in range(MONOTONE_PAIRS):
        l1, r1 = rng.uniform(0.01, 10), rng.uniform(0.01, 10)
        l2, r2 = l1 * rng.uniform(1.0001, 3), r1 * rng.choice([1.0, rng.uniform(1.0001, 3)])
        if rng.random() < 0.5:
            l1, r1, l2, r2 = r1, l1, r2, l2
        mono_fail += not f_gap(l1, r1) < f_gap(l2, r2)
    mono_ok = mono_fail == 0

    ok = law_ok and special_ok and grad_ok and mono_ok
    say(
        3,
        ok,
        f"chain law worst {worst_law:.2e}, special values {special_err:.1e}, "
        f"gradient worst {worst_grad:.1e}, monotonicity failures {mono_fail}",
    )
    assert ok


# -- criterion 4 -------------------------------------------------------------------


def random_one_sided_input(rng: random.Random):
    """C2, C3, C6, C7 above the axis, (3,6) and (2,7) touching, other pairs disjoint, t3 < t6 < t7."""
    A = AxisTangentCircle
    while True:
        r2 = math.exp(rng.uniform(-2, 2))
        r6 = r2 * rng.uniform(0.05, 0.95)
        t6 = 2 * math.sqrt(r2 * r6) * rng.uniform(1.05, 4)
        C2, C6 = A(0.0, r2), A(t6, r6)
        r3 = inner_tangent_circle(C2, C6).r * rng.uniform(0.05, 0.95)
        r7 = outer_tangent_circle(C2, C6).r * rng.uniform(1.05, 3)
        C3 = A(t6 - tangent_gap(r3, r6), r3)
        C7 = A(tangent_gap(r2, r7), r7)
        valid = 0 < C3.t < t6 < C7.t
        valid = valid and C3.t > tangent_gap(r2, r3) and C7.t - t6 > tangent_gap(r6, r7)
        valid = valid and C7.t - C3.t > tangent_gap(r3, r7)
        if valid:
            return C2, C3, C6, C7


def test_criterion_4_replacement_orderings(say):
    rng = random.Random(4)
    violations = 0
    for _ in range(REPLACEMENT_SAMPLES):
        C2, C3, C6, C7 = random_one_sided_input(rng)
        C3n, C7n, _ = replace_top(C2, C3, C6, C7)
        # recomputed here from the returned circles, not read from the claims dict
        violations += not C3n.t < C3.t
        violations += not C6.t < C7n.t < C7.t
    say(4, violations == 0, f"{REPLACEMENT_SAMPLES} inputs, {violations} ordering violations")
    assert violations == 0


# -- criterion 5 -------------------------------------------------------------------


@pytest.fixture(scope="module")
def floor_runs():
    start = time.perf_counter()
    runs = {
        kind: solve_feasibility(
            build_constraint_system(kind), seed=SOLVE_SEED, restarts=SOLVE_RESTARTS, iterations=SOLVE_ITERS
        )
        for kind in ("symmetric", "induced", "single_chain_top")
    }
    return runs, time.perf_counter() - start


def test_criterion_5_infeasibility_floor(say, floor_runs):
    runs, elapsed = floor_runs
    sym, ind, chain = (runs[k].residual for k in ("symmetric", "induced", "single_chain_top"))
    ok = sym > FLOOR and ind > FLOOR and chain < CONTROL_TOL and elapsed < SOLVE_SECONDS
    say(
        5,
        ok,
        f"symmetric {sym:.4e}, induced {ind:.4e} (> {FLOOR:g}); single chain {chain:.2e} (< {CONTROL_TOL:g}); "
        f"{elapsed:.1f}s",
    )
    assert ok


# -- criterion 6 -------------------------------------------------------------------


def test_criterion_6_certificate(say, floor_runs):
    runs, _ = floor_runs
    gated, conflicts, smallest = 0, 0, math.inf
    for _, assignment in runs["symmetric"].candidates:
        try:
            rep = contradiction_certificate(assignment.to_config("symmetric"), CERTIFICATE_GATE)
        except PreconditionError:
            continue
        gated += 1
        conflicts += rep.conflict
        smallest = min(smallest, rep.magnitude)
    interleaved = interleave(build_chain(1, 1, 0, 1), build_chain(1.7, 1.7, -0.5, 1.7), "symmetric")
    hand = contradiction_certificate(interleaved)
    hand_ok = hand.conflict and abs(hand.magnitude - INTERLEAVED_MAGNITUDE) <= INTERLEAVED_TOL
    ok = gated > 0 and conflicts == gated and smallest > 0 and hand_ok
    say(
        6,
        ok,
        f"{conflicts}/{gated} gated candidates conflict (gate {CERTIFICATE_GATE:g}, min magnitude {smallest:.4f}); "
        f"interleaved magnitude {hand.magnitude:.4f}",
    )
    assert ok


# -- criterion 7 -------------------------------------------------------------------


def admissible_map(rng: random.Random, cs) -> MobiusMap:
    while True:
        a, b, c, d = (complex(rng.uniform(-3, 3), rng.uniform(-3, 3)) for _ in range(4))
        if abs(a * d - b * c) < 0.1:
            continue
        m = MobiusMap(a, b, c, d)
        pole = m.pole
        if not isinstance(pole, Point) or all(g.distance_to(pole) > POLE_MARGIN for _, g in cs.members):
            return m


def test_criterion_7_verifier(say):
    rng = random.Random(TRANSPORT_SEED)
    cases = [
        (crossing_pair(), build_small_multigraph("digon4"), None),
        (tangent_triangle(), build_small_multigraph("doubled-triangle"), None),
        (triple_point(), build_small_multigraph("doubled-triangle"), "TriplePoint"),
    ]
    base_ok = [verify_representation(cs, G).failure_reason == want for cs, G, want in cases]
    flips = 0
    for cs, G, want in cases:
        for _ in range(TRANSPORTS):
            flips += verify_representation(transport(cs, admissible_map(rng, cs)), G).failure_reason != want
    ok = all(base_ok) and flips == 0
    say(
        7,
        ok,
        f"fixtures crossing pair / doubled triangle / triple point = {base_ok}; "
        f"{flips} verdict changes over {TRANSPORTS} transports each",
    )
    assert ok


# -- criterion 8 -------------------------------------------------------------------

_FINGERPRINT = """
import hashlib, json
from circrep.graphs import *
from circrep.solver import build_constraint_system, solve_feasibility
parts = [
    build_octahedron().to_json(),
    build_mini_gadget_octahedral()[0].to_json(),
    build_mini_bigadget_octahedral()[0].to_json(),
    build_base_multigraph_m()[0].to_json(),
    build_counterexample_68("gadget")[0].to_json(),
    build_counterexample_68("bigadget")[0].to_json(),
]
for kind in ("symmetric", "induced", "single_chain_top"):
    parts.append(solve_feasibility(build_constraint_system(kind), seed=1, restarts=%d, iterations=%d).to_json(kind))
print(hashlib.sha256(json.dumps(parts, sort_keys=True).encode()).hexdigest())
""" % (DETERMINISM_RESTARTS, DETERMINISM_ITERS)


def _fingerprint_subprocess(hash_seed: str) -> str:
    env = {"PYTHONHASHSEED": hash_seed, "PATH": "/usr/bin:/bin"}
    proc = subprocess.run(
        [sys.executable, "-c", _FINGERPRINT], capture_output=True, text=True, env=env, check=True
    )
    return proc.stdout.strip()


def test_criterion_8_determinism(say):
    builders = [
        build_octahedron,
        lambda: build_mini_gadget_octahedral()[0],
        lambda: build_mini_bigadget_octahedral()[0],
        lambda: build_base_multigraph_m()[0],
        lambda: build_counterexample_68("gadget")[0],
        lambda: build_counterexample_68("bigadget")[0],
    ]
    same_builds = all(json.dumps(b().to_json()) == json.dumps(b().to_json()) for b in builders)

    def solve(kind):
        res = solve_feasibility(
            build_constraint_system(kind), seed=SOLVE_SEED, restarts=DETERMINISM_RESTARTS, iterations=DETERMINISM_ITERS
        )
        return json.dumps(res.to_json(kind)), [c[0] for c in res.candidates]

    same_solves = all(solve(k) == solve(k) for k in ("symmetric", "induced", "single_chain_top"))
    digests = {_fingerprint_subprocess(s) for s in ("0", "1", "12345")}
    ok = same_builds and same_solves and len(digests) == 1
    say(
        8,
        ok,
        f"builders repeat={same_builds}, solver repeat={same_solves}, "
        f"{len(digests)} distinct digest(s) across 3 processes",
    )
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
