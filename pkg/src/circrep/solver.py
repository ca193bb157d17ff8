"""Multi-start least-squares feasibility search over axis-tangent configurations.

Variables are the tangency abscissas ``t_i`` and radii ``r_i`` of a subset
of the circles C_1..C_8.  Touching pairs give equality residuals
``(t_j - t_i)^2 - 4 r_i r_j``; ordering along the axis and disjointness of
same-side non-touching pairs give hinge residuals.  Everything is divided by
the span (``t_last - t_first``) to the appropriate power so the residual
vector is invariant under similarities of the axis.

The search pins ``t_first = 0`` and ``t_last = 1``, parametrizes radii by
their logarithms and runs Levenberg-Marquardt (damped Gauss-Newton) steps
with step rejection from many random starts.  All restarts are advanced
together as a batch; every operation is row-wise so a restart's trajectory
does not depend on how many others run beside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .chains import INDUCED_PAIRS, SYMMETRIC_PAIRS, TOP, OctupleConfig, side_of
from .errors import DimensionMismatch, UnknownKind

# floor of the induced/symmetric systems scales like 8*mu**2; see README
DEFAULT_MU = 0.02
LOG_R_MIN, LOG_R_MAX = math.log(1e-2), math.log(1e2)
_LOG_CLIP = 40.0

KINDS = ("induced", "symmetric", "single_chain_top", "custom")


@dataclass(frozen=True)
class ConstraintSystem:
    indices: tuple[int, ...]
    equalities: tuple[tuple[int, int], ...]
    ordering: tuple[tuple[int, int], ...]
    disjoint: tuple[tuple[int, int], ...]
    mu: float = DEFAULT_MU
    kind: str = "custom"

    def __post_init__(self) -> None:
        known = set(self.indices)
        for pair in self.equalities + self.ordering + self.disjoint:
            if not set(pair) <= known:
                raise ValueError(f"pair {pair} refers to a missing variable")
        if not self.mu > 0:
            raise ValueError("ordering margin must be positive")

    @property
    def n(self) -> int:
        return len(self.indices)

    @property
    def first(self) -> int:
        return self.indices[0]

    @property
    def last(self) -> int:
        return self.indices[-1]

    @property
    def n_ordering_terms(self) -> int:
        # consecutive gaps plus the span-orientation term
        return len(self.ordering) + (1 if self.n >= 2 else 0)

    @property
    def n_residuals(self) -> int:
        return len(self.equalities) + self.n_ordering_terms + len(self.disjoint)


def build_constraint_system(
    kind: str, pairs: Sequence[tuple[int, int]] | None = None, mu: float = DEFAULT_MU
) -> ConstraintSystem:
    """Constraint system for a named configuration, or ``custom`` touching pairs."""
    kind = kind.replace("-", "_")
    if kind == "single_chain":
        kind = "single_chain_top"
    if kind == "induced":
        touching = INDUCED_PAIRS
        indices = tuple(range(1, 9))
    elif kind == "symmetric":
        touching = SYMMETRIC_PAIRS
        indices = tuple(range(1, 9))
    elif kind == "single_chain_top":
        touching = ((2, 3), (3, 6), (6, 7), (2, 7))
        indices = TOP
    elif kind == "custom":
        touching = tuple(tuple(sorted(p)) for p in (pairs or ()))
        indices = tuple(range(1, 9))
    else:
        raise UnknownKind(f"unknown system kind {kind!r}")
    touching_set = {tuple(sorted(p)) for p in touching}
    disjoint = tuple(
        (i, j)
        for i, j in combinations(indices, 2)
        if side_of(i) == side_of(j) and (i, j) not in touching_set
    )
    ordering = tuple(zip(indices[:-1], indices[1:]))
    return ConstraintSystem(
        indices=indices,
        equalities=tuple(sorted(touching_set)),
        ordering=ordering,
        disjoint=disjoint,
        mu=mu,
        kind=kind,
    )


@dataclass(frozen=True)
class Assignment:
    """Values of ``t`` and ``r`` aligned with a system's ``indices``."""

    indices: tuple[int, ...]
    t: tuple[float, ...]
    r: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.indices) == len(self.t) == len(self.r)):
            raise DimensionMismatch("indices, t and r must have equal length")
        if not all(x > 0 for x in self.r):
            raise ValueError("radii must be positive")

    def to_json(self) -> dict:
        return {
            "circles": [
                {"index": i, "t": t, "r": r, "side": side_of(i)} for i, t, r in zip(self.indices, self.t, self.r)
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "Assignment":
        circles = sorted(data["circles"], key=lambda c: c["index"])
        return cls(
            tuple(int(c["index"]) for c in circles),
            tuple(float(c["t"]) for c in circles),
            tuple(float(c["r"]) for c in circles),
        )

    def to_config(self, kind: str = "symmetric") -> OctupleConfig:
        if self.indices != tuple(range(1, 9)):
            raise DimensionMismatch("an octuple needs all eight circles")
        return OctupleConfig.from_values(self.t, self.r, kind)


@dataclass
class SolveResult:
    best: Assignment
    residual: float
    restarts_used: int
    seed: int
    iterations: int = 0
    best_restart: int = 0
    candidates: list[tuple[float, Assignment]] = field(default_factory=list, repr=False)

    def to_json(self, system: str = "") -> dict:
        out = self.best.to_json()
        out.update(
            {
                "system": system,
                "residual": self.residual,
                "seed": self.seed,
                "restarts_used": self.restarts_used,
                "iterations": self.iterations,
                "best_restart": self.best_restart,
            }
        )
        return out


def _evaluate(sys: ConstraintSystem, T: np.ndarray, R: np.ndarray, jacobian: bool = False):
    """Residual rows for a batch of assignments.

    ``T`` and ``R`` have shape (batch, n).  With ``jacobian`` the derivative
    with respect to ``(t, r)`` is returned as well, holding the span fixed
    (exact whenever the span is pinned, as in the solver).
    """
    pos = {idx: k for k, idx in enumerate(sys.indices)}
    B, n = T.shape
    span = T[:, pos[sys.last]] - T[:, pos[sys.first]]
    scale = np.where(span > 0, span, np.abs(span))
    scale = np.where(scale > 0, scale, 1.0)
    s2 = scale * scale
    s2 = np.where(s2 > 0, s2, 1.0)  # spans so small their square underflows
    cols: list[np.ndarray] = []
    jac_rows: list[np.ndarray] = []

    def grad_row():
        return np.zeros((B, 2 * n))

    for i, j in sys.equalities:
        a, b = pos[i], pos[j]
        dt = T[:, b] - T[:, a]
        cols.append((dt * dt - 4.0 * R[:, a] * R[:, b]) / s2)
        if jacobian:
            g = grad_row()
            g[:, a] = -2.0 * dt / s2
            g[:, b] = 2.0 * dt / s2
            g[:, n + a] = -4.0 * R[:, b] / s2
            g[:, n + b] = -4.0 * R[:, a] / s2
            jac_rows.append(g)
    for i, j in sys.ordering:
        a, b = pos[i], pos[j]
        viol = sys.mu * scale - (T[:, b] - T[:, a])
        active = viol > 0
        cols.append(np.where(active, viol, 0.0) / scale)
        if jacobian:
            g = grad_row()
            g[:, a] = np.where(active, 1.0, 0.0) / scale
            g[:, b] = np.where(active, -1.0, 0.0) / scale
            jac_rows.append(g)
    if n >= 2:
        # orientation of the normalization: first circle must be leftmost end
        cols.append(np.where(span > 0, 0.0, 1.0))
        if jacobian:
            jac_rows.append(grad_row())
    for i, j in sys.disjoint:
        a, b = pos[i], pos[j]
        dt = T[:, b] - T[:, a]
        gap = dt * dt - 4.0 * R[:, a] * R[:, b]
        active = gap < 0
        cols.append(np.where(active, -gap, 0.0) / s2)
        if jacobian:
            g = grad_row()
            w = np.where(active, 1.0, 0.0) / s2
            g[:, a] = 2.0 * dt * w
            g[:, b] = -2.0 * dt * w
            g[:, n + a] = 4.0 * R[:, b] * w
            g[:, n + b] = 4.0 * R[:, a] * w
            jac_rows.append(g)
    res = np.stack(cols, axis=1) if cols else np.zeros((B, 0))
    if not jacobian:
        return res
    J = np.stack(jac_rows, axis=1) if jac_rows else np.zeros((B, 0, 2 * n))
    return res, J


def residuals(sys: ConstraintSystem, a: Assignment) -> np.ndarray:
    """Residual vector: raw equalities, hinged inequalities, span-normalized."""
    if a.indices != sys.indices:
        raise DimensionMismatch(f"assignment covers {a.indices}, system needs {sys.indices}")
    T = np.asarray(a.t, dtype=float)[None, :]
    R = np.asarray(a.r, dtype=float)[None, :]
    return _evaluate(sys, T, R)[0]


def residual_norm(sys: ConstraintSystem, a: Assignment) -> float:
    # hypot rescales internally, so huge residuals do not overflow
    return math.hypot(*residuals(sys, a))


def _initial_points(sys: ConstraintSystem, seed: int, restarts: int) -> np.ndarray:
    n = sys.n
    rows = []
    for k in range(restarts):
        rng = np.random.default_rng([seed, k])
        interior = np.sort(rng.uniform(0.0, 1.0, size=n - 2))
        logr = rng.uniform(LOG_R_MIN, LOG_R_MAX, size=n)
        rows.append(np.concatenate([interior, logr]))
    return np.array(rows)


def _unpack(sys: ConstraintSystem, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = sys.n
    B = X.shape[0]
    T = np.empty((B, n))
    T[:, 0] = 0.0
    T[:, -1] = 1.0
    T[:, 1:-1] = X[:, : n - 2]
    R = np.exp(np.clip(X[:, n - 2 :], -_LOG_CLIP, _LOG_CLIP))
    return T, R


def _loss_and_jac(sys: ConstraintSystem, X: np.ndarray):
    n = sys.n
    T, R = _unpack(sys, X)
    res, J = _evaluate(sys, T, R, jacobian=True)
    # chain rule to free parameters: interior t's and log radii
    Jx = np.concatenate([J[:, :, 1 : n - 1], J[:, :, n:] * R[:, None, :]], axis=2)
    return res, Jx


def _loss(sys: ConstraintSystem, X: np.ndarray) -> np.ndarray:
    T, R = _unpack(sys, X)
    res = _evaluate(sys, T, R)
    return np.sum(res * res, axis=1)


def solve_feasibility(sys: ConstraintSystem, seed: int = 1, restarts: int = 20, iterations: int = 500) -> SolveResult:
    """Best assignment over ``restarts`` damped least-squares descents.

    Restart ``k`` draws its start from ``default_rng([seed, k])``: sorted
    uniform interior abscissas on (0, 1) and log-uniform radii in
    [1e-2, 1e2].  Ties are broken by the lower restart index.
    """
    if restarts < 1 or iterations < 1:
        raise ValueError("restarts and iterations must be at least 1")
    if sys.n < 2:
        raise ValueError("the system needs at least two circles")
    X = _initial_points(sys, seed, restarts)
    p = X.shape[1]
    lam = np.full(restarts, 1e-3)
    loss = _loss(sys, X)
    eye = np.eye(p)
    for _ in range(iterations):
        res, J = _loss_and_jac(sys, X)
        Jt = np.transpose(J, (0, 2, 1))
        A = np.matmul(Jt, J)
        g = np.matmul(Jt, res[:, :, None])[:, :, 0]
        diag = np.diagonal(A, axis1=1, axis2=2)
        damp = lam[:, None] * (diag + 1e-9)
        M = A + damp[:, :, None] * eye[None, :, :]
        step = np.linalg.solve(M, -g[:, :, None])[:, :, 0]
        X_new = X + step
        loss_new = _loss(sys, X_new)
        ok = np.isfinite(loss_new) & (loss_new < loss)
        X = np.where(ok[:, None], X_new, X)
        loss = np.where(ok, loss_new, loss)
        lam = np.clip(np.where(ok, lam * 0.3, lam * 5.0), 1e-12, 1e12)
    T, R = _unpack(sys, X)
    norms = np.sqrt(loss)
    candidates = [
        (float(norms[k]), Assignment(sys.indices, tuple(map(float, T[k])), tuple(map(float, R[k]))))
        for k in range(restarts)
    ]
    best_k = min(range(restarts), key=lambda k: (candidates[k][0], k))
    best_res, best = candidates[best_k]
    return SolveResult(
        best=best,
        residual=best_res,
        restarts_used=restarts,
        seed=seed,
        iterations=iterations,
        best_restart=best_k,
        candidates=candidates,
    )
