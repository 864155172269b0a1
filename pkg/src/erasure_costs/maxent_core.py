"""Maximum-entropy states over a finite, shared eigenbasis.

All observables are diagonal in the same basis, so a state is just a
probability vector ``p`` of Gibbs form

    p[i] = exp(-(lambda_0 + sum_k lambda_k v_k[i]))

with ``lambda_0`` the log partition function.  Entropies are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.special import logsumexp

from .errors import DomainError, InfeasibleTarget, NoConvergence

LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class ObservableTable:
    """K commuting observables given by their eigenvalues on ``dim`` basis states."""

    observables: np.ndarray  # shape (K, dim)
    labels: tuple[str, ...]

    def __post_init__(self):
        obs = np.atleast_2d(np.asarray(self.observables, dtype=float))
        if obs.shape[0] < 1 or obs.shape[1] < 1:
            raise DomainError("need at least one observable and one basis state")
        if not np.all(np.isfinite(obs)):
            raise DomainError("eigenvalues must be finite")
        labels = tuple(self.labels)
        if len(labels) != obs.shape[0]:
            raise DomainError(f"{len(labels)} labels for {obs.shape[0]} observables")
        if len(set(labels)) != len(labels):
            raise DomainError("observable labels must be unique")
        obs.setflags(write=False)
        object.__setattr__(self, "observables", obs)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_vectors(cls, *vectors: Sequence[float], labels: Sequence[str] | None = None):
        lengths = {len(v) for v in vectors}
        if len(lengths) != 1:
            raise DomainError("eigenvalue vectors must share one length")
        if labels is None:
            labels = [f"V{k + 1}" for k in range(len(vectors))]
        return cls(np.array(vectors, dtype=float), tuple(labels))

    @property
    def dim(self) -> int:
        return self.observables.shape[1]

    @property
    def K(self) -> int:
        return self.observables.shape[0]

    def expectations(self, probs) -> np.ndarray:
        return self.observables @ np.asarray(probs, dtype=float)


@dataclass(frozen=True)
class MaxEntState:
    table: ObservableTable
    probs: np.ndarray
    multipliers: np.ndarray
    log_normalizer: float

    @property
    def expectations(self) -> np.ndarray:
        return self.table.expectations(self.probs)


def gibbs_state(table: ObservableTable, multipliers) -> MaxEntState:
    """Build the normalized Gibbs state for given multipliers."""
    lam = np.asarray(multipliers, dtype=float).reshape(table.K)
    exponent = -(lam @ table.observables)
    log_z = float(logsumexp(exponent))
    probs = np.exp(exponent - log_z)
    probs /= probs.sum()
    probs.setflags(write=False)
    lam = lam.copy()
    lam.setflags(write=False)
    return MaxEntState(table, probs, lam, log_z)


def _check_feasible(table: ObservableTable, targets: np.ndarray) -> None:
    # Maximize s subject to sum w_i v_i = t, sum w_i = 1, w_i >= s.
    # Targets in the relative interior of the hull give s* > 0.
    dim = table.dim
    c = np.zeros(dim + 1)
    c[-1] = -1.0
    a_eq = np.zeros((table.K + 1, dim + 1))
    a_eq[: table.K, :dim] = table.observables
    a_eq[table.K, :dim] = 1.0
    b_eq = np.append(targets, 1.0)
    a_ub = np.zeros((dim, dim + 1))
    a_ub[:, :dim] = -np.eye(dim)
    a_ub[:, -1] = 1.0
    res = linprog(
        c, A_ub=a_ub, b_ub=np.zeros(dim), A_eq=a_eq, b_eq=b_eq,
        bounds=[(0, None)] * dim + [(None, 1.0)], method="highs",
    )
    if res.status != 0 or -res.fun <= 1e-12:
        raise InfeasibleTarget(
            f"targets {targets.tolist()} are not strictly inside the eigenvalue hull"
        )


def solve_multipliers(
    table: ObservableTable,
    targets,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> MaxEntState:
    """Find the maximum-entropy state with ``<V_k> = targets[k]``.

    Minimizes the convex dual ``log Z(lambda) + lambda . targets`` by Newton
    steps with backtracking, starting from ``lambda = 0``.  The Hessian is the
    covariance of the observables; a pseudo-inverse handles observables that
    are affinely dependent.

    Raises
    ------
    InfeasibleTarget
        If the targets are on the boundary of, or outside, the convex hull of
        the eigenvalue tuples.
    NoConvergence
        If ``max_iter`` Newton steps do not bring the residual below ``tol``.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    targets = np.asarray(targets, dtype=float).reshape(-1)
    if targets.shape != (table.K,):
        raise DomainError(f"expected {table.K} targets, got {targets.size}")
    if not np.all(np.isfinite(targets)):
        raise DomainError("targets must be finite")
    _check_feasible(table, targets)

    obs = table.observables

    def dual(lam):
        return float(logsumexp(-(lam @ obs))) + float(lam @ targets)

    lam = np.zeros(table.K)
    state = gibbs_state(table, lam)
    residual = np.inf
    for _ in range(max_iter):
        mean = obs @ state.probs
        grad = targets - mean
        residual = float(np.max(np.abs(grad)))
        if residual <= tol:
            return state
        centered = obs - mean[:, None]
        hess = (centered * state.probs) @ centered.T
        step = -np.linalg.lstsq(hess, grad, rcond=None)[0]
        f0 = dual(lam)
        slope = float(grad @ step)
        grad_norm = float(np.linalg.norm(grad))
        t = 1.0
        while True:
            trial = lam + t * step
            trial_state = gibbs_state(table, trial)
            # Near the optimum the dual decrease drops below float resolution,
            # so a shrinking gradient also counts as progress.
            if dual(trial) <= f0 + 1e-4 * t * slope or (
                    np.linalg.norm(targets - obs @ trial_state.probs)
                    <= (1 - 1e-4 * t) * grad_norm):
                break
            t *= 0.5
            if t < 1e-12:
                break
        lam = trial
        state = trial_state

    residual = float(np.max(np.abs(targets - obs @ state.probs)))
    if residual <= tol:
        return state
    raise NoConvergence(
        f"Newton iteration budget ({max_iter}) exhausted, residual {residual:.3e}",
        residual=residual,
    )


def shannon_entropy(probs) -> float:
    """-sum p ln p with 0 ln 0 = 0."""
    p = np.asarray(probs, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def state_entropy(state: MaxEntState) -> float:
    return shannon_entropy(state.probs)


def entropy_identity_value(state: MaxEntState) -> float:
    """lambda_0 + sum_k lambda_k <V_k>, which equals the entropy of a Gibbs state."""
    return state.log_normalizer + float(state.multipliers @ state.expectations)


def entropy_differential(multipliers, delta_expectations, delta_operator_means) -> float:
    """First-order entropy change ``sum_k lambda_k (d<V_k> - <dV_k>)``."""
    lam = np.asarray(multipliers, dtype=float)
    d_exp = np.asarray(delta_expectations, dtype=float)
    d_op = np.asarray(delta_operator_means, dtype=float)
    if not (lam.shape == d_exp.shape == d_op.shape):
        raise DomainError("multipliers and deltas must have equal length")
    return float(np.sum(lam * (d_exp - d_op)))


def erasure_balance(multipliers, delta_expectations) -> float:
    """Residual ``sum_k lambda_k d<V_k> - ln 2``; zero pays exactly one bit."""
    lam = np.asarray(multipliers, dtype=float)
    d_exp = np.asarray(delta_expectations, dtype=float)
    if lam.shape != d_exp.shape:
        raise DomainError("multipliers and deltas must have equal length")
    return float(np.sum(lam * d_exp)) - LN2
