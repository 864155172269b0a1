"""Exact erasure against a small bath.

The joint state is a table ``P[n, c]``: bath Hamming weight ``n`` and chain
branch ``c`` (0 = all zeros, 1 = all ones).  ``P[n, c]`` is summed over the
``C(N, n)`` bath microstates of weight ``n``, which all carry the same
probability, so the bath never has to be enumerated spin by spin.

Equilibration couples ``(n + m, all-zeros)`` with ``(n, all-ones)``: both have
``n + m`` logical ones in total.  Within each such class the probability is
spread uniformly over microstates, which is the entropy maximum allowed by
the conservation law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ChainTooLong, DomainError
from .maxent_core import shannon_entropy
from .reservoirs import hamming_distribution

MAX_N = 20


@dataclass(frozen=True)
class JointFiniteState:
    N: int
    m: int
    table: np.ndarray  # shape (N + 1, 2)
    spin_paid: float = 0.0  # cumulative CNOT cost in units of hbar

    @property
    def multiplicity(self) -> np.ndarray:
        return np.array([math.comb(self.N, n) for n in range(self.N + 1)], dtype=float)

    @property
    def chain_p1(self) -> float:
        return float(self.table[:, 1].sum())

    @property
    def bath_marginal(self) -> np.ndarray:
        return self.table.sum(axis=1)

    @property
    def conserved_total(self) -> float:
        """Expected number of logical ones in bath plus chain (total J_z / hbar up to an offset)."""
        n = np.arange(self.N + 1)
        return float(n @ self.table[:, 0] + (n + self.m) @ self.table[:, 1])

    def bath_entropy(self) -> float:
        q = self.bath_marginal
        nz = q > 0
        return shannon_entropy(q) + float(q[nz] @ np.log(self.multiplicity[nz]))

    def chain_entropy(self) -> float:
        return shannon_entropy([1.0 - self.chain_p1, self.chain_p1])

    def total_entropy(self) -> float:
        mult = self.multiplicity[:, None] * np.ones((1, 2))
        nz = self.table > 0
        return shannon_entropy(self.table[nz]) + float(self.table[nz] @ np.log(mult[nz]))


def init_joint(N: int, x: float, max_N: int = MAX_N) -> JointFiniteState:
    """Bath at gap ratio ``x`` next to a maximally mixed memory spin (chain length 1)."""
    if int(N) != N or not 1 <= N <= max_N:
        raise DomainError(f"N must be an integer in [1, {max_N}], got {N}")
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"gap ratio x must be positive and finite, got {x}")
    q = hamming_distribution(int(N), x, log_space=False).weights
    table = np.column_stack([0.5 * q, 0.5 * q])
    table.setflags(write=False)
    return JointFiniteState(int(N), 1, table)


def exchange_step(state: JointFiniteState) -> JointFiniteState:
    if state.m > state.N:
        raise ChainTooLong(f"chain length {state.m} exceeds bath size {state.N}")
    N, m = state.N, state.m
    mult = state.multiplicity
    old = state.table
    new = old.copy()
    # Class t = n + m: (t, zeros) <-> (t - m, ones) for t = m..N.
    t = np.arange(m, N + 1)
    mass = old[t, 0] + old[t - m, 1]
    w0, w1 = mult[t], mult[t - m]
    new[t, 0] = mass * w0 / (w0 + w1)
    new[t - m, 1] = mass * w1 / (w0 + w1)
    new.setflags(write=False)
    return replace(state, table=new)


def append_ancilla(state: JointFiniteState, hbar: float = 1.0) -> tuple[JointFiniteState, float]:
    """CNOT a fresh ancilla onto the chain; returns the new state and its spin cost."""
    cost = hbar * state.chain_p1
    return replace(state, m=state.m + 1, spin_paid=state.spin_paid + state.chain_p1), cost


@dataclass(frozen=True)
class FiniteCycle:
    cycle: int
    p1_exact: float
    p1_ideal: float
    deviation: float
    dS_bath: float
    dS_chain: float
    dS_total: float
    conserved_before: float
    conserved_after: float
    cnot_cost: float


@dataclass(frozen=True)
class FiniteReport:
    N: int
    x: float
    cycles: tuple[FiniteCycle, ...] = field(repr=False)
    final_state: JointFiniteState = field(repr=False)

    @property
    def bath_entropy_gain(self) -> float:
        return sum(c.dS_bath for c in self.cycles)

    @property
    def residual_chain_entropy(self) -> float:
        return self.final_state.chain_entropy()


def simulate_finite(N: int, x: float, cycles: int, max_N: int = MAX_N) -> FiniteReport:
    """Alternate equilibration and CNOT for ``cycles`` rounds.

    Each row reports the chain after the equilibration at chain length
    ``m = cycle`` and the entropy changes caused by that equilibration.
    """
    if int(cycles) != cycles or cycles < 1:
        raise DomainError("cycles must be a positive integer")
    if cycles > N:
        raise ChainTooLong(f"{cycles} cycles need a bath of at least that many spins (N={N})")
    state = init_joint(N, x, max_N=max_N)
    rows = []
    for k in range(1, int(cycles) + 1):
        before = state
        state = exchange_step(state)
        p1 = state.chain_p1
        ideal = 1.0 / (1.0 + math.exp(k * x))
        row_state = state
        state, cost = append_ancilla(state)
        rows.append(FiniteCycle(
            cycle=k,
            p1_exact=p1,
            p1_ideal=ideal,
            deviation=abs(p1 - ideal),
            dS_bath=row_state.bath_entropy() - before.bath_entropy(),
            dS_chain=row_state.chain_entropy() - before.chain_entropy(),
            dS_total=row_state.total_entropy() - before.total_entropy(),
            conserved_before=before.conserved_total,
            conserved_after=row_state.conserved_total,
            cnot_cost=cost,
        ))
    return FiniteReport(int(N), x, tuple(rows), state)
