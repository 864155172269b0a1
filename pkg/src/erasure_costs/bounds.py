"""Scheme-independent lower bounds on erasure costs.

A reservoir of qubits with logical-1 population ``alpha < 1/2`` can only
absorb the memory's ``ln 2`` of entropy by raising its Hamming weight, and
the cheapest rate is set by ``dS/dn = ln((1 - alpha)/alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import DomainError
from .reservoirs import gamma_from_alpha

LN2 = math.log(2.0)


@dataclass(frozen=True)
class VariableSpec:
    """Conserved variable with eigenvalues 0 (logical 0) and ``v`` (logical 1)."""

    label: str
    v: float

    def __post_init__(self):
        if self.v == 0 or not math.isfinite(self.v):
            raise DomainError(f"eigenvalue of {self.label!r} must be finite and nonzero")


def _log_odds(alpha: float) -> float:
    if not 0 < alpha < 0.5:
        raise DomainError(f"alpha must lie in (0, 1/2), got {alpha}")
    return math.log1p(-alpha) - math.log(alpha)


def reservoir_entropy(N: int, alpha: float) -> float:
    """Entropy ``-N[(1-a) ln(1-a) + a ln a]`` of N independent qubits (nats)."""
    if N < 1:
        raise DomainError("N must be >= 1")
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    s = 0.0
    for p in (alpha, 1.0 - alpha):
        if p > 0:
            s -= p * math.log(p)
    return N * s


def hamming_cost_bound(alpha: float) -> float:
    """Least increase of the reservoir Hamming weight that absorbs one bit."""
    return LN2 / _log_odds(alpha)


def variable_cost_bound(alpha: float, var: VariableSpec) -> float:
    return var.v * LN2 / _log_odds(alpha)


def multi_cost_total(alpha: float, costs: Iterable[tuple[float, float]],
                     rtol: float = 1e-12) -> tuple[float, bool]:
    """Weighted total ``ln((1-a)/a) * sum dV_k / v_k`` and whether it reaches ``M ln 2``.

    ``costs`` holds ``(dV_k, v_k)`` pairs.  ``rtol`` absorbs rounding when a
    scheme sits exactly on the bound.
    """
    costs = list(costs)
    if not costs:
        raise DomainError("need at least one variable")
    for _, v in costs:
        if v == 0:
            raise DomainError("eigenvalue v_k must be nonzero")
    total = _log_odds(alpha) * math.fsum(dv / v for dv, v in costs)
    floor = len(costs) * LN2
    return total, total >= floor * (1.0 - rtol)


def optimality_identity(alpha: float, hbar: float = 1.0) -> float:
    """``|hbar * hamming_cost_bound(alpha) - ln 2 / gamma|``; zero up to rounding."""
    _log_odds(alpha)
    gamma = gamma_from_alpha(alpha, hbar)
    return abs(hbar * hamming_cost_bound(alpha) - LN2 / gamma)
