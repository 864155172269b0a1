"""Cycle-by-cycle erasure against a large spin reservoir.

At cycle ``m`` the memory-ancilla chain has been equilibrated against the
bath with an effective gap ``m x`` and sits in logical 1 with probability
``p1(m) = 1 / (1 + e^{m x})``.  The CNOT that extends the chain by one ancilla
then costs ``hbar * p1(m)`` of angular momentum, plus ``epsilon * p1(m)`` of
energy if the levels are Zeeman split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import expit

from .errors import DomainError, StopRuleUnreachable
from .maxent_core import shannon_entropy

LN2 = math.log(2.0)
DEFAULT_TAIL_TOL = 1e-14
# Safety cap for the residual-entropy stop rule.
MAX_PROTOCOL_CYCLES = 1_000_000
_CHUNK = 1 << 20


def _check_x(x):
    if not (x > 0):
        raise DomainError(f"gap ratio x must be positive, got {x}")


def equilibrium_after_m(x: float, m: int) -> float:
    _check_x(x)
    if m < 0:
        raise DomainError("cycle index m must be >= 0")
    return float(expit(-m * x))


def tail_bound(x: float, n: int) -> float:
    """Upper bound on ``sum_{k>n} p1(k)``: the geometric tail ``e^{-(n+1)x} / (1 - e^{-x})``."""
    _check_x(x)
    return math.exp(-(n + 1) * x) / -math.expm1(-x)


def cycles_for_tail(x: float, tail_tol: float) -> int:
    """Smallest ``n >= 1`` whose geometric tail bound is below ``tail_tol``."""
    _check_x(x)
    if not tail_tol > 0:
        raise DomainError("tail_tol must be positive")
    need = (-math.log(tail_tol) + math.log(-math.expm1(-x))) / x - 1.0
    n = max(1, math.floor(need))
    while tail_bound(x, n) >= tail_tol:
        n += 1
    return n


def cost_terms(x: float, n_max: int, start: int = 1) -> np.ndarray:
    """Per-cycle costs ``p1(n)`` for ``n = start..n_max`` (units of hbar)."""
    return expit(-x * np.arange(start, n_max + 1, dtype=float))


def cost_series(x: float, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """``sum_{n>=1} 1 / (1 + e^{n x})``, the total spin cost in units of hbar.

    Summation stops once the geometric tail bound drops below ``tail_tol``.
    """
    n_max = cycles_for_tail(x, tail_tol)
    partials = []
    for lo in range(1, n_max + 1, _CHUNK):
        hi = min(n_max, lo + _CHUNK - 1)
        partials.append(math.fsum(cost_terms(x, hi, start=lo)))
    return math.fsum(partials)


class CostBounds(NamedTuple):
    unprimed: tuple[float, float]
    primed: tuple[float, float]


def cost_bounds(x: float) -> CostBounds:
    """Closed-form brackets on the series, without and with the initial ``1/2`` term.

    Dimensionless; multiply by hbar (spin) or epsilon (energy).
    """
    _check_x(x)
    unprimed = (math.log1p(math.exp(-x)) / x, LN2 / x)
    # ln(1 + e^x) = x + ln(1 + e^-x)
    primed = (LN2 / x, (x + math.log1p(math.exp(-x))) / x)
    return CostBounds(unprimed, primed)


def combined_scaled_cost(x: float, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """``beta dE + (beta epsilon / hbar) dJz'`` for the Zeeman protocol.

    Both costs are the same series with the initial term, so the sum is
    ``2 x (cost_series(x) + 1/2)``, which always exceeds ``2 ln 2``.
    """
    return 2.0 * x * (cost_series(x, tail_tol) + 0.5)


@dataclass(frozen=True)
class ProtocolConfig:
    """One erasure run.

    Exactly one of ``max_cycles`` and ``target_entropy`` must be given.
    ``epsilon`` scales the energy channel in zeeman mode; ``hbar`` scales spin.
    """

    x: float
    mode: str = "degenerate"
    max_cycles: int | None = None
    target_entropy: float | None = None
    include_initial: bool = True
    epsilon: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        _check_x(self.x)
        if not math.isfinite(self.x):
            raise DomainError("gap ratio x must be finite")
        if self.mode not in ("zeeman", "degenerate"):
            raise DomainError(f"unknown mode {self.mode!r}")
        if (self.max_cycles is None) == (self.target_entropy is None):
            raise DomainError("give exactly one stop rule: max_cycles or target_entropy")
        if self.max_cycles is not None and (int(self.max_cycles) != self.max_cycles
                                            or self.max_cycles < 1):
            raise DomainError(f"max_cycles must be an integer >= 1, got {self.max_cycles}")
        if self.target_entropy is not None and not self.target_entropy > 0:
            raise DomainError("target_entropy must be positive")
        if not self.hbar > 0:
            raise DomainError("hbar must be positive")
        if self.mode == "zeeman" and not self.epsilon > 0:
            raise DomainError("epsilon must be positive in zeeman mode")


@dataclass(frozen=True)
class CycleRecord:
    m: int
    p1: float
    spin_cost: float
    energy_cost: float | None
    cum_spin: float
    cum_energy: float | None
    residual_entropy: float


@dataclass(frozen=True)
class ErasureLedger:
    config: ProtocolConfig
    records: tuple[CycleRecord, ...] = field(repr=False)
    delta_Jz: float
    delta_Jz_primed: float | None
    delta_E: float | None
    residual_entropy: float
    residual_p1: float
    tail_bound: float

    @property
    def has_energy(self) -> bool:
        return self.delta_E is not None

    def totals(self) -> dict:
        out = {
            "cycles": len(self.records),
            "delta_Jz": self.delta_Jz,
            "residual_entropy": self.residual_entropy,
            "residual_p1": self.residual_p1,
            "tail_bound": self.tail_bound,
        }
        if self.delta_Jz_primed is not None:
            out["delta_Jz_primed"] = self.delta_Jz_primed
        if self.delta_E is not None:
            out["delta_E"] = self.delta_E
        return out


def _binary_entropy(p1: float) -> float:
    return shannon_entropy([1.0 - p1, p1])


def run_erasure(config: ProtocolConfig) -> ErasureLedger:
    """Run the protocol until ``max_cycles`` or the residual-entropy target.

    Degenerate mode never touches the energy channel: ``delta_E`` and every
    per-cycle energy entry are ``None``.

    Raises
    ------
    StopRuleUnreachable
        If the residual entropy target is not reached within
        ``MAX_PROTOCOL_CYCLES`` cycles.
    """
    zeeman = config.mode == "zeeman"
    hbar, eps = config.hbar, config.epsilon
    cum_spin = 0.5 * hbar if config.include_initial else 0.0
    # The energy total always carries the initial memory spin.
    cum_energy = 0.5 * eps if zeeman else None
    spin_sum = 0.0

    limit = config.max_cycles if config.max_cycles is not None else MAX_PROTOCOL_CYCLES
    records = []
    residual = _binary_entropy(0.5)
    p1 = 0.5
    for m in range(1, limit + 1):
        p1 = equilibrium_after_m(config.x, m)
        spin_cost = hbar * p1
        spin_sum += spin_cost
        cum_spin += spin_cost
        energy_cost = None
        if zeeman:
            energy_cost = eps * p1
            cum_energy += energy_cost
        residual = _binary_entropy(p1)
        records.append(CycleRecord(m, p1, spin_cost, energy_cost, cum_spin, cum_energy, residual))
        if config.target_entropy is not None and residual <= config.target_entropy:
            break
    else:
        if config.target_entropy is not None:
            raise StopRuleUnreachable(
                f"residual entropy {residual:.3e} still above {config.target_entropy:g} "
                f"after {limit} cycles",
                achieved=residual,
            )

    return ErasureLedger(
        config=config,
        records=tuple(records),
        delta_Jz=spin_sum,
        delta_Jz_primed=cum_spin if config.include_initial else None,
        delta_E=cum_energy,
        residual_entropy=residual,
        residual_p1=p1,
        tail_bound=tail_bound(config.x, len(records)),
    )
