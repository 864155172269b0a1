"""Seeded Monte Carlo ensembles of erasure runs.

Every trial owns a Philox stream keyed by the master seed with the trial
index in the high counter word, so a trial's draws depend only on
``(master_seed, trial_index)``.  Trials can therefore be split across
workers in any way and the per-trial values come out bit-identical; the
reduction always runs over the trials in index order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .errors import DomainError
from .protocol import DEFAULT_TAIL_TOL, cost_terms, cycles_for_tail

Z99 = NormalDist().inv_cdf(0.995)
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngSpec:
    master_seed: int

    def __post_init__(self):
        if int(self.master_seed) != self.master_seed or not 0 <= self.master_seed <= _MASK64:
            raise DomainError("master_seed must be an integer in [0, 2**64)")

    def stream(self, trial_index: int) -> np.random.Generator:
        bitgen = np.random.Philox(
            counter=np.array([0, 0, 0, int(trial_index) & _MASK64], dtype=np.uint64),
            key=np.array([int(self.master_seed), 0], dtype=np.uint64),
        )
        return np.random.Generator(bitgen)


@dataclass(frozen=True)
class FieldModel:
    """Residual z-field splitting at each ancilla site, i.i.d. across sites.

    ``kind`` is one of ``none``, ``uniform`` (half width ``scale``),
    ``gaussian`` (std ``scale``) or ``constant`` (value ``scale``).
    """

    kind: str = "none"
    scale: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "uniform", "gaussian", "constant"):
            raise DomainError(f"unknown field kind {self.kind!r}")
        if self.kind in ("uniform", "gaussian") and not self.scale >= 0:
            raise DomainError("field width must be >= 0")
        if not math.isfinite(self.scale):
            raise DomainError("field scale must be finite")

    @classmethod
    def parse(cls, text: str) -> "FieldModel":
        """Parse ``none``, ``uniform:0.1``, ``gaussian:0.1`` or ``constant:0.3``."""
        kind, _, value = text.partition(":")
        kind = kind.strip().lower()
        if kind == "none":
            if value:
                raise DomainError("field 'none' takes no parameter")
            return cls()
        if not value:
            raise DomainError(f"field {kind!r} needs a value, e.g. {kind}:0.1")
        try:
            scale = float(value)
        except ValueError:
            raise DomainError(f"bad field parameter {value!r}") from None
        return cls(kind, scale)

    @property
    def mean(self) -> float:
        return self.scale if self.kind == "constant" else 0.0

    @property
    def variance(self) -> float:
        if self.kind == "uniform":
            return self.scale ** 2 / 3.0
        if self.kind == "gaussian":
            return self.scale ** 2
        return 0.0

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(-self.scale, self.scale, size)
        if self.kind == "gaussian":
            return rng.normal(0.0, self.scale, size)
        return np.full(size, self.mean)


@dataclass(frozen=True)
class EnsembleStats:
    n_trials: int
    mean: float
    variance: float
    stderr: float
    ci99: tuple[float, float]

    @classmethod
    def from_samples(cls, samples) -> "EnsembleStats":
        s = np.asarray(samples, dtype=float)
        n = s.size
        if n < 2:
            raise DomainError("need at least two trials")
        mean = math.fsum(s) / n
        variance = math.fsum((s - mean) ** 2) / (n - 1)
        stderr = math.sqrt(variance / n)
        half = Z99 * stderr
        return cls(n, mean, variance, stderr, (mean - half, mean + half))

    def as_dict(self) -> dict:
        return {
            "n_trials": self.n_trials,
            "mean": self.mean,
            "variance": self.variance,
            "stderr": self.stderr,
            "ci99_low": self.ci99[0],
            "ci99_high": self.ci99[1],
        }


def _check_x(x):
    if not x > 0:
        raise DomainError(f"gap ratio must be positive, got {x}")


def default_cycles(x: float) -> int:
    return cycles_for_tail(x, DEFAULT_TAIL_TOL)


def sample_erasure_trajectory(rng: np.random.Generator, x: float, max_cycles: int) -> float:
    """Spin paid in one stochastic run (units of hbar).

    The CNOT at cycle ``n`` pays one hbar exactly when the chain is in its
    logical-1 branch, which happens with probability ``1 / (1 + e^{n x})``.
    """
    _check_x(x)
    probs = cost_terms(x, max_cycles)
    return float(np.count_nonzero(rng.random(max_cycles) < probs))


def _map_trials(fn, n_trials: int, workers: int) -> np.ndarray:
    out = np.empty(n_trials)
    if workers <= 1:
        for i in range(n_trials):
            out[i] = fn(i)
        return out
    bounds = np.linspace(0, n_trials, workers + 1).astype(int)

    def run(lo, hi):
        for i in range(lo, hi):
            out[i] = fn(i)

    with ThreadPoolExecutor(workers) as pool:
        list(pool.map(run, bounds[:-1], bounds[1:]))
    return out


def trajectory_samples(rng: RngSpec, x: float, trials: int, max_cycles: int | None = None,
                       workers: int = 1) -> np.ndarray:
    _check_x(x)
    if trials < 1:
        raise DomainError("trials must be >= 1")
    cycles = default_cycles(x) if max_cycles is None else int(max_cycles)
    probs = cost_terms(x, cycles)

    def one(i):
        return np.count_nonzero(rng.stream(i).random(cycles) < probs)

    return _map_trials(one, trials, workers)


def trajectory_ensemble(rng: RngSpec, x: float, trials: int, max_cycles: int | None = None,
                        workers: int = 1) -> EnsembleStats:
    return EnsembleStats.from_samples(trajectory_samples(rng, x, trials, max_cycles, workers))


def residual_field_samples(rng: RngSpec, gamma: float, field: FieldModel, trials: int,
                           max_cycles: int | None = None, hbar: float = 1.0,
                           negate: bool = False, workers: int = 1) -> np.ndarray:
    """Per-trial energy cost ``sum_n p1(n) eps_n`` with fresh site splittings ``eps_n``."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if trials < 2:
        raise DomainError("need at least two trials")
    x = gamma * hbar
    cycles = default_cycles(x) if max_cycles is None else int(max_cycles)
    weights = cost_terms(x, cycles)
    if field.kind == "none":
        return np.zeros(trials)
    sign = -1.0 if negate else 1.0

    def one(i):
        return float(weights @ (sign * field.draw(rng.stream(i), cycles)))

    return _map_trials(one, trials, workers)


def residual_field_ensemble(rng: RngSpec, gamma: float, field: FieldModel, trials: int,
                            max_cycles: int | None = None, hbar: float = 1.0,
                            workers: int = 1) -> EnsembleStats:
    return EnsembleStats.from_samples(
        residual_field_samples(rng, gamma, field, trials, max_cycles, hbar, workers=workers)
    )


def residual_field_variance(gamma: float, field: FieldModel, max_cycles: int | None = None,
                            hbar: float = 1.0) -> float:
    """Exact ensemble variance ``sum_n p1(n)^2 Var(eps)``."""
    x = gamma * hbar
    cycles = default_cycles(x) if max_cycles is None else int(max_cycles)
    w = cost_terms(x, cycles)
    return float(w @ w) * field.variance
