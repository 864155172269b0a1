"""Thermal memory and spin reservoirs.

Everything is computed in natural units (hbar = k = 1) from the single
dimensionless gap ratio ``x``: ``epsilon / kT`` for a Zeeman-split bath and
``gamma * hbar`` for an energy-degenerate bath.  A reservoir spin is in
logical 1 with probability ``alpha = 1 / (1 + e^x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import expit, gammaln

from .errors import DomainError, NonpositiveTemperature, ToleranceNotMet

LN2 = math.log(2.0)
LOG_SPACE_THRESHOLD = 50
MIN_REL_TOL = 1e-13


def _check_kT(kT):
    if not kT > 0:
        raise NonpositiveTemperature(f"kT must be positive, got {kT}")


def alpha_from_x(x: float) -> float:
    """Logical-1 population of one bath spin at gap ratio ``x``."""
    return float(expit(-x))


def x_from_alpha(alpha: float) -> float:
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return math.log1p(-alpha) - math.log(alpha)


# -- archetypal thermal memory ------------------------------------------------

@dataclass(frozen=True)
class ThermalMemory:
    """Two-level memory with gap ``E`` in contact with a bath at ``kT``."""

    E: float
    kT: float

    def __post_init__(self):
        _check_kT(self.kT)
        if not self.E >= 0:
            raise DomainError(f"gap E must be >= 0, got {self.E}")

    @property
    def populations(self) -> tuple[float, float]:
        return memory_equilibrium(self.E, self.kT)


def memory_equilibrium(E: float, kT: float) -> tuple[float, float]:
    """Boltzmann populations ``(p0, p1)`` of a memory with gap ``E``.

    ``E = inf`` is accepted and gives the frozen ground state ``(1, 0)``.
    """
    _check_kT(kT)
    if not E >= 0:
        raise DomainError(f"gap E must be >= 0, got {E}")
    p1 = float(expit(-E / kT)) if math.isfinite(E) else 0.0
    return 1.0 - p1, p1


def landauer_work_exact(kT: float, E_max: float) -> float:
    """Closed form ``kT [ln 2 - ln(1 + e^{-E_max/kT})]``; accepts ``E_max = inf``."""
    _check_kT(kT)
    if not E_max >= 0:
        raise DomainError(f"E_max must be >= 0, got {E_max}")
    if math.isinf(E_max):
        return kT * LN2
    # ln 2 - ln(1 + e^-u) written to avoid cancellation at small u
    return -kT * math.log1p(0.5 * math.expm1(-E_max / kT))


def landauer_work(kT: float, E_max: float, rel_tol: float = 1e-10) -> float:
    """Quasi-static work to raise the memory gap from 0 to ``E_max``.

    Integrates ``dW = p1(E) dE`` by adaptive quadrature.  The result is
    checked against the closed-form antiderivative; an infinite ``E_max`` goes
    straight to the closed form.
    """
    _check_kT(kT)
    if not E_max >= 0:
        raise DomainError(f"E_max must be >= 0, got {E_max}")
    if not rel_tol > 0:
        raise DomainError("rel_tol must be positive")
    if math.isinf(E_max):
        return landauer_work_exact(kT, E_max)
    if E_max == 0:
        return 0.0
    if rel_tol < MIN_REL_TOL:
        raise ToleranceNotMet(f"rel_tol {rel_tol:g} is below double-precision quadrature limits")

    # Integrate in units of kT so the quadrature sees the same shape at any scale.
    upper = E_max / kT
    value, abserr = quad(lambda u: expit(-u), 0.0, upper, epsabs=0.0,
                         epsrel=max(rel_tol * 0.1, 1e-13), limit=200)
    work = kT * value
    exact = landauer_work_exact(kT, E_max)
    if kT * abserr > rel_tol * abs(work) or abs(work - exact) > rel_tol * abs(exact):
        raise ToleranceNotMet(
            f"quadrature error {kT * abserr:.3e} exceeds rel_tol {rel_tol:g}",
            error_estimate=kT * abserr,
        )
    return work


# -- spin baths -----------------------------------------------------------------

@dataclass(frozen=True)
class SpinBathParams:
    """N two-level spins, either Zeeman-split (``epsilon``, ``kT``) or degenerate (``gamma``).

    Use :meth:`zeeman` or :meth:`degenerate` rather than the raw constructor.
    """

    N: int
    mode: str
    epsilon: float | None = None
    kT: float | None = None
    gamma: float | None = None
    hbar: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N}")
        if not self.hbar > 0:
            raise DomainError("hbar must be positive")
        if self.mode == "zeeman":
            if self.epsilon is None or not self.epsilon > 0:
                raise DomainError("zeeman bath needs epsilon > 0")
            _check_kT(self.kT)
        elif self.mode == "degenerate":
            if self.gamma is None or not math.isfinite(self.gamma):
                raise DomainError("degenerate bath needs a finite gamma")
        else:
            raise DomainError(f"unknown bath mode {self.mode!r}")
        if not math.isfinite(self.x):
            raise DomainError("gap ratio must be finite")

    @classmethod
    def zeeman(cls, N: int, epsilon: float, kT: float, hbar: float = 1.0):
        return cls(N, "zeeman", epsilon=epsilon, kT=kT, hbar=hbar)

    @classmethod
    def degenerate(cls, N: int, gamma: float, hbar: float = 1.0):
        return cls(N, "degenerate", gamma=gamma, hbar=hbar)

    @property
    def x(self) -> float:
        if self.mode == "zeeman":
            return self.epsilon / self.kT
        return self.gamma * self.hbar

    @property
    def alpha(self) -> float:
        return alpha_from_x(self.x)


@dataclass(frozen=True)
class HammingDistribution:
    """Probability law of the bath Hamming weight ``n``.

    ``per_microstate[n]`` is the probability of any single microstate with
    weight ``n``; ``weights[n] = C(N, n) * per_microstate[n]``.
    """

    N: int
    weights: np.ndarray
    per_microstate: np.ndarray

    @property
    def mean_weight(self) -> float:
        return float(np.arange(self.N + 1) @ self.weights)

    def mean_jz(self, hbar: float = 1.0) -> float:
        return hbar * (self.mean_weight - self.N / 2)


def log_binomial(N: int, n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return gammaln(N + 1) - gammaln(n + 1) - gammaln(N - n + 1)


def hamming_distribution(N: int, x: float, log_space: bool | None = None) -> HammingDistribution:
    """Hamming-weight law for ``N`` independent spins at gap ratio ``x``."""
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    if not math.isfinite(x):
        raise DomainError("gap ratio must be finite")
    N = int(N)
    n = np.arange(N + 1)
    if log_space is None:
        log_space = N > LOG_SPACE_THRESHOLD
    # log(1 + e^{-x}) without overflow for either sign of x
    log_norm = float(np.logaddexp(0.0, -x))
    log_micro = -n * x - N * log_norm
    if log_space:
        per_micro = np.exp(log_micro)
        weights = np.exp(log_binomial(N, n) + log_micro)
    else:
        per_micro = np.exp(-n * x) / (1.0 + math.exp(-x)) ** N
        weights = np.array([math.comb(N, k) for k in n], dtype=float) * per_micro
    per_micro.setflags(write=False)
    weights.setflags(write=False)
    return HammingDistribution(N, weights, per_micro)


def bath_distribution(params: SpinBathParams, log_space: bool | None = None) -> HammingDistribution:
    return hamming_distribution(params.N, params.x, log_space=log_space)


def gamma_from_alpha(alpha: float, hbar: float = 1.0) -> float:
    """Spin multiplier ``gamma = ln((1 - alpha)/alpha) / hbar``."""
    if not hbar > 0:
        raise DomainError("hbar must be positive")
    return x_from_alpha(alpha) / hbar


def alpha_from_gamma(gamma: float, hbar: float = 1.0) -> float:
    if not hbar > 0:
        raise DomainError("hbar must be positive")
    return alpha_from_x(gamma * hbar)


def kT_from_alpha(epsilon: float, alpha: float) -> float:
    """Temperature that gives a Zeeman bath with gap ``epsilon`` the population ``alpha``."""
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    if not 0 < alpha < 0.5:
        raise DomainError(
            f"alpha must lie in (0, 1/2) for a positive finite temperature, got {alpha}"
        )
    return epsilon / x_from_alpha(alpha)


def distribution_equivalence(N: int, epsilon: float, kT: float, gamma: float,
                             hbar: float = 1.0) -> float:
    """Largest gap between the Zeeman and degenerate Hamming laws.

    Zero exactly when ``epsilon / kT == gamma * hbar``: the degenerate bath's
    distribution is reproduced by a Zeeman bath at every temperature with a
    matching splitting, so it pins down no temperature of its own.
    """
    zee = bath_distribution(SpinBathParams.zeeman(N, epsilon, kT, hbar))
    deg = bath_distribution(SpinBathParams.degenerate(N, gamma, hbar))
    return float(np.max(np.abs(zee.weights - deg.weights)))
