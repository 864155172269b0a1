import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from erasure_costs.bounds import (
    VariableSpec,
    hamming_cost_bound,
    multi_cost_total,
    optimality_identity,
    reservoir_entropy,
    variable_cost_bound,
)
from erasure_costs.errors import DomainError
from erasure_costs.protocol import ProtocolConfig, combined_scaled_cost, cost_series, run_erasure
from erasure_costs.reservoirs import alpha_from_x, kT_from_alpha

LN2 = math.log(2)


class TestReservoirEntropy:
    def test_maximal(self):
        assert reservoir_entropy(1, 0.5) == pytest.approx(LN2)

    @pytest.mark.parametrize("alpha", [0.0, 1.0])
    def test_pure(self, alpha):
        assert reservoir_entropy(7, alpha) == 0.0

    def test_one_third(self):
        assert reservoir_entropy(1, 1 / 3) == pytest.approx(math.log(3) - 2 / 3 * LN2, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            reservoir_entropy(1, 1.2)
        with pytest.raises(DomainError):
            reservoir_entropy(0, 0.3)

    def test_concave_with_peak_at_half(self):
        N = 10
        a = np.linspace(0.01, 0.99, 99)
        s = np.array([reservoir_entropy(N, v) for v in a])
        second = s[2:] - 2 * s[1:-1] + s[:-2]
        assert np.all(second < 0)
        assert a[np.argmax(s)] == pytest.approx(0.5)
        assert s.max() == pytest.approx(N * LN2)

    @pytest.mark.parametrize("alpha", [0.05, 0.2, 1 / 3, 0.45])
    def test_derivative_per_hamming_unit(self, alpha):
        N = 1000
        h = 1e-3  # step in n = alpha N
        ds_dn = (reservoir_entropy(N, alpha + h / N) - reservoir_entropy(N, alpha - h / N)) / (2 * h)
        assert ds_dn == pytest.approx(math.log((1 - alpha) / alpha), abs=1e-6)


class TestHammingBound:
    def test_one_third(self):
        assert hamming_cost_bound(1 / 3) == pytest.approx(1.0, abs=1e-15)

    def test_vanishes_for_cold_bath(self):
        assert hamming_cost_bound(1e-300) < 0.002

    def test_one_quarter(self):
        assert hamming_cost_bound(0.25) == pytest.approx(LN2 / math.log(3), abs=1e-15)
        assert hamming_cost_bound(0.25) == pytest.approx(0.63093, abs=1e-5)

    @pytest.mark.parametrize("alpha", [0.5, 0.7, 0.0, -0.1])
    def test_domain(self, alpha):
        with pytest.raises(DomainError):
            hamming_cost_bound(alpha)


class TestVariableBound:
    def test_spin(self):
        hbar = 1.7
        assert variable_cost_bound(1 / 3, VariableSpec("Jz", hbar)) == pytest.approx(hbar)

    def test_energy_is_landauer(self):
        eps = 0.8
        bound = variable_cost_bound(1 / 3, VariableSpec("E", eps))
        assert bound == pytest.approx(eps)
        assert bound == pytest.approx(kT_from_alpha(eps, 1 / 3) * LN2)

    def test_linear_in_eigenvalue(self):
        one = variable_cost_bound(0.2, VariableSpec("Jz", 1.0))
        assert variable_cost_bound(0.2, VariableSpec("Jz", 2.0)) == pytest.approx(2 * one)

    def test_zero_eigenvalue(self):
        with pytest.raises(DomainError):
            VariableSpec("bad", 0.0)


class TestMultiCost:
    def test_single_variable_on_the_bound(self):
        alpha, v = 0.2, 3.0
        dv = v * LN2 / math.log((1 - alpha) / alpha)
        total, ok = multi_cost_total(alpha, [(dv, v)])
        assert total == pytest.approx(LN2)
        assert ok

    def test_zeeman_protocol_pays_twice(self):
        x = LN2
        eps, hbar = 1.3, 0.7
        led = run_erasure(ProtocolConfig(x, "zeeman", max_cycles=60, epsilon=eps, hbar=hbar))
        total, ok = multi_cost_total(alpha_from_x(x), [(led.delta_E, eps), (led.delta_Jz_primed, hbar)])
        assert total == pytest.approx(combined_scaled_cost(x), abs=1e-12)
        assert total == pytest.approx(1.75297, abs=1e-5)
        assert ok and total >= 2 * LN2

    def test_no_payment(self):
        total, ok = multi_cost_total(0.3, [(0.0, 1.0), (0.0, 2.0)])
        assert total == 0.0 and not ok

    def test_degenerate_protocol_exceeds_one_bit(self):
        for x in (0.05, 0.5, 2.0):
            led = run_erasure(ProtocolConfig(x, max_cycles=2000))
            total, ok = multi_cost_total(alpha_from_x(x), [(led.delta_Jz_primed, 1.0)])
            assert ok and total > LN2


class TestOptimality:
    @pytest.mark.parametrize("alpha,tol", [(1 / 3, 1e-15), (0.1, 1e-12), (0.49, 1e-9)])
    def test_identity(self, alpha, tol):
        assert optimality_identity(alpha) <= tol

    @given(st.floats(1e-9, 0.5 - 1e-9, exclude_max=True))
    def test_identity_everywhere(self, alpha):
        assert optimality_identity(alpha) <= 1e-12 * max(1.0, hamming_cost_bound(alpha))

    @pytest.mark.parametrize("x", np.geomspace(1e-3, 10, 15))
    def test_protocol_dominates_bound(self, x):
        primed = cost_series(x) + 0.5
        bound = hamming_cost_bound(alpha_from_x(x))
        assert primed > bound

    def test_ratio_tends_to_one(self):
        ratios = [(cost_series(x) + 0.5) / hamming_cost_bound(alpha_from_x(x))
                  for x in (1.0, 0.1, 0.01, 0.001)]
        assert all(b < a for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] == pytest.approx(1.0, abs=1e-3)
