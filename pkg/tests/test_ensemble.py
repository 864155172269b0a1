import math

import numpy as np
import pytest

from erasure_costs.ensemble import (
    EnsembleStats,
    FieldModel,
    RngSpec,
    Z99,
    residual_field_ensemble,
    residual_field_samples,
    residual_field_variance,
    sample_erasure_trajectory,
    trajectory_ensemble,
    trajectory_samples,
)
from erasure_costs.errors import DomainError
from erasure_costs.protocol import cost_series, cost_terms

LN2 = math.log(2)


class TestRng:
    def test_stream_is_a_function_of_seed_and_index(self):
        a = RngSpec(99).stream(7).random(5)
        b = RngSpec(99).stream(7).random(5)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, RngSpec(99).stream(8).random(5))
        assert not np.array_equal(a, RngSpec(100).stream(7).random(5))

    def test_seed_range(self):
        with pytest.raises(DomainError):
            RngSpec(-1)
        RngSpec(2**64 - 1).stream(0).random()


class TestTrajectory:
    def test_single_trajectory_repeatable(self):
        rng = RngSpec(5)
        assert sample_erasure_trajectory(rng.stream(3), LN2, 60) == \
            sample_erasure_trajectory(rng.stream(3), LN2, 60)

    def test_single_matches_batched(self):
        rng = RngSpec(5)
        batch = trajectory_samples(rng, 0.4, 50, max_cycles=80)
        single = [sample_erasure_trajectory(rng.stream(i), 0.4, 80) for i in range(50)]
        np.testing.assert_array_equal(batch, single)

    def test_huge_gap_pays_nothing(self):
        assert np.all(trajectory_samples(RngSpec(1), 800.0, 200) == 0)

    def test_rejects_nonpositive_gap(self):
        with pytest.raises(DomainError):
            trajectory_samples(RngSpec(1), 0.0, 10)

    def test_parallel_is_bit_identical(self):
        rng = RngSpec(31337)
        serial = trajectory_samples(rng, LN2, 5000)
        threaded = trajectory_samples(rng, LN2, 5000, workers=4)
        np.testing.assert_array_equal(serial, threaded)
        assert trajectory_ensemble(rng, LN2, 5000) == trajectory_ensemble(rng, LN2, 5000, workers=3)

    @pytest.mark.parametrize("trials", [1_000, 10_000, 100_000])
    def test_unbiased(self, trials):
        s = trajectory_ensemble(RngSpec(8), LN2, trials)
        assert abs(s.mean - cost_series(LN2)) <= 3 * s.stderr

    def test_variance_matches_bernoulli_sum(self):
        p = cost_terms(LN2, 60)
        s = trajectory_ensemble(RngSpec(77), LN2, 50_000)
        assert s.variance == pytest.approx(float(np.sum(p * (1 - p))), rel=0.03)


class TestFieldModel:
    @pytest.mark.parametrize("text,kind,scale", [
        ("none", "none", 0.0), ("uniform:0.2", "uniform", 0.2),
        ("gaussian:1e-3", "gaussian", 1e-3), ("constant:-0.5", "constant", -0.5),
    ])
    def test_parse(self, text, kind, scale):
        f = FieldModel.parse(text)
        assert (f.kind, f.scale) == (kind, scale)

    @pytest.mark.parametrize("text", ["uniform", "uniform:abc", "cauchy:1", "none:1", "gaussian:-1"])
    def test_parse_errors(self, text):
        with pytest.raises(DomainError):
            FieldModel.parse(text)

    def test_zero_mean_kinds(self):
        assert FieldModel("uniform", 3.0).mean == 0.0
        assert FieldModel("gaussian", 3.0).mean == 0.0


class TestResidualField:
    def test_no_field_is_exactly_zero(self):
        s = residual_field_samples(RngSpec(1), LN2, FieldModel(), 1000)
        assert np.all(s == 0.0)
        zero_width = residual_field_samples(RngSpec(1), LN2, FieldModel("uniform", 0.0), 100)
        assert np.all(zero_width == 0.0)

    @pytest.mark.parametrize("kind", ["uniform", "gaussian"])
    def test_zero_mean(self, kind):
        s = residual_field_ensemble(RngSpec(4242), LN2, FieldModel(kind, 0.05), 20_000)
        assert abs(s.mean) <= 3 * s.stderr

    def test_constant_field_is_linear(self):
        s = residual_field_ensemble(RngSpec(3), 0.9, FieldModel("constant", 0.25), 100)
        assert s.variance == 0.0
        assert s.mean == pytest.approx(0.25 * cost_series(0.9), rel=1e-12)

    def test_variance_formula(self):
        field = FieldModel("uniform", 0.1)
        s = residual_field_ensemble(RngSpec(11), LN2, field, 50_000)
        exact = residual_field_variance(LN2, field)
        w = cost_terms(LN2, 60)
        assert exact == pytest.approx(float(w @ w) * 0.01 / 3, rel=1e-12)
        assert s.variance == pytest.approx(exact, rel=0.03)

    @pytest.mark.parametrize("kind", ["uniform", "gaussian", "constant"])
    def test_antithetic(self, kind):
        rng = RngSpec(17)
        field = FieldModel(kind, 0.3)
        plus = residual_field_samples(rng, 0.5, field, 200)
        minus = residual_field_samples(rng, 0.5, field, 200, negate=True)
        np.testing.assert_array_equal(minus, -plus)

    def test_reproducible_across_workers(self):
        rng = RngSpec(2**63 + 5)
        field = FieldModel("gaussian", 0.2)
        a = residual_field_ensemble(rng, 1.1, field, 3000)
        b = residual_field_ensemble(rng, 1.1, field, 3000, workers=5)
        assert a == b

    def test_domain(self):
        with pytest.raises(DomainError):
            residual_field_ensemble(RngSpec(1), 0.0, FieldModel(), 10)
        with pytest.raises(DomainError):
            residual_field_ensemble(RngSpec(1), 1.0, FieldModel(), 1)


class TestStats:
    def test_known_sample(self):
        s = EnsembleStats.from_samples([1.0, 2.0, 3.0, 4.0])
        assert s.mean == 2.5
        assert s.variance == pytest.approx(5 / 3)
        assert s.stderr == pytest.approx(math.sqrt(5 / 3 / 4))
        lo, hi = s.ci99
        assert (lo + hi) / 2 == pytest.approx(s.mean)
        assert hi - s.mean == pytest.approx(Z99 * s.stderr)
        assert Z99 == pytest.approx(2.5758293035489, abs=1e-12)

    def test_needs_two(self):
        with pytest.raises(DomainError):
            EnsembleStats.from_samples([1.0])
