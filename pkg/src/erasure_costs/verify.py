"""Cross-module invariant checks run by ``erasure-costs verify``.

Each check returns ``(passed, detail)``.  Checks look functions up through
their modules at call time so a patched module is what gets verified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bounds, ensemble, finite_bath, maxent_core, protocol, reservoirs

LN2 = math.log(2.0)
X_GRID = (0.01, 0.1, 0.5, LN2, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_landauer_limit():
    w = reservoirs.landauer_work(1.0, 50.0, 1e-10)
    return abs(w - LN2) <= 1e-6, f"W={w:.12g}"


def check_series_sandwich():
    worst = math.inf
    for x in X_GRID:
        s = protocol.cost_series(x)
        b = protocol.cost_bounds(x)
        margins = (s - b.unprimed[0], b.unprimed[1] - s,
                   s + 0.5 - b.primed[0], b.primed[1] - s - 0.5)
        worst = min(worst, *margins)
    return worst > 1e-9, f"min margin {worst:.3g}"


def check_factor_of_two():
    values = [protocol.combined_scaled_cost(x) for x in X_GRID + (1e-3,)]
    above = all(v > 2 * LN2 for v in values)
    rel = (values[-1] - 2 * LN2) / (2 * LN2)
    return above and rel < 1e-3, f"excess at x=1e-3: {rel:.3g}"


def check_degenerate_spin_only():
    ok = True
    for g in X_GRID:
        led = protocol.run_erasure(protocol.ProtocolConfig(g, "degenerate", max_cycles=
                                                           protocol.cycles_for_tail(g, 1e-14)))
        ok &= led.delta_E is None and all(r.energy_cost is None for r in led.records)
        ok &= led.delta_Jz_primed > LN2 / g
    return ok, "energy channel absent, dJz' > ln2/gamma"


def check_optimality_identity():
    worst = max(bounds.optimality_identity(a) for a in np.linspace(0.01, 0.45, 45))
    return worst <= 1e-12, f"max diff {worst:.3g}"


def check_distribution_equivalence():
    worst = max(reservoirs.distribution_equivalence(N, LN2, 1.0, LN2) for N in range(1, 65))
    return worst <= 1e-12, f"max diff {worst:.3g}"


def check_maxent_round_trip():
    rng = np.random.default_rng(20240101)
    worst_res = worst_ent = 0.0
    for _ in range(10):
        dim, K = int(rng.integers(2, 17)), int(rng.integers(1, 4))
        table = maxent_core.ObservableTable(rng.normal(size=(K, dim)), tuple(f"V{k}" for k in range(K)))
        targets = table.expectations(rng.dirichlet(np.ones(dim)))
        st = maxent_core.solve_multipliers(table, targets, tol=1e-11)
        worst_res = max(worst_res, float(np.max(np.abs(st.expectations - targets))))
        worst_ent = max(worst_ent, abs(maxent_core.state_entropy(st)
                                       - maxent_core.entropy_identity_value(st)))
    return worst_res <= 1e-9 and worst_ent <= 1e-10, f"residual {worst_res:.2g}, identity {worst_ent:.2g}"


def check_finite_bath():
    devs = []
    ok = True
    for N in (4, 6, 8, 10, 12):
        rep = finite_bath.simulate_finite(N, LN2, min(N, 4))
        devs.append(rep.cycles[0].deviation)
        for c in rep.cycles:
            ok &= c.dS_total >= -1e-12 and abs(c.conserved_after - c.conserved_before) <= 1e-12
    ok &= all(a > b for a, b in zip(devs, devs[1:]))
    return ok, "deviations " + ", ".join(f"{d:.4f}" for d in devs)


def check_trajectory_mean():
    stats = ensemble.trajectory_ensemble(ensemble.RngSpec(2024), LN2, 10_000)
    target = protocol.cost_series(LN2)
    return abs(stats.mean - target) <= 3 * stats.stderr, f"mean {stats.mean:.5f} vs {target:.5f}"


def check_residual_field():
    rng = ensemble.RngSpec(2025)
    zero = ensemble.residual_field_ensemble(rng, LN2, ensemble.FieldModel("uniform", 0.1), 10_000)
    const = ensemble.residual_field_ensemble(rng, LN2, ensemble.FieldModel("constant", 0.3), 10)
    expect = 0.3 * protocol.cost_series(LN2)
    ok = abs(zero.mean) <= 3 * zero.stderr and math.isclose(const.mean, expect, rel_tol=1e-12)
    return ok, f"uniform mean {zero.mean:.3g} (se {zero.stderr:.2g})"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "landauer_limit": check_landauer_limit,
    "series_bounds_sandwich": check_series_sandwich,
    "factor_of_two": check_factor_of_two,
    "degenerate_spin_only": check_degenerate_spin_only,
    "optimality_identity": check_optimality_identity,
    "distribution_equivalence": check_distribution_equivalence,
    "maxent_round_trip": check_maxent_round_trip,
    "finite_bath_convergence": check_finite_bath,
    "trajectory_mean": check_trajectory_mean,
    "residual_field_zero_mean": check_residual_field,
}


def run_checks() -> list[CheckResult]:
    out = []
    for name, fn in CHECKS.items():
        try:
            passed, detail = fn()
        except Exception as exc:  # a crash is a failed invariant, not a crashed report
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(passed), detail))
    return out
