"""Unit tests for the drift estimators and the near-optimum formulas."""

import csv
import math

import pytest
from scipy import stats as scipy_stats

from dynbv.bitcore import RandomSource
from dynbv.drift import (
    AnalyticDriftParams,
    _ga_state_table,
    _poisson_weights,
    drift_profile,
    drift_sign_threshold,
    ea_drift_near_optimum,
    ea_state_value,
    ga_drift_near_optimum,
    ga_state_value,
    mc_drift,
    mc_drift_sample,
    write_analytic_csv,
    write_drift_csv,
)
from dynbv.environments import EnvironmentSpec
from dynbv.evolve import AlgorithmConfig

from oracles import naive_drift_sample


def test_ea_state_value_closed_form():
    assert ea_state_value(1) == 0.0
    assert ea_state_value(2) == pytest.approx(-1 / 3)
    assert ea_state_value(3) == pytest.approx(-1 / 2)
    values = [ea_state_value(r) for r in range(1, 200)]
    assert values == sorted(values, reverse=True)
    assert all(v > -1 for v in values)
    assert ea_state_value(10**6) == pytest.approx(-1.0, abs=1e-5)
    with pytest.raises(ValueError):
        ea_state_value(0)


def test_ga_state_values_satisfy_balance_equation():
    # Plug the solved values back into the balance equation, transcribed
    # term by term; the residual must vanish.
    for c in (0.5, 1.0, 2.0, 3.3):
        table = _ga_state_table(c, 12, None)
        q = _poisson_weights(c, None)
        for r in range(1, 13):
            fbar = table[r]
            half_r = 0.5 ** (r + 1)
            rhs = sum(
                qs * ((r + 2 * s + 1) / (r + s + 1) * fbar + (1 - r) / (r + s + 1))
                for s, qs in enumerate(q)
            )
            rhs += 0.5 * fbar + 0.5 * (1 - r) / (r + 1)
            rhs += sum(
                math.comb(r, s) * half_r * (s + 1 - r) / (r + 1) for s in range(r)
            )
            rhs += sum(
                math.comb(r, s) * half_r * (r / (r + 1)) * table[r - s]
                for s in range(1, r)
            )
            rhs += half_r * (r / (r + 1)) * fbar
            rhs += half_r
            rhs += sum(
                math.comb(r, s) * half_r * fbar / (s + 1) for s in range(r + 1)
            )
            assert rhs == pytest.approx(4 * fbar, abs=1e-10)


def test_ga_state_value_bounds_and_base_case():
    for c in (0.5, 1.0, 2.0, 4.0):
        for r in range(1, 30):
            assert ga_state_value(r, c, r_max=30) <= 1.0
    # r = 1 has an empty recursive sum and is directly computable:
    # 0.25 / (2 - sum_s q_s * s / (s + 2)).
    c = 2.0
    q = _poisson_weights(c, None)
    drag = sum(qs * s / (s + 2) for s, qs in enumerate(q))
    assert ga_state_value(1, c) == pytest.approx(0.25 / (2.0 - drag))
    with pytest.raises(ValueError):
        ga_state_value(0, 1.0)
    with pytest.raises(ValueError):
        ga_state_value(60, 1.0, r_max=50)


def test_poisson_weights_cutoff():
    q = _poisson_weights(2.0, None)
    assert sum(q) == pytest.approx(1.0, abs=1e-12)
    assert q[-1] < 1e-13


def test_truncation_is_converged():
    base_ea = ea_drift_near_optimum(AnalyticDriftParams(c=2.3, n=3000, y=1, r_max=50))
    more_ea = ea_drift_near_optimum(AnalyticDriftParams(c=2.3, n=3000, y=1, r_max=60))
    assert abs(base_ea - more_ea) < 1e-9
    base_ga = ga_drift_near_optimum(AnalyticDriftParams(c=3.3, n=3000, y=1, r_max=50))
    more_ga = ga_drift_near_optimum(
        AnalyticDriftParams(c=3.3, n=3000, y=1, r_max=60, s_max=260)
    )
    assert abs(base_ga - more_ga) < 1e-9


def test_drift_formulas_limit_small_c():
    # As c -> 0 only the single-zero-flip path survives, so the conditional
    # drift approaches one gained zero-bit.
    for fn in (ea_drift_near_optimum, ga_drift_near_optimum):
        value = fn(AnalyticDriftParams(c=1e-6, n=3000, y=1))
        assert value == pytest.approx(1.0, abs=1e-4)


def test_sign_thresholds_match_reported_intervals():
    ea = drift_sign_threshold("ea", n=3000, y=1, c_lo=1.5, c_hi=4.0, tolerance=0.01)
    assert 2.4 <= ea <= 2.6
    ga = drift_sign_threshold("ga", n=3000, y=1, c_lo=2.0, c_hi=5.0, tolerance=0.01)
    assert 3.0 <= ga <= 3.2


def test_sign_threshold_errors():
    with pytest.raises(ValueError):
        drift_sign_threshold("ea", 3000, 1, 0.5, 1.0)
    with pytest.raises(ValueError):
        drift_sign_threshold("sa", 3000, 1, 1.5, 4.0)


def test_params_validation():
    with pytest.raises(ValueError):
        AnalyticDriftParams(c=0.0, n=100)
    with pytest.raises(ValueError):
        AnalyticDriftParams(c=1.0, n=100, y=0)
    with pytest.raises(ValueError):
        AnalyticDriftParams(c=1.0, n=100, r_max=0)


def test_mc_drift_sample_basics():
    rng = RandomSource(5)
    config = AlgorithmConfig(mu=1, c=1.0)
    spec = EnvironmentSpec()
    deltas = [mc_drift_sample(config, spec, 200, 1, 10**6, rng) for _ in range(2000)]
    assert all(d is not None for d in deltas)
    assert all(abs(d) <= 200 for d in deltas)
    mean = sum(deltas) / len(deltas)
    assert mean > 0.3  # positive drift well below the threshold
    assert max(deltas) == 1  # y=1: at most one zero-bit can be gained
    with pytest.raises(ValueError):
        mc_drift_sample(config, spec, 200, 0, 100, rng)
    with pytest.raises(ValueError):
        mc_drift_sample(config, spec, 200, 201, 100, rng)


def test_mc_drift_sample_timeout():
    rng = RandomSource(6)
    config = AlgorithmConfig(mu=2, c=1.0)
    out = [mc_drift_sample(config, EnvironmentSpec(), 400, 1, 1, rng) for _ in range(50)]
    assert out.count(None) >= 45


def test_mc_drift_estimate_fields():
    rng = RandomSource(7)
    config = AlgorithmConfig(mu=2, c=2.0, variant="GA")
    est = mc_drift(config, EnvironmentSpec(), 300, 5, samples=400, rng=rng)
    assert est.samples + est.timeouts == 400
    assert est.std_err == pytest.approx(est.std_dev / math.sqrt(est.samples))
    assert est.y == 5


def test_mc_drift_matches_naive_stepping():
    # The fast-forwarded sampler must produce the same delta distribution as
    # stepping every generation.
    n, y, samples = 60, 4, 4000
    spec = EnvironmentSpec()
    for config in (
        AlgorithmConfig(mu=2, c=2.0),
        AlgorithmConfig(mu=2, c=1.5, variant="GA"),
    ):
        rng_fast = RandomSource(100)
        rng_slow = RandomSource(200)
        fast = [
            mc_drift_sample(config, spec, n, y, 10**6, rng_fast) for _ in range(samples)
        ]
        slow = [
            naive_drift_sample(config, spec, n, y, 10**6, rng_slow)
            for _ in range(samples)
        ]
        assert None not in fast and None not in slow
        lo = min(min(fast), min(slow))
        hi = max(max(fast), max(slow))
        table = [
            [sum(1 for d in fast if d == v) + 1, sum(1 for d in slow if d == v) + 1]
            for v in range(lo, hi + 1)
        ]
        result = scipy_stats.chi2_contingency(table)
        assert result.pvalue > 1e-3


def test_drift_profile_deterministic_and_ordered(tmp_path):
    config = AlgorithmConfig(mu=2, c=2.0)
    spec = EnvironmentSpec()
    a = drift_profile(config, spec, 120, [1, 5, 10], samples=150, master_seed=3, workers=1)
    b = drift_profile(config, spec, 120, [1, 5, 10], samples=150, master_seed=3, workers=2)
    assert a == b
    assert [est.y for est in a] == [1, 5, 10]
    with pytest.raises(ValueError):
        drift_profile(config, spec, 120, [], samples=10)

    path = write_drift_csv(a, config, 120, tmp_path / "profile.csv")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
    assert header == [
        "algorithm", "mu", "c", "n", "y", "mean", "std_dev", "std_err", "samples", "timeouts",
    ]


def test_analytic_csv_schema(tmp_path):
    params = AnalyticDriftParams(c=2.0, n=3000, y=1)
    path = write_analytic_csv(
        [("ea", params, ea_drift_near_optimum(params))], tmp_path / "analytic.csv"
    )
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "algorithm,c,n,y,drift,r_max"
    assert lines[1].startswith("ea,2.0,3000,1,")
