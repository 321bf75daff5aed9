"""Chi-square, log-rank, and combined weighted log-rank competitors."""

import math

import numpy as np
import pytest

from censored_mmd import (
    EmptyCellError,
    TransformedDataset,
    ZeroVarianceError,
    combined_wlr_test,
    logrank_test,
    pearson_cells,
    pearson_test,
    transform_cumhaz,
)
from censored_mmd.classical import (
    CENTRAL_WEIGHT,
    CONSTANT_WEIGHT,
    CROSSING_WEIGHT,
    DEFAULT_WEIGHT_FNS,
    EARLY_WEIGHT,
)
from censored_mmd.rng import substream

from oracles import riemann_integral


def null_transformed(seed, n, gamma=3 / 7):
    parts = seed if isinstance(seed, tuple) else (seed,)
    rng = substream(*parts, "classical-null")
    t = rng.standard_exponential(n)
    c = rng.standard_exponential(n) / gamma
    u = np.minimum(-np.expm1(-np.minimum(t, c)), 1 - 1e-12)
    return TransformedDataset(u, (t <= c).astype(int))


def risk_process(data):
    u = np.sort(data.u)

    def y_of(t):
        t = np.asarray(t)
        return (u[None, :] >= t[..., None]).sum(axis=-1).astype(float)

    return y_of, float(u.max())


# ------------------------------------------------------------------ weights

def test_weight_function_formulas():
    t = np.linspace(0, 1, 11)
    np.testing.assert_allclose(CONSTANT_WEIGHT(t), np.ones_like(t))
    np.testing.assert_allclose(EARLY_WEIGHT(t), t * (1 - t) ** 3)
    np.testing.assert_allclose(CENTRAL_WEIGHT(t), t * (1 - t))
    np.testing.assert_allclose(CROSSING_WEIGHT(t), 1 - 2 * t)
    assert [w.name for w in DEFAULT_WEIGHT_FNS] == ["constant", "early", "central", "crossing"]


# ------------------------------------------------------------------ Pearson

def test_pearson_cells_partition_counts_every_event():
    data = null_transformed(1, 150)
    cells = pearson_cells(data, k=4)
    assert cells.observed.sum() == data.delta.sum()
    assert np.all(cells.expected >= 0)
    np.testing.assert_allclose(cells.boundaries, [0, 0.25, 0.5, 0.75, 1.0])


def test_pearson_expected_mass_matches_riemann_integral():
    data = null_transformed(2, 60)
    cells = pearson_cells(data, k=4)
    u = np.sort(data.u)
    n = len(data)

    def survival_of_minimum(t):
        return (u[None, :] > t[..., None]).sum(axis=-1) / n

    for j in range(4):
        lo, hi = j / 4, min((j + 1) / 4, float(u.max()))
        if hi <= lo:
            expected = 0.0
        else:
            expected = riemann_integral(
                lambda t: survival_of_minimum(t) / (1.0 - t), lo, hi, steps=200_000
            )
        assert cells.expected[j] == pytest.approx(expected, abs=5e-5)


def test_pearson_statistic_mean_is_cell_count_under_null():
    # at n=200 the statistic is close to its chi-square limit
    reps, n = 2000, 200
    stats = np.empty(reps)
    for r in range(reps):
        stats[r] = pearson_test(null_transformed(("pearson-mean", r), n)).statistic
    se = stats.std(ddof=1) / math.sqrt(reps)
    assert abs(stats.mean() - 4.0) <= 3 * se


def test_pearson_empty_cell_reports_index():
    # every observation censored low: upper cells get zero expected mass
    data = TransformedDataset([0.05, 0.10, 0.15, 0.20], [0, 0, 0, 0])
    with pytest.raises(EmptyCellError) as err:
        pearson_test(data)
    assert err.value.cell_index == 1


def test_pearson_p_value_in_unit_interval():
    outcome = pearson_test(null_transformed(3, 100))
    assert 0.0 <= outcome.p_value <= 1.0
    assert outcome.dof == 4


# ----------------------------------------------------------------- log-rank

def test_logrank_single_observation_algebra():
    u0 = 0.4
    data = TransformedDataset([u0], [1])
    outcome = logrank_test(data, weight="constant")
    lam = transform_cumhaz(u0)
    assert outcome.statistic == pytest.approx((1 - lam) / math.sqrt(lam), abs=1e-12)


def test_logrank_constant_weight_centred_sum():
    data = null_transformed(4, 30)
    lam = transform_cumhaz(data.u)
    outcome = logrank_test(data, weight="constant")
    z = data.delta.sum() - lam.sum()
    assert outcome.statistic == pytest.approx(z / math.sqrt(lam.sum()), abs=1e-12)


def test_logrank_integrated_risk_matches_riemann():
    # sum of per-point cumulative hazards equals the integral of the
    # at-risk count against the null hazard
    data = null_transformed(5, 40)
    y_of, top = risk_process(data)
    direct = transform_cumhaz(data.u).sum()
    numeric = riemann_integral(lambda t: y_of(t) / (1.0 - t), 0.0, top, steps=400_000)
    assert direct == pytest.approx(numeric, abs=1e-3)
    assert abs(direct - numeric) / direct <= 1e-4


def test_gehan_weight_matches_riemann_integrals():
    data = null_transformed(6, 25)
    y_of, top = risk_process(data)
    outcome = logrank_test(data, weight="risk")
    u_sorted = np.sort(data.u)
    risk_at = np.array([(u_sorted >= v).sum() for v in data.u], dtype=float)
    z_direct = risk_at[data.delta == 1].sum() - riemann_integral(
        lambda t: y_of(t) ** 2 / (1.0 - t), 0.0, top, steps=400_000
    )
    var_direct = riemann_integral(lambda t: y_of(t) ** 3 / (1.0 - t), 0.0, top,
                                  steps=400_000)
    assert outcome.statistic == pytest.approx(z_direct / math.sqrt(var_direct), rel=5e-4)


def test_logrank_zero_variance():
    data = TransformedDataset([0.0, 0.0], [1, 1])
    with pytest.raises(ZeroVarianceError):
        logrank_test(data, weight="constant")


def test_logrank_unknown_weight():
    with pytest.raises(ValueError):
        logrank_test(null_transformed(7, 10), weight="sqrt")


# ----------------------------------------------------------------- combined

def test_combined_single_constant_weight_is_squared_logrank():
    for seed in range(5):
        data = null_transformed(("wlr-reduction", seed), 35)
        combined = combined_wlr_test(data, weights=[CONSTANT_WEIGHT])
        single = logrank_test(data, weight="constant")
        assert combined.dof == 1
        assert combined.statistic == pytest.approx(single.statistic ** 2, rel=1e-10)


def test_combined_duplicate_weight_drops_rank():
    data = null_transformed(8, 40)
    base = combined_wlr_test(data, weights=[CONSTANT_WEIGHT, CENTRAL_WEIGHT])
    duplicated = combined_wlr_test(data, weights=[CONSTANT_WEIGHT, CONSTANT_WEIGHT])
    assert base.dof == 2
    assert duplicated.dof == 1


def test_combined_default_weights_full_rank():
    data = null_transformed(9, 60)
    outcome = combined_wlr_test(data)
    assert outcome.dof == 4
    assert 0.0 <= outcome.p_value <= 1.0


def test_combined_zero_variance():
    data = TransformedDataset([0.0, 0.0], [1, 1])
    with pytest.raises(ZeroVarianceError):
        combined_wlr_test(data)


def test_combined_requires_weights():
    with pytest.raises(ValueError):
        combined_wlr_test(null_transformed(10, 10), weights=[])
