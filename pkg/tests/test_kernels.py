"""Kernel core: closed forms against quadrature, symmetry, boundedness."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from censored_mmd import (
    DegenerateCensoringError,
    KernelSpec,
    TransformedDataset,
    j_eval,
    j_gram,
    k_eval,
    line_integral,
    rect_integral,
)
from censored_mmd.kernels import MAX_U

from oracles import j_quad, line_quad, rect_quad

UNIT = KernelSpec(1.0)

# adaptive-quadrature values, frozen (see oracles.py for their derivation)
RECT_UNIT_SQUARE_L1 = 0.8615277067962964
LINE_HALFPOINT_L1 = 0.9225620128255848  # = sqrt(pi) * erf(1/2)
J_UNCENSORED_HALF_L1 = 0.01640368114512658


def test_kernel_spec_requires_positive_lengthscale():
    with pytest.raises(ValueError):
        KernelSpec(0.0)
    with pytest.raises(ValueError):
        KernelSpec(-1.0)
    with pytest.raises(ValueError):
        KernelSpec(float("nan"))


def test_k_eval_identity_at_equal_arguments():
    assert k_eval(0.3, 0.3, UNIT) == 1.0


def test_k_eval_direct_formula():
    assert k_eval(0.0, 1.0, UNIT) == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_k_eval_symmetric_on_random_triples():
    rng = np.random.default_rng(7)
    for _ in range(100):
        x, y = rng.uniform(0, 1, 2)
        spec = KernelSpec(rng.uniform(0.05, 5.0))
        assert k_eval(x, y, spec) == k_eval(y, x, spec)


def test_rect_integral_zero_width_rectangle():
    assert rect_integral(0.4, 0.4, 0.1, 0.9, UNIT) == 0.0
    assert rect_integral(0.1, 0.9, 0.7, 0.7, UNIT) == 0.0


def test_rect_integral_flat_kernel_limit():
    value = rect_integral(0.0, 1.0, 0.0, 1.0, KernelSpec(1e6))
    assert abs(value - 1.0) <= 1e-6


def test_rect_integral_matches_quadrature():
    value = rect_integral(0.0, 1.0, 0.0, 1.0, UNIT)
    assert abs(value - RECT_UNIT_SQUARE_L1) <= 1e-8
    rng = np.random.default_rng(21)
    for _ in range(10):
        a, b = np.sort(rng.uniform(0, 1, 2))
        c, d = np.sort(rng.uniform(0, 1, 2))
        spec = KernelSpec(rng.uniform(0.1, 3.0))
        assert rect_integral(a, b, c, d, spec) == pytest.approx(
            rect_quad(a, b, c, d, spec.lengthscale), abs=1e-8
        )


def test_line_integral_zero_width():
    assert line_integral(0.3, 0.3, 0.5, UNIT) == 0.0


def test_line_integral_halfpoint_value():
    value = line_integral(0.0, 1.0, 0.5, UNIT)
    assert value == pytest.approx(LINE_HALFPOINT_L1, abs=1e-12)
    assert value == pytest.approx(line_quad(0.0, 1.0, 0.5, 1.0), abs=1e-8)


def test_line_integral_reflection_symmetry():
    rng = np.random.default_rng(3)
    for x in rng.uniform(0, 1, 20):
        left = line_integral(0.0, 1.0, x, UNIT)
        right = line_integral(0.0, 1.0, 1.0 - x, UNIT)
        assert left == pytest.approx(right, abs=1e-12)


def test_j_eval_symmetry_is_exact():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        u1, u2 = rng.uniform(0, 0.9999, 2)
        d1, d2 = rng.integers(0, 2, 2)
        spec = KernelSpec(rng.uniform(0.05, 5.0))
        assert j_eval(u1, int(d1), u2, int(d2), spec) == j_eval(u2, int(d2), u1, int(d1), spec)


def test_j_eval_uncensored_midpoint_value():
    value = j_eval(0.5, 1, 0.5, 1, UNIT)
    expansion = rect_integral(0, 1, 0, 1, UNIT) - 2 * line_integral(0, 1, 0.5, UNIT) + 1.0
    assert value == pytest.approx(expansion, abs=1e-14)
    assert value == pytest.approx(J_UNCENSORED_HALF_L1, abs=1e-10)


def test_j_eval_matches_quadrature_mixed_censoring():
    rng = np.random.default_rng(5)
    for _ in range(60):
        u1, u2 = rng.uniform(0, 0.999, 2)
        d1, d2 = (int(v) for v in rng.integers(0, 2, 2))
        spec = KernelSpec(rng.uniform(0.1, 3.0))
        assert j_eval(u1, d1, u2, d2, spec) == pytest.approx(
            j_quad(u1, d1, u2, d2, spec.lengthscale), abs=1e-8
        )


def test_j_eval_rejects_degenerate_censored_point():
    with pytest.raises(DegenerateCensoringError):
        j_eval(1.0 - 1e-13, 0, 0.5, 1, UNIT)
    # the clamp boundary itself is fine
    j_eval(MAX_U, 0, 0.5, 1, UNIT)


def test_j_eval_rejects_out_of_domain_arguments():
    with pytest.raises(ValueError):
        j_eval(1.0, 1, 0.5, 1, UNIT)
    with pytest.raises(ValueError):
        j_eval(-0.1, 1, 0.5, 1, UNIT)
    with pytest.raises(ValueError):
        j_eval(0.5, 2, 0.5, 1, UNIT)


def test_j_eval_broadcasts_over_arrays():
    u = np.array([0.1, 0.5, 0.9])
    d = np.array([1, 0, 1])
    vals = j_eval(0.3, 1, u, d, UNIT)
    assert vals.shape == (3,)
    for i in range(3):
        assert vals[i] == j_eval(0.3, 1, float(u[i]), int(d[i]), UNIT)


@settings(max_examples=200, deadline=None)
@given(
    u1=st.floats(0.0, 0.999),
    u2=st.floats(0.0, 0.999),
    d1=st.integers(0, 1),
    d2=st.integers(0, 1),
    lengthscale=st.floats(0.05, 10.0),
)
def test_j_eval_bounded_by_four(u1, u2, d1, d2, lengthscale):
    value = j_eval(u1, d1, u2, d2, KernelSpec(lengthscale))
    assert abs(value) <= 4.0 + 1e-9


def test_j_gram_two_points_exactly_mirrored():
    data = TransformedDataset([0.2, 0.7], [1, 0])
    gram = j_gram(data, UNIT)
    assert gram.values.shape == (2, 2)
    assert gram.values[0, 1] == gram.values[1, 0]


def test_j_gram_all_uncensored_reduction():
    rng = np.random.default_rng(19)
    u = rng.uniform(0, 1 - 1e-6, 12)
    data = TransformedDataset(u, np.ones(12, dtype=int))
    gram = j_gram(data, UNIT)
    total = rect_integral(0, 1, 0, 1, UNIT)
    line = line_integral(0, 1, u, UNIT)
    expected = total - line[:, None] - line[None, :] + k_eval(u[:, None], u[None, :], UNIT)
    np.testing.assert_allclose(gram.values, expected, atol=1e-12)


def test_j_gram_matches_quadrature_oracle():
    rng = np.random.default_rng(23)
    n = 10
    u = rng.uniform(0, 0.99, n)
    d = rng.integers(0, 2, n)
    data = TransformedDataset(u, d)
    spec = KernelSpec(0.8)
    gram = j_gram(data, spec)
    for i in range(n):
        for j in range(i, n):
            assert gram.values[i, j] == pytest.approx(
                j_quad(u[i], int(d[i]), u[j], int(d[j]), 0.8), abs=1e-8
            )


def test_j_gram_quadratic_form_is_positive_semidefinite():
    rng = np.random.default_rng(29)
    for _ in range(5):
        n = 25
        data = TransformedDataset(rng.uniform(0, 0.99, n), rng.integers(0, 2, n))
        gram = j_gram(data, KernelSpec(rng.uniform(0.2, 2.0)))
        eigvals = np.linalg.eigvalsh(gram.values)
        assert eigvals.min() >= -1e-9
        for _ in range(10):
            w = rng.standard_normal(n)
            assert w @ gram.values @ w >= -1e-9 * (w @ w)


def test_j_gram_requires_two_points():
    with pytest.raises(ValueError):
        j_gram(TransformedDataset([0.5], [1]), UNIT)


def test_degeneracy_monte_carlo_null_mean_is_zero():
    # mean of the pair kernel against a fresh null draw vanishes; the
    # simulator (unit-rate survival, exponential censoring) is the oracle
    from censored_mmd import CensoringSpec, ConstantHazard, sample_dataset, transform
    from censored_mmd.data import NullModel
    from censored_mmd.rng import substream

    dataset = sample_dataset(ConstantHazard(1.0), CensoringSpec(rate=3 / 7), 100_000,
                             substream(2024, "degeneracy-smoke"))
    pairs = transform(dataset, NullModel.exponential(1.0))
    for u0, d0 in [(0.35, 1), (0.8, 0)]:
        vals = j_eval(u0, d0, pairs.u, pairs.delta, UNIT)
        se = vals.std(ddof=1) / math.sqrt(vals.size)
        assert abs(vals.mean()) <= 3.0 * se
