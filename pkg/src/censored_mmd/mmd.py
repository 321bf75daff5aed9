"""Kernel discrepancy test between transformed data and the uniform law.

The observed statistic is the full quadratic form of the pair-kernel
matrix (diagonal included); its null distribution is approximated by a
wild bootstrap that reweights the same matrix with i.i.d. zero-mean,
unit-variance multipliers.  Because the pair kernel has zero conditional
expectation under the null, the reweighted form shares the statistic's
limiting law, so bootstrap quantiles calibrate the test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Mapping, Sequence, Union

import numpy as np

from .data import TransformedDataset, median_heuristic
from .errors import DimensionMismatchError
from .kernels import JGram, KernelSpec, j_gram
from .rng import substream

WeightKind = Literal["gaussian", "multinomial", "rademacher"]


@dataclass(frozen=True)
class BootstrapScheme:
    """Wild-bootstrap multiplier law, resample count, and seed."""

    kind: WeightKind
    n_boot: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian", "multinomial", "rademacher"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.n_boot < 1:
            raise ValueError("n_boot must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class TestOutcome:
    """Result of one test run.

    `statistic` is the full quadratic form (the value the bootstrap is
    compared against); `u_statistic` is the unbiased off-diagonal
    variant, reported alongside.
    """

    __test__ = False  # not a pytest class, despite the name

    statistic: float
    u_statistic: float
    p_value: float
    n_boot: int
    lengthscale_used: float
    reject: Mapping[float, bool]


def _quadratic_form(gram: JGram, w: np.ndarray) -> float:
    return float(w @ gram.values @ w) / (gram.n * gram.n)


def v_statistic(gram: JGram) -> float:
    """Mean of all n^2 pair-kernel values (diagonal included).

    Computed as the unit-weight quadratic form, so it agrees bit for bit
    with :func:`bootstrap_statistic` at weights identically one.
    """
    return _quadratic_form(gram, np.ones(gram.n))


def u_statistic(gram: JGram) -> float:
    """Mean of the off-diagonal pair-kernel values: the unbiased variant."""
    n = gram.n
    iu, ju = np.triu_indices(n, k=1)
    return 2.0 * float(gram.values[iu, ju].sum()) / (n * (n - 1))


def draw_weights(scheme: BootstrapScheme, n: int, rng: np.random.Generator) -> np.ndarray:
    """One vector of n bootstrap multipliers from the scheme's law.

    gaussian: i.i.d. standard normal.  rademacher: i.i.d. +/-1.
    multinomial: cell counts of n balls in n equiprobable cells, each
    minus one, so the vector sums to zero exactly.
    """
    return _weight_matrix(scheme, n, 1, rng)[0]


def _weight_matrix(scheme: BootstrapScheme, n: int, rows: int,
                   rng: np.random.Generator) -> np.ndarray:
    if scheme.kind == "gaussian":
        return rng.standard_normal((rows, n))
    if scheme.kind == "rademacher":
        return rng.integers(0, 2, size=(rows, n)).astype(float) * 2.0 - 1.0
    return rng.multinomial(n, np.full(n, 1.0 / n), size=rows).astype(float) - 1.0


def bootstrap_statistic(gram: JGram, w: np.ndarray) -> float:
    """Reweighted quadratic form (1/n^2) sum_ij w_i w_j values_ij."""
    w = np.asarray(w, dtype=float)
    if w.shape != (gram.n,):
        raise DimensionMismatchError(
            f"weight vector has shape {w.shape}, expected ({gram.n},)"
        )
    return _quadratic_form(gram, w)


def _bootstrap_sample(gram: JGram, scheme: BootstrapScheme) -> np.ndarray:
    """All n_boot reweighted statistics, drawn from the scheme's stream."""
    n = gram.n
    rng = substream(scheme.seed)
    w = _weight_matrix(scheme, n, scheme.n_boot, rng)
    return np.einsum("bi,bi->b", w @ gram.values, w) / (n * n)


def run_test_on_gram(gram: JGram, scheme: BootstrapScheme,
                     levels: Sequence[float], lengthscale: float) -> TestOutcome:
    """Run the bootstrap test on a precomputed pair-kernel matrix."""
    for alpha in levels:
        if not 0 < alpha < 1:
            raise ValueError(f"levels must lie in (0, 1), got {alpha!r}")
    stat = v_statistic(gram)
    boots = _bootstrap_sample(gram, scheme)
    exceed = int(np.count_nonzero(boots >= stat))
    p_value = (1 + exceed) / (scheme.n_boot + 1)
    return TestOutcome(
        statistic=stat,
        u_statistic=u_statistic(gram),
        p_value=p_value,
        n_boot=scheme.n_boot,
        lengthscale_used=lengthscale,
        reject={float(alpha): p_value <= alpha for alpha in levels},
    )


def run_test(data: TransformedDataset,
             kernel: Union[KernelSpec, Literal["median"]],
             scheme: BootstrapScheme,
             levels: Sequence[float] = (0.01, 0.05, 0.10)) -> TestOutcome:
    """Full test: build the pair-kernel matrix once, then calibrate.

    The p-value is (1 + #{bootstrap >= observed}) / (n_boot + 1), which
    is valid in finite samples for exchangeable resamples.  The whole
    outcome is a deterministic function of (data, kernel, scheme,
    levels).
    """
    if len(data) < 2:
        raise ValueError("need at least 2 observations")
    spec = median_heuristic(data) if kernel == "median" else kernel
    gram = j_gram(data, spec)
    return run_test_on_gram(gram, scheme, levels, spec.lengthscale)
