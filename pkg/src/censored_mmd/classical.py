"""Classical goodness-of-fit competitors on the transformed scale.

All four tests consume transformed data, where the null cumulative
hazard is -log(1 - u): a chi-square test on observed-versus-expected
event counts in fixed cells, one-sample log-rank tests with constant
and risk-set weights, and a combined test that stacks several weighted
log-rank statistics into one quadratic form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import chi2, norm

from .data import TransformedDataset, _product_limit_weights, transform_cumhaz
from .errors import EmptyCellError, ZeroVarianceError


@dataclass(frozen=True)
class WeightFn:
    """Named weight function on [0, 1] for weighted log-rank statistics."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))


CONSTANT_WEIGHT = WeightFn("constant", lambda t: np.ones_like(t))
EARLY_WEIGHT = WeightFn("early", lambda t: t * (1.0 - t) ** 3)
CENTRAL_WEIGHT = WeightFn("central", lambda t: (1.0 - t) * t)
CROSSING_WEIGHT = WeightFn("crossing", lambda t: 1.0 - 2.0 * t)

DEFAULT_WEIGHT_FNS = (CONSTANT_WEIGHT, EARLY_WEIGHT, CENTRAL_WEIGHT, CROSSING_WEIGHT)


@dataclass(frozen=True)
class ChiSquareOutcome:
    statistic: float
    dof: int
    p_value: float


@dataclass(frozen=True)
class NormalOutcome:
    statistic: float
    p_value: float


@dataclass(frozen=True, eq=False)
class PearsonCells:
    """Cell partition of [0, 1) with observed and expected event counts."""

    k: int
    boundaries: np.ndarray
    observed: np.ndarray
    expected: np.ndarray


def _risk_segments(u: np.ndarray, extra_breaks: np.ndarray | None = None):
    """Piecewise-constant decomposition of the at-risk process.

    Returns breakpoints s_0 < ... < s_m (starting at 0, ending at the
    largest observation), the risk count on each segment (s_i, s_{i+1}],
    and the null cumulative-hazard increment over each segment.
    """
    pieces = [np.zeros(1), u]
    if extra_breaks is not None:
        pieces.append(extra_breaks)
    breaks = np.unique(np.concatenate(pieces))
    n = u.shape[0]
    at_risk = n - np.searchsorted(np.sort(u), breaks[:-1], side="right")
    haz_inc = np.diff(transform_cumhaz(breaks))
    return breaks, at_risk, haz_inc


def pearson_cells(data: TransformedDataset, k: int = 4) -> PearsonCells:
    """Observed uncensored counts and expected masses in k equal cells.

    The expected mass of a cell is the integral of the empirical
    survival of the observed minima against the null cumulative hazard,
    taken exactly over the segments where that survival is constant.
    """
    if k < 1:
        raise ValueError("need at least one cell")
    n = len(data)
    u = data.u
    boundaries = np.arange(k + 1) / k
    cell_of_event = np.minimum((u[data.delta == 1] * k).astype(int), k - 1)
    observed = np.bincount(cell_of_event, minlength=k)
    breaks, at_risk, haz_inc = _risk_segments(u, boundaries[1:-1])
    cell_of_segment = np.minimum((breaks[:-1] * k).astype(int), k - 1)
    expected = np.zeros(k)
    np.add.at(expected, cell_of_segment, at_risk / n * haz_inc)
    return PearsonCells(k=k, boundaries=boundaries, observed=observed, expected=expected)


def pearson_test(data: TransformedDataset, k: int = 4) -> ChiSquareOutcome:
    """Chi-square test on observed minus expected uncensored counts.

    Raises :class:`EmptyCellError` when a cell has zero expected mass,
    which happens when no observation reaches it.
    """
    cells = pearson_cells(data, k)
    n = len(data)
    zero = np.flatnonzero(cells.expected == 0)
    if zero.size:
        raise EmptyCellError(int(zero[0]))
    stat = float(((cells.observed - n * cells.expected) ** 2 / (n * cells.expected)).sum())
    return ChiSquareOutcome(statistic=stat, dof=k, p_value=float(chi2.sf(stat, k)))


def logrank_test(data: TransformedDataset, weight: str = "constant") -> NormalOutcome:
    """One-sample log-rank test of events against the null hazard.

    weight="constant" compares the event count with the integrated
    at-risk hazard; weight="risk" weights by the at-risk count, the
    variant that emphasises early departures.  The statistic is the
    centred sum over its counting-process standard deviation, with a
    two-sided normal p-value.
    """
    u = data.u
    delta = data.delta
    n = len(data)
    if weight == "constant":
        cumhaz = transform_cumhaz(u)
        variance = float(cumhaz.sum())
        centred = float(delta.sum()) - float(cumhaz.sum())
    elif weight == "risk":
        _, at_risk, haz_inc = _risk_segments(u)
        risk_at_obs = n - np.searchsorted(np.sort(u), u, side="left")
        centred = float(risk_at_obs[delta == 1].sum()) \
            - float((at_risk.astype(float) ** 2 * haz_inc).sum())
        variance = float((at_risk.astype(float) ** 3 * haz_inc).sum())
    else:
        raise ValueError(f"unknown log-rank weight {weight!r}")
    if variance <= 0:
        raise ZeroVarianceError("log-rank variance estimate is zero")
    stat = centred / np.sqrt(variance)
    return NormalOutcome(statistic=float(stat), p_value=float(2.0 * norm.sf(abs(stat))))


def combined_wlr_test(data: TransformedDataset,
                      weights: Sequence[WeightFn] = DEFAULT_WEIGHT_FNS) -> ChiSquareOutcome:
    """Several weighted log-rank statistics combined into one quadratic form.

    Each weight function is evaluated at the left limit of the
    product-limit estimate (a predictable integrand), the vector of
    centred statistics is whitened by the pseudo-inverse of its
    plug-in covariance, and the result is referred to a chi-square with
    the covariance's numerical rank as degrees of freedom.
    """
    if not weights:
        raise ValueError("need at least one weight function")
    u = data.u
    delta = data.delta
    n = len(data)
    breaks, at_risk, haz_inc = _risk_segments(u)

    t_sorted, pl_weights = _product_limit_weights(u, data.delta.astype(bool))
    distinct, start = np.unique(t_sorted, return_index=True)
    km_after = np.cumsum(np.add.reduceat(pl_weights, start))
    # product-limit left limits: on segment (s_i, s_{i+1}] and at s_{i+1} itself
    km_left_seg = np.concatenate(([0.0], km_after))[
        np.searchsorted(distinct, breaks[:-1], side="right")
    ]
    km_left_obs = np.concatenate(([0.0], km_after))[
        np.searchsorted(distinct, u, side="left")
    ]

    k = len(weights)
    centred = np.empty(k)
    seg_values = np.empty((k, breaks.shape[0] - 1))
    event_mask = delta == 1
    for j, w in enumerate(weights):
        seg_values[j] = w(km_left_seg)
        centred[j] = float(w(km_left_obs[event_mask]).sum()) \
            - float((seg_values[j] * at_risk * haz_inc).sum())
    weighted_inc = at_risk * haz_inc
    covariance = (seg_values * weighted_inc) @ seg_values.T

    eigvals, eigvecs = np.linalg.eigh(covariance)
    lam_max = float(eigvals[-1]) if eigvals.size else 0.0
    if lam_max <= 0:
        raise ZeroVarianceError("covariance of the combined statistic is numerically zero")
    keep = eigvals > 1e-10 * lam_max
    dof = int(np.count_nonzero(keep))
    inv_vals = np.where(keep, 1.0 / np.where(keep, eigvals, 1.0), 0.0)
    rotated = eigvecs.T @ centred
    stat = float((rotated * inv_vals * rotated).sum())
    return ChiSquareOutcome(statistic=stat, dof=dof, p_value=float(chi2.sf(stat, dof)))
