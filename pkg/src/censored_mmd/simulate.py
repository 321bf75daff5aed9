"""Synthetic right-censored data from parametric hazard families.

Survival times are drawn by inverting the cumulative hazard at a unit
exponential draw.  Censoring times are exponential with rate ``gamma``,
given either directly or calibrated so a target fraction of
observations is censored in expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .data import Dataset
from .errors import NoSolutionError, RootNotBracketedError


@dataclass(frozen=True)
class ConstantHazard:
    """Exponential survival times: hazard identically `rate`."""

    rate: float

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be positive, got {self.rate!r}")


@dataclass(frozen=True)
class PeriodicHazard:
    """Oscillating hazard 1 - amplitude * cos(frequency * pi * t).

    Requires amplitude <= 1 so the hazard stays nonnegative; at
    amplitude exactly 1 it touches zero at isolated points only, which
    keeps the cumulative hazard strictly increasing and invertible.
    """

    frequency: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise ValueError(f"frequency must be positive, got {self.frequency!r}")
        if not (0 <= self.amplitude <= 1):
            raise ValueError(f"amplitude must lie in [0, 1], got {self.amplitude!r}")


@dataclass(frozen=True)
class WeibullHazard:
    """Weibull hazard (shape/scale) * (t/scale)^(shape-1).

    Shape 1 recovers the constant-hazard exponential; shape below 1
    gives a decreasing risk, above 1 an increasing one.
    """

    shape: float
    scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.shape) and self.shape > 0):
            raise ValueError(f"shape must be positive, got {self.shape!r}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"scale must be positive, got {self.scale!r}")


HazardModel = Union[ConstantHazard, PeriodicHazard, WeibullHazard]


@dataclass(frozen=True)
class CensoringSpec:
    """Exponential censoring, fixed by rate or by target censored fraction."""

    rate: float | None = None
    target_fraction: float | None = None

    def __post_init__(self):
        if (self.rate is None) == (self.target_fraction is None):
            raise ValueError("specify exactly one of rate or target_fraction")
        if self.rate is not None and not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be positive, got {self.rate!r}")
        if self.target_fraction is not None and not 0 < self.target_fraction < 1:
            raise ValueError(
                f"target_fraction must lie in (0, 1), got {self.target_fraction!r}"
            )


def hazard_rate(model: HazardModel, t):
    """Instantaneous event rate at time `t`; broadcasts."""
    t = np.asarray(t, dtype=float)
    if isinstance(model, ConstantHazard):
        return np.broadcast_to(model.rate, t.shape).copy() if t.ndim else float(model.rate)
    if isinstance(model, PeriodicHazard):
        out = 1.0 - model.amplitude * np.cos(model.frequency * np.pi * t)
        return float(out) if out.ndim == 0 else out
    if isinstance(model, WeibullHazard):
        out = model.shape / model.scale * (t / model.scale) ** (model.shape - 1.0)
        return float(out) if out.ndim == 0 else out
    raise TypeError(f"unknown hazard model {model!r}")


def cumulative_hazard(model: HazardModel, t):
    """Integrated hazard from 0 to `t`; broadcasts."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be nonnegative")
    if isinstance(model, ConstantHazard):
        out = model.rate * t
    elif isinstance(model, PeriodicHazard):
        w = model.frequency * np.pi
        out = t - model.amplitude * np.sin(w * t) / w
    elif isinstance(model, WeibullHazard):
        out = (t / model.scale) ** model.shape
    else:
        raise TypeError(f"unknown hazard model {model!r}")
    return float(out) if out.ndim == 0 else out


def survival_function(model: HazardModel, t):
    """P(X > t) = exp(-cumulative hazard)."""
    return np.exp(-np.asarray(cumulative_hazard(model, t), dtype=float))


def invert_cumulative_hazard(model: HazardModel, e: float) -> float:
    """Solve cumulative_hazard(t) = e for t >= 0.

    Constant and Weibull hazards invert in closed form.  The periodic
    family is solved by a bracketed root-finder: the bracket starts at
    [e/2, 2e + 2] and is expanded until it straddles the root, which is
    guaranteed since the cumulative hazard stays within
    amplitude/(frequency*pi) of the identity line.
    """
    if e < 0:
        raise ValueError("exponential draw must be nonnegative")
    if e == 0.0:
        return 0.0
    if isinstance(model, ConstantHazard):
        return e / model.rate
    if isinstance(model, WeibullHazard):
        return model.scale * e ** (1.0 / model.shape)
    if isinstance(model, PeriodicHazard):
        lo, hi = e / 2.0, 2.0 * e + 2.0
        for _ in range(200):
            if cumulative_hazard(model, lo) <= e:
                break
            lo /= 2.0
        else:
            lo = 0.0
        for _ in range(200):
            if cumulative_hazard(model, hi) >= e:
                break
            hi = 2.0 * hi + 2.0
        else:
            raise RootNotBracketedError(f"no upper bracket for draw {e!r}")
        if not (cumulative_hazard(model, lo) <= e <= cumulative_hazard(model, hi)):
            raise RootNotBracketedError(f"bracket failed to straddle draw {e!r}")
        return float(brentq(lambda t: cumulative_hazard(model, t) - e, lo, hi,
                            xtol=1e-10, rtol=8.9e-16))
    raise TypeError(f"unknown hazard model {model!r}")


def sample_survival(model: HazardModel, rng: np.random.Generator) -> float:
    """Draw one survival time by inverse-cumulative-hazard sampling."""
    return invert_cumulative_hazard(model, float(rng.standard_exponential()))


def _sample_survival_block(model: HazardModel, rng: np.random.Generator, n: int) -> np.ndarray:
    e = rng.standard_exponential(n)
    if isinstance(model, ConstantHazard):
        return e / model.rate
    if isinstance(model, WeibullHazard):
        return model.scale * e ** (1.0 / model.shape)
    return np.array([invert_cumulative_hazard(model, float(v)) for v in e])


def censored_fraction(model: HazardModel, gamma: float) -> float:
    """P(censored) when censoring is exponential with rate `gamma`.

    Evaluates integral of S_X(t) * gamma * exp(-gamma t) dt by adaptive
    quadrature.  The range is truncated where the smaller of the two
    exponential tails drops below e^-30 (~1e-13), and the two
    characteristic scales are passed as breakpoints so that extreme
    rate ratios keep their boundary layers resolved.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")

    def integrand(t):
        return survival_function(model, t) * gamma * math.exp(-gamma * t)

    upper = min(30.0 / gamma, invert_cumulative_hazard(model, 30.0))
    scales = sorted({s for s in (1.0 / gamma, invert_cumulative_hazard(model, 1.0))
                     if 0.0 < s < upper})
    value, _ = quad(integrand, 0.0, upper, points=scales or None,
                    epsabs=1e-12, epsrel=1e-10, limit=200)
    return float(value)


@lru_cache(maxsize=None)
def calibrate_censoring(model: HazardModel, target: float) -> float:
    """Censoring rate gamma giving the requested expected censored fraction.

    Solves censored_fraction(model, gamma) = target by bracketed
    root-finding on gamma in [1e-6, 1e6], to |fraction - target| <= 1e-6.
    Raises :class:`NoSolutionError` when the target lies outside the
    fractions achievable on that bracket.
    """
    if not 0 < target < 1:
        raise ValueError(f"target fraction must lie in (0, 1), got {target!r}")
    lo, hi = 1e-6, 1e6
    f_lo = censored_fraction(model, lo) - target
    f_hi = censored_fraction(model, hi) - target
    if f_lo > 0 or f_hi < 0:
        raise NoSolutionError(
            f"target fraction {target} unreachable for {model!r} with gamma in [{lo}, {hi}]"
        )
    gamma = float(brentq(lambda g: censored_fraction(model, g) - target, lo, hi,
                         xtol=1e-12, rtol=8.9e-16))
    if abs(censored_fraction(model, gamma) - target) > 1e-6:
        raise NoSolutionError(f"calibration did not converge for {model!r}")
    return gamma


def resolve_censoring_rate(model: HazardModel, censoring: CensoringSpec) -> float:
    """Concrete exponential censoring rate for a model/censoring pair."""
    if censoring.rate is not None:
        return censoring.rate
    return calibrate_censoring(model, censoring.target_fraction)


def sample_dataset(model: HazardModel, censoring: CensoringSpec, n: int,
                   rng: np.random.Generator) -> Dataset:
    """Draw `n` independent censored observations.

    Each pair is the minimum of a survival draw from `model` and an
    exponential censoring draw, with the event flag marking which one
    was smaller.  Fully determined by the generator state.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    gamma = resolve_censoring_rate(model, censoring)
    x = _sample_survival_block(model, rng, n)
    c = rng.standard_exponential(n) / gamma
    return Dataset(np.minimum(x, c), x <= c)


def parse_hazard(label: str) -> HazardModel:
    """Parse a hazard label: constant:RATE | periodic:FREQ,AMP | weibull:SHAPE,SCALE.

    `exponential` is accepted as an alias of `constant`.
    """
    name, _, arg_text = label.partition(":")
    name = name.strip().lower()
    try:
        args = [float(a) for a in arg_text.split(",")] if arg_text.strip() else []
    except ValueError:
        raise ValueError(f"invalid hazard parameters in {label!r}") from None
    if name in ("constant", "exponential"):
        return ConstantHazard(*(args or [1.0]))
    if name == "periodic":
        return PeriodicHazard(*args)
    if name == "weibull":
        return WeibullHazard(*args)
    raise ValueError(f"unknown hazard family {name!r}")


def hazard_label(model: HazardModel) -> str:
    """Inverse of :func:`parse_hazard`."""
    if isinstance(model, ConstantHazard):
        return f"constant:{model.rate:g}"
    if isinstance(model, PeriodicHazard):
        return f"periodic:{model.frequency:g},{model.amplitude:g}"
    if isinstance(model, WeibullHazard):
        return f"weibull:{model.shape:g},{model.scale:g}"
    raise TypeError(f"unknown hazard model {model!r}")


def parse_censoring(label: str) -> CensoringSpec:
    """Parse a censoring label: rate:GAMMA | target:FRACTION."""
    name, _, arg_text = label.partition(":")
    name = name.strip().lower()
    try:
        value = float(arg_text)
    except ValueError:
        raise ValueError(f"invalid censoring parameter in {label!r}") from None
    if name == "rate":
        return CensoringSpec(rate=value)
    if name == "target":
        return CensoringSpec(target_fraction=value)
    raise ValueError(f"unknown censoring mode {name!r}")


def censoring_label(spec: CensoringSpec) -> str:
    """Inverse of :func:`parse_censoring`."""
    if spec.rate is not None:
        return f"rate:{spec.rate:g}"
    return f"target:{spec.target_fraction:g}"
