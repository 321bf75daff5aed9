"""Config-driven Monte-Carlo runner producing rejection-rate tables.

An experiment is a grid of cells (alternative hazard x sample size x
censoring choice).  Every cell runs a fixed number of independent
replications; each replication draws a censored dataset, transforms it
under the null model, applies every configured test, and records the
rejections per significance level.  Seeds are derived per (cell,
replication), so cells are independent of one another and results do
not depend on execution order or worker count.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from io import StringIO
from math import sqrt
from typing import Sequence, Union

import numpy as np

from .classical import combined_wlr_test, logrank_test, pearson_test
from .data import Dataset, NullModel, median_heuristic, transform
from .errors import CensoredMMDError
from .kernels import KernelSpec, j_gram
from .mmd import BootstrapScheme, TestOutcome, run_test, run_test_on_gram
from .rng import stream_key, substream
from .simulate import (
    CensoringSpec,
    ConstantHazard,
    HazardModel,
    censoring_label,
    hazard_label,
    parse_censoring,
    parse_hazard,
    resolve_censoring_rate,
    sample_dataset,
    survival_function,
)

MMD_TEST_KINDS = {"MW1": "gaussian", "MW2": "multinomial", "MW3": "rademacher"}
ALL_TESTS = ("MW1", "MW2", "MW3", "Pearson", "LR1", "LR2", "WLR")

THREADS_ENV_VAR = "CENSORED_MMD_THREADS"

Lengthscale = Union[float, str]


def null_model_from_hazard(model: HazardModel) -> NullModel:
    """Null distribution whose CDF comes from a hazard family member."""
    return NullModel(cdf=lambda t: 1.0 - np.asarray(survival_function(model, t), dtype=float),
                     description=hazard_label(model))


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment grid."""

    alternatives: tuple[HazardModel, ...]
    censoring: tuple[CensoringSpec, ...]
    null_model: HazardModel = ConstantHazard(1.0)
    sample_sizes: tuple[int, ...] = (30, 50, 100, 200)
    levels: tuple[float, ...] = (0.01, 0.05, 0.10)
    replications: int = 1000
    n_boot: int = 500
    lengthscale: Lengthscale = 1.0
    tests: tuple[str, ...] = ALL_TESTS
    base_seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.n_boot < 1:
            raise ValueError("n_boot must be at least 1")
        if not self.alternatives or not self.censoring or not self.sample_sizes:
            raise ValueError("alternatives, censoring, and sample_sizes must be nonempty")
        for n in self.sample_sizes:
            if n < 2:
                raise ValueError("sample sizes must be at least 2")
        for alpha in self.levels:
            if not 0 < alpha < 1:
                raise ValueError(f"levels must lie in (0, 1), got {alpha!r}")
        for name in self.tests:
            if name not in ALL_TESTS:
                raise ValueError(f"unknown test {name!r}; choose from {ALL_TESTS}")
        if isinstance(self.lengthscale, str) and self.lengthscale != "median":
            raise ValueError("lengthscale must be a positive number or 'median'")
        if isinstance(self.lengthscale, (int, float)) and not self.lengthscale > 0:
            raise ValueError("lengthscale must be a positive number or 'median'")


@dataclass(frozen=True)
class ResultRow:
    """One table cell: a test's rejection rate at one level."""

    test: str
    model: str
    n: int
    censoring: str
    level: float
    rejection_rate: float
    se: float
    replications: int


def _monte_carlo_se(rate: float, replications: int) -> float:
    return sqrt(rate * (1.0 - rate) / replications)


def _cell_label(model: HazardModel, n: int, censoring: CensoringSpec) -> str:
    return f"{hazard_label(model)}|n={n}|{censoring_label(censoring)}"


def _replication_rejections(cfg: ExperimentConfig, model: HazardModel, n: int,
                            gamma: float, cell: str, rep: int,
                            null_model: NullModel) -> np.ndarray:
    """Boolean rejection matrix (test x level) for one replication."""
    rng = substream(cfg.base_seed, "data", cell, rep)
    dataset = sample_dataset(model, CensoringSpec(rate=gamma), n, rng)
    transformed = transform(dataset, null_model)

    rejections = np.zeros((len(cfg.tests), len(cfg.levels)), dtype=bool)
    levels = np.asarray(cfg.levels)

    mmd_tests = [t for t in cfg.tests if t in MMD_TEST_KINDS]
    if mmd_tests:
        if cfg.lengthscale == "median":
            spec = median_heuristic(transformed)
        else:
            spec = KernelSpec(float(cfg.lengthscale))
        gram = j_gram(transformed, spec)
    for row, name in enumerate(cfg.tests):
        if name in MMD_TEST_KINDS:
            scheme = BootstrapScheme(
                kind=MMD_TEST_KINDS[name],
                n_boot=cfg.n_boot,
                seed=stream_key(cfg.base_seed, "boot", cell, rep, name) & (2 ** 64 - 1),
            )
            outcome = run_test_on_gram(gram, scheme, cfg.levels, spec.lengthscale)
            p_value = outcome.p_value
        elif name == "Pearson":
            p_value = pearson_test(transformed).p_value
        elif name == "LR1":
            p_value = logrank_test(transformed, weight="constant").p_value
        elif name == "LR2":
            p_value = logrank_test(transformed, weight="risk").p_value
        else:
            p_value = combined_wlr_test(transformed).p_value
        rejections[row] = p_value <= levels
    return rejections


def _run_replication_block(cfg: ExperimentConfig, model: HazardModel, n: int,
                           gamma: float, cell: str, lo: int, hi: int) -> np.ndarray:
    null_model = null_model_from_hazard(cfg.null_model)
    counts = np.zeros((len(cfg.tests), len(cfg.levels)), dtype=np.int64)
    for rep in range(lo, hi):
        counts += _replication_rejections(cfg, model, n, gamma, cell, rep, null_model)
    return counts


def _worker_count(replications: int) -> int:
    cap = os.environ.get(THREADS_ENV_VAR)
    workers = os.cpu_count() or 1
    if cap is not None:
        workers = min(workers, max(1, int(cap)))
    return max(1, min(workers, replications))


def _run_cell(cfg: ExperimentConfig, model: HazardModel, n: int,
              censoring: CensoringSpec) -> np.ndarray:
    gamma = resolve_censoring_rate(model, censoring)
    cell = _cell_label(model, n, censoring)
    workers = _worker_count(cfg.replications)
    try:
        if workers == 1:
            return _run_replication_block(cfg, model, n, gamma, cell, 0, cfg.replications)
        bounds = np.linspace(0, cfg.replications, workers + 1, dtype=int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_replication_block, cfg, model, n, gamma, cell,
                            int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            return sum(f.result() for f in futures)
    except CensoredMMDError as exc:
        exc.args = (f"[cell {cell}] {exc}",)
        raise


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run every cell of the grid and return one row per (test, level).

    Deterministic given the config: seeds are derived from
    (base_seed, cell, replication), so adding or removing cells leaves
    all other cells' numbers unchanged.
    """
    rows: list[ResultRow] = []
    for model in cfg.alternatives:
        for n in cfg.sample_sizes:
            for censoring in cfg.censoring:
                counts = _run_cell(cfg, model, n, censoring)
                for row, name in enumerate(cfg.tests):
                    for col, level in enumerate(cfg.levels):
                        rate = counts[row, col] / cfg.replications
                        rows.append(ResultRow(
                            test=name,
                            model=hazard_label(model),
                            n=n,
                            censoring=censoring_label(censoring),
                            level=float(level),
                            rejection_rate=float(rate),
                            se=_monte_carlo_se(float(rate), cfg.replications),
                            replications=cfg.replications,
                        ))
    return rows


TABLE_COLUMNS = ("test", "model", "n", "censoring", "level",
                 "rejection_rate", "se", "replications")
DEFAULT_GROUPING = ("test", "model", "n", "censoring", "level")


def emit_table(rows: Sequence[ResultRow],
               grouping: Sequence[str] = DEFAULT_GROUPING) -> str:
    """Render rows as CSV with a stable column order and sort.

    Rates and their standard errors are printed as percentages with two
    and four decimals respectively, matching the usual table formatting.
    """
    if not rows:
        raise ValueError("no rows to emit")
    for name in grouping:
        if name not in TABLE_COLUMNS:
            raise ValueError(f"unknown grouping column {name!r}")
    ordered = sorted(rows, key=lambda r: tuple(getattr(r, g) for g in grouping))
    out = StringIO()
    out.write(",".join(TABLE_COLUMNS) + "\n")
    for r in ordered:
        out.write(
            f"{r.test},{r.model},{r.n},{r.censoring},{r.level:g},"
            f"{100.0 * r.rejection_rate:.2f},{100.0 * r.se:.4f},{r.replications}\n"
        )
    return out.getvalue()


def parse_table(text: str) -> list[ResultRow]:
    """Inverse of :func:`emit_table`.

    The rejection count is recovered exactly from the printed
    percentage (valid while replications <= 10000), and the standard
    error is recomputed from the rate, so a parse/emit round trip is
    lossless.
    """
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != ",".join(TABLE_COLUMNS):
        raise ValueError("unrecognised table header")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(TABLE_COLUMNS):
            raise ValueError(f"malformed row: {line!r}")
        test, model, n, censoring, level, pct, _se_pct, reps = parts
        replications = int(reps)
        count = round(float(pct) / 100.0 * replications)
        rate = count / replications
        rows.append(ResultRow(
            test=test, model=model, n=int(n), censoring=censoring,
            level=float(level), rejection_rate=rate,
            se=_monte_carlo_se(rate, replications), replications=replications,
        ))
    return rows


def parse_lengthscale(value) -> Lengthscale:
    """Accept 'median', 'fixed:<l>', or a bare number."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower()
    if text == "median":
        return "median"
    if text.startswith("fixed:"):
        return float(text.split(":", 1)[1])
    return float(text)


def config_from_mapping(obj: dict) -> ExperimentConfig:
    """Build a config from the JSON file schema (labels for models)."""
    known = {
        "alternatives", "censoring", "null_model", "sample_sizes", "levels",
        "replications", "n_boot", "lengthscale", "tests", "base_seed",
    }
    unknown = set(obj) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    if "alternatives" in obj:
        kwargs["alternatives"] = tuple(parse_hazard(a) for a in obj["alternatives"])
    if "censoring" in obj:
        kwargs["censoring"] = tuple(parse_censoring(c) for c in obj["censoring"])
    if "null_model" in obj:
        kwargs["null_model"] = parse_hazard(obj["null_model"])
    if "sample_sizes" in obj:
        kwargs["sample_sizes"] = tuple(int(n) for n in obj["sample_sizes"])
    if "levels" in obj:
        kwargs["levels"] = tuple(float(a) for a in obj["levels"])
    if "replications" in obj:
        kwargs["replications"] = int(obj["replications"])
    if "n_boot" in obj:
        kwargs["n_boot"] = int(obj["n_boot"])
    if "lengthscale" in obj:
        kwargs["lengthscale"] = parse_lengthscale(obj["lengthscale"])
    if "tests" in obj:
        kwargs["tests"] = tuple(obj["tests"])
    if "base_seed" in obj:
        kwargs["base_seed"] = int(obj["base_seed"])
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return config_from_mapping(json.load(fh))


def run_single_test(dataset: Dataset, null_model: NullModel, test_name: str, *,
                    levels: Sequence[float] = (0.05,), n_boot: int = 500,
                    seed: int = 0, lengthscale: Lengthscale = 1.0):
    """Apply one named test to a dataset; returns the test outcome object."""
    transformed = transform(dataset, null_model)
    if test_name in MMD_TEST_KINDS:
        kernel = "median" if lengthscale == "median" else KernelSpec(float(lengthscale))
        scheme = BootstrapScheme(kind=MMD_TEST_KINDS[test_name], n_boot=n_boot, seed=seed)
        return run_test(transformed, kernel, scheme, levels)
    if test_name == "Pearson":
        return pearson_test(transformed)
    if test_name == "LR1":
        return logrank_test(transformed, weight="constant")
    if test_name == "LR2":
        return logrank_test(transformed, weight="risk")
    if test_name == "WLR":
        return combined_wlr_test(transformed)
    raise ValueError(f"unknown test {test_name!r}; choose from {ALL_TESTS}")
