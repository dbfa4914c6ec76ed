"""Config-driven benchmark harness: grid search, budget accounting, emission.

The harness reads a flat key-value config file, runs every configured
algorithm over its hyper-parameter grid for every seed under a fixed per-chain
gradient budget, scores each run by marginal-histogram TV distance against a
cached reference ensemble, and emits a canonical CSV of per-run rows plus a
JSON summary with the best grid point per algorithm. The whole pipeline is a
pure function of the config file bytes: identical configs produce byte-identical
CSV data columns and summaries (the wall-clock column is the one exception,
and is excluded from that guarantee).

Config grammar
--------------
One ``key = value`` pair per line. ``#`` starts a comment anywhere on a line;
blank lines are ignored. Keys are dotted lowercase names from the schema below;
unknown or duplicate keys are errors. List values are comma-separated. Schema
(defaults in parentheses; "required*" = required when the relevant algorithm
is configured)::

    algorithms            list of {sps-sgld, sps-mala, sgld}   required
    seeds                 int list                             required
    budget                int, per-chain gradient budget       (12000)
    n_chains              int                                  (10000)
    target.dim            int                                  required
    target.components     int                                  (100)
    target.seed           int                                  (0)
    sps.tau               float list — inner step grid         required*
    sps.steps             int list — inner step-count grid S   required*
    sps.eta               float list — proximal step grid      required*
    sps.outer_batch       int or "full"                        (full)
    sps.inner_batch       int, SGLD-inner minibatch size       (1)
    sgld.step             float list — baseline step grid h    required*
    sgld.batch            int, baseline minibatch size         (1)
    mala.warm_steps       int, warm-start steps                (1)
    mala.warm_gamma       float, warm-start friction           (sqrt(6 L))
    mala.warm_tau         float, warm-start step               (1/sqrt(2 L d))
    hist.bins             int, histogram bins per coordinate   (100)
    hist.padding          float, joint-range padding fraction  (0.05)
    reference.budget      int, total reference-sampler steps   (1000000)
    reference.chains      int                                  (5000)
    reference.burn_in     int                                  (150)
    reference.thin        int                                  (2)
    reference.min_particles  int                               (100000)
    reference.step        float, reference MALA step size      (0.25)
    reference.seed        int                                  (0)
    out.csv               output path for result rows          (rows.csv)
    out.summary           output path for the JSON summary     (summary.json)

Algorithm mapping
-----------------
``sgld``: vanilla SGLD for T = budget // sgld.batch steps at each h.
``sps-sgld``: proximal sampler with the two-phase SGLD inner sampler; each grid
point (tau, S, eta) runs K = budget // (S * sps.inner_batch) outer iterations
with tau' = tau and switch index S - 2, i.e. a single-phase chain returning the
final pre-drift iterate. ``sps-mala``: proximal sampler with ULD-warm-started
MALA; (tau, S) are the MALA step size and step count, and K divides the budget
by (warm_steps + 2 S) * |outer batch|. Reported gradient counts never exceed
the budget. Mixture-target runs with unit inner batches and full-pool outer
batches execute on the compiled fast path (:mod:`proxsamp.engine`); everything
else uses the reference implementations.

CSV schema (fixed): ``algorithm,d,tau,S,eta,h,seed,grads_used,tv_aggregate,
tv_min,tv_median,tv_max,wall_s`` — hyper-parameter columns that do not apply
to an algorithm are blank; rows are sorted by (algorithm, tau, S, eta, h,
seed). Numbers use ``%.10g`` except wall_s (``%.3f``).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np

from .baselines import vanilla_sgld
from .engine import preload_sgld, preload_sps, run_sgld_fast, run_sps_sgld_fast
from .inner import MalaInnerConfig, SgldInnerConfig, UldInnerConfig
from .metrics import HistogramSpec, tv_marginal_estimate
from .outer import OuterConfig, sps_run
from .reference import ReferenceResult, reference_ensemble
from .targets import MixtureExperimentTarget

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ResultRow",
    "CSV_HEADER",
    "PLOT_CSV_HEADER",
    "parse_config_text",
    "parse_config_file",
    "run_experiment",
    "format_rows_csv",
    "parse_rows_csv",
    "emit_plot_data",
    "build_summary",
]

VALID_ALGORITHMS = ("sgld", "sps-mala", "sps-sgld")

CSV_HEADER = "algorithm,d,tau,S,eta,h,seed,grads_used,tv_aggregate,tv_min,tv_median,tv_max,wall_s"
PLOT_CSV_HEADER = "algorithm,x,mean_tv,stderr"


class ConfigError(ValueError):
    """A config file failed to parse or validate; the message names the key."""


@dataclass(frozen=True)
class ResultRow:
    """One benchmark run: a (algorithm, grid point, seed) cell.

    Hyper-parameter fields that do not apply to the algorithm are ``None``
    (SGLD rows have only ``h``; SPS rows have tau/s_total/eta).
    """

    algorithm: str
    dim: int
    tau: float | None
    s_total: int | None
    eta: float | None
    h: float | None
    seed: int
    grads_used: int
    tv_aggregate: float
    tv_min: float
    tv_median: float
    tv_max: float
    wall_s: float


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated benchmark definition (see the module docstring for the file grammar)."""

    algorithms: tuple[str, ...]
    seeds: tuple[int, ...]
    budget: int
    n_chains: int
    target_dim: int
    target_components: int
    target_seed: int
    sps_tau: tuple[float, ...]
    sps_steps: tuple[int, ...]
    sps_eta: tuple[float, ...]
    sps_outer_batch: int | None
    sps_inner_batch: int
    sgld_step: tuple[float, ...]
    sgld_batch: int
    mala_warm_steps: int
    mala_warm_gamma: float | None
    mala_warm_tau: float | None
    hist_bins: int
    hist_padding: float
    reference_budget: int
    reference_chains: int
    reference_burn_in: int
    reference_thin: int
    reference_min_particles: int
    reference_step: float
    reference_seed: int
    out_csv: str
    out_summary: str

    def histogram_spec(self) -> HistogramSpec:
        return HistogramSpec(n_bins=self.hist_bins, padding=self.hist_padding)

    def make_target(self) -> MixtureExperimentTarget:
        return MixtureExperimentTarget(
            dim=self.target_dim,
            n_components=self.target_components,
            seed=self.target_seed,
        )


# (config key, attribute, kind, default); _REQUIRED marks keys without defaults.
_REQUIRED = object()
_SCHEMA: tuple[tuple[str, str, str, object], ...] = (
    ("algorithms", "algorithms", "str_list", _REQUIRED),
    ("seeds", "seeds", "int_list", _REQUIRED),
    ("budget", "budget", "int", 12000),
    ("n_chains", "n_chains", "int", 10000),
    ("target.dim", "target_dim", "int", _REQUIRED),
    ("target.components", "target_components", "int", 100),
    ("target.seed", "target_seed", "int", 0),
    ("sps.tau", "sps_tau", "float_list", ()),
    ("sps.steps", "sps_steps", "int_list", ()),
    ("sps.eta", "sps_eta", "float_list", ()),
    ("sps.outer_batch", "sps_outer_batch", "int_or_full", None),
    ("sps.inner_batch", "sps_inner_batch", "int", 1),
    ("sgld.step", "sgld_step", "float_list", ()),
    ("sgld.batch", "sgld_batch", "int", 1),
    ("mala.warm_steps", "mala_warm_steps", "int", 1),
    ("mala.warm_gamma", "mala_warm_gamma", "opt_float", None),
    ("mala.warm_tau", "mala_warm_tau", "opt_float", None),
    ("hist.bins", "hist_bins", "int", 100),
    ("hist.padding", "hist_padding", "float", 0.05),
    ("reference.budget", "reference_budget", "int", 1_000_000),
    ("reference.chains", "reference_chains", "int", 5000),
    ("reference.burn_in", "reference_burn_in", "int", 150),
    ("reference.thin", "reference_thin", "int", 2),
    ("reference.min_particles", "reference_min_particles", "int", 100_000),
    ("reference.step", "reference_step", "float", 0.25),
    ("reference.seed", "reference_seed", "int", 0),
    ("out.csv", "out_csv", "str", "rows.csv"),
    ("out.summary", "out_summary", "str", "summary.json"),
)


def _parse_scalar(key: str, text: str, kind: str):
    try:
        if kind == "int":
            return int(text)
        if kind in ("float", "opt_float"):
            return float(text)
        if kind == "str":
            return text
        if kind == "int_or_full":
            return None if text == "full" else int(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind.replace('opt_', '')}") from None
    raise AssertionError(f"unknown kind {kind}")


def _parse_value(key: str, text: str, kind: str):
    if kind.endswith("_list"):
        parts = [p.strip() for p in text.split(",")]
        if parts == [""]:
            raise ConfigError(f"{key}: empty list")
        scalar = kind[: -len("_list")]
        return tuple(_parse_scalar(key, p, scalar) for p in parts)
    return _parse_scalar(key, text, kind)


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse and validate a config from its text (see module docstring grammar).

    Raises:
        ConfigError: Naming the offending key (or line) on any problem.
    """
    items: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in items:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        items[key] = value

    known = {key for key, _, _, _ in _SCHEMA}
    for key in items:
        if key not in known:
            raise ConfigError(f"{key}: unknown key")

    fields = {}
    for key, attr, kind, default in _SCHEMA:
        if key in items:
            fields[attr] = _parse_value(key, items[key], kind)
        elif default is _REQUIRED:
            raise ConfigError(f"{key}: required key missing")
        else:
            fields[attr] = default
    config = ExperimentConfig(**fields)
    _validate(config)
    return config


def parse_config_file(path: str | Path) -> ExperimentConfig:
    """Parse and validate the config file at ``path``."""
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def _validate(c: ExperimentConfig) -> None:
    def need(cond: bool, key: str, msg: str) -> None:
        if not cond:
            raise ConfigError(f"{key}: {msg}")

    need(len(c.algorithms) > 0, "algorithms", "need at least one algorithm")
    need(len(set(c.algorithms)) == len(c.algorithms), "algorithms", "duplicate algorithm")
    for alg in c.algorithms:
        need(alg in VALID_ALGORITHMS, "algorithms", f"unknown algorithm {alg!r} (valid: {', '.join(VALID_ALGORITHMS)})")
    need(len(c.seeds) > 0, "seeds", "need at least one seed")
    need(len(set(c.seeds)) == len(c.seeds), "seeds", "duplicate seed")
    need(c.budget >= 1, "budget", "must be >= 1")
    need(c.n_chains >= 1, "n_chains", "must be >= 1")
    need(c.target_dim >= 1, "target.dim", "must be >= 1")
    need(c.target_components >= 1, "target.components", "must be >= 1")
    need(c.sps_inner_batch >= 1, "sps.inner_batch", "must be >= 1")
    need(c.sgld_batch >= 1, "sgld.batch", "must be >= 1")
    need(c.sps_outer_batch is None or c.sps_outer_batch >= 1, "sps.outer_batch", "must be >= 1 or 'full'")
    need(c.mala_warm_steps >= 1, "mala.warm_steps", "must be >= 1")
    need(c.mala_warm_gamma is None or c.mala_warm_gamma > 0, "mala.warm_gamma", "must be > 0")
    need(c.mala_warm_tau is None or c.mala_warm_tau > 0, "mala.warm_tau", "must be > 0")
    need(c.hist_bins >= 2, "hist.bins", "must be >= 2")
    need(c.hist_padding >= 0, "hist.padding", "must be >= 0")
    need(c.reference_budget >= 1, "reference.budget", "must be >= 1")
    need(c.reference_chains >= 1, "reference.chains", "must be >= 1")
    need(c.reference_burn_in >= 0, "reference.burn_in", "must be >= 0")
    need(c.reference_thin >= 1, "reference.thin", "must be >= 1")
    need(c.reference_min_particles >= 1, "reference.min_particles", "must be >= 1")
    need(c.reference_step > 0, "reference.step", "must be > 0")

    wants_sps = any(alg.startswith("sps") for alg in c.algorithms)
    if wants_sps:
        need(len(c.sps_tau) > 0, "sps.tau", "required by sps-* algorithms")
        need(len(c.sps_steps) > 0, "sps.steps", "required by sps-* algorithms")
        need(len(c.sps_eta) > 0, "sps.eta", "required by sps-* algorithms")
        need(all(v > 0 for v in c.sps_tau), "sps.tau", "values must be > 0")
        need(all(v > 0 for v in c.sps_eta), "sps.eta", "values must be > 0")
        need(all(s >= 1 for s in c.sps_steps), "sps.steps", "values must be >= 1")
    if "sps-sgld" in c.algorithms:
        need(all(s >= 2 for s in c.sps_steps), "sps.steps", "sps-sgld needs S >= 2 (averaging window)")
        for s in c.sps_steps:
            need(
                s * c.sps_inner_batch <= c.budget,
                "sps.steps",
                f"S={s} with inner batch {c.sps_inner_batch} costs more than budget {c.budget}",
            )
    if "sgld" in c.algorithms:
        need(len(c.sgld_step) > 0, "sgld.step", "required by the sgld algorithm")
        need(all(v > 0 for v in c.sgld_step), "sgld.step", "values must be > 0")
        need(c.sgld_batch <= c.budget, "sgld.batch", "exceeds the gradient budget")


def config_as_dict(c: ExperimentConfig) -> dict:
    """Canonical typed echo of the config, keyed by config-file key names."""
    out: dict[str, object] = {}
    for key, attr, _, _ in _SCHEMA:
        value = getattr(c, attr)
        if isinstance(value, tuple):
            value = list(value)
        if key == "sps.outer_batch" and value is None:
            value = "full"
        out[key] = value
    return out


# --- execution ---------------------------------------------------------------


def _mixture_smoothness_defaults(target: MixtureExperimentTarget) -> tuple[float, float]:
    length = target.smoothness
    return math.sqrt(6.0 * length), 1.0 / math.sqrt(2.0 * length * target.dim)


def _tv_fields(x: np.ndarray, reference: np.ndarray, spec: HistogramSpec) -> tuple[float, float, float, float]:
    tv = tv_marginal_estimate(x, reference, spec)
    per = np.asarray(tv.per_coordinate)
    return tv.aggregate, float(per.min()), float(np.median(per)), float(per.max())


def _run_seed(
    target: MixtureExperimentTarget,
    c: ExperimentConfig,
    seed: int,
    reference: np.ndarray,
    spec: HistogramSpec,
) -> list[ResultRow]:
    rows: list[ResultRow] = []
    d = target.dim

    if "sgld" in c.algorithms:
        n_steps = c.budget // c.sgld_batch
        use_fast = c.sgld_batch == 1
        tensors = preload_sgld(target, n_steps, c.n_chains, seed) if use_fast else None
        for h in c.sgld_step:
            t0 = time.perf_counter()
            if tensors is not None:
                x = run_sgld_fast(target, h, n_steps, tensors)
            else:
                x = vanilla_sgld(
                    target, h, n_steps, batch_size=c.sgld_batch, n_chains=c.n_chains, seed=seed
                ).x
            agg, lo, med, hi = _tv_fields(x, reference, spec)
            rows.append(
                ResultRow(
                    "sgld", d, None, None, None, h, seed,
                    n_steps * c.sgld_batch, agg, lo, med, hi,
                    time.perf_counter() - t0,
                )
            )
        del tensors

    if "sps-sgld" in c.algorithms:
        b_in = c.sps_inner_batch
        use_fast = b_in == 1 and c.sps_outer_batch is None
        tensors = None
        if use_fast:
            k_max = max(c.budget // s for s in c.sps_steps)
            rows_needed = max((c.budget // s) * s for s in c.sps_steps)
            tensors = preload_sps(target, k_max, rows_needed, c.n_chains, seed)
        for tau, s_total, eta in product(c.sps_tau, c.sps_steps, c.sps_eta):
            k = c.budget // (s_total * b_in)
            inner = SgldInnerConfig(
                tau=tau, tau_prime=tau, s_switch=s_total - 2, s_total=s_total, batch_size=b_in
            )
            t0 = time.perf_counter()
            if use_fast:
                x = run_sps_sgld_fast(target, eta, inner, k, tensors)
            else:
                outer = OuterConfig(
                    n_outer=k, eta=eta, inner=inner,
                    outer_batch_size=c.sps_outer_batch, n_chains=c.n_chains,
                    gradient_budget=c.budget,
                )
                x = sps_run(target, outer, seed).x
            agg, lo, med, hi = _tv_fields(x, reference, spec)
            rows.append(
                ResultRow(
                    "sps-sgld", d, tau, s_total, eta, None, seed,
                    k * s_total * b_in, agg, lo, med, hi,
                    time.perf_counter() - t0,
                )
            )
        del tensors

    if "sps-mala" in c.algorithms:
        gamma_default, warm_tau_default = _mixture_smoothness_defaults(target)
        warm = UldInnerConfig(
            gamma=c.mala_warm_gamma if c.mala_warm_gamma is not None else gamma_default,
            tau=c.mala_warm_tau if c.mala_warm_tau is not None else warm_tau_default,
            s_total=c.mala_warm_steps,
        )
        b_o = target.n_components if c.sps_outer_batch is None else c.sps_outer_batch
        for tau, s_total, eta in product(c.sps_tau, c.sps_steps, c.sps_eta):
            cost = (warm.s_total + 2 * s_total) * b_o
            if cost > c.budget:
                raise ConfigError(
                    f"sps.steps: sps-mala outer iteration costs {cost} gradients "
                    f"(S={s_total}, outer batch {b_o}), exceeding budget {c.budget}"
                )
            k = c.budget // cost
            inner = MalaInnerConfig(warm_start=warm, tau=tau, s_total=s_total)
            outer = OuterConfig(
                n_outer=k, eta=eta, inner=inner,
                outer_batch_size=c.sps_outer_batch, n_chains=c.n_chains,
                gradient_budget=c.budget,
            )
            t0 = time.perf_counter()
            x = sps_run(target, outer, seed).x
            agg, lo, med, hi = _tv_fields(x, reference, spec)
            rows.append(
                ResultRow(
                    "sps-mala", d, tau, s_total, eta, None, seed,
                    k * cost, agg, lo, med, hi,
                    time.perf_counter() - t0,
                )
            )

    return rows


def _sort_key(row: ResultRow):
    blank = -1.0
    return (
        row.algorithm,
        blank if row.tau is None else row.tau,
        blank if row.s_total is None else float(row.s_total),
        blank if row.eta is None else row.eta,
        blank if row.h is None else row.h,
        row.seed,
    )


def run_experiment(
    config: ExperimentConfig, *, cache_dir: str | Path | None = None
) -> list[ResultRow]:
    """Run the full grid × seed matrix and emit the CSV and JSON artifacts.

    The reference ensemble is loaded from the cache directory (argument >
    PROXSAMP_CACHE_DIR environment variable > user cache dir) or generated and
    cached on first use. Returns the rows in canonical order after writing
    ``config.out_csv`` and ``config.out_summary``.
    """
    target = config.make_target()
    reference = reference_ensemble(
        target,
        budget=config.reference_budget,
        seed=config.reference_seed,
        n_chains=config.reference_chains,
        burn_in=config.reference_burn_in,
        thin=config.reference_thin,
        min_particles=config.reference_min_particles,
        step_size=config.reference_step,
        cache=True,
        cache_dir=cache_dir,
    )
    spec = config.histogram_spec()
    rows: list[ResultRow] = []
    for seed in config.seeds:
        rows.extend(_run_seed(target, config, seed, reference.particles, spec))
    rows.sort(key=_sort_key)

    Path(config.out_csv).write_text(format_rows_csv(rows), encoding="utf-8", newline="\n")
    summary = build_summary(config, rows, reference)
    Path(config.out_summary).write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )
    return rows


# --- serialization ------------------------------------------------------------


def _g(x: float) -> str:
    return f"{x:.10g}"


def _opt(x: float | None) -> str:
    return "" if x is None else f"{x:.10g}"


def format_rows_csv(rows: list[ResultRow]) -> str:
    """Serialize rows under the fixed header (rows in caller-provided order)."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                (
                    r.algorithm,
                    str(r.dim),
                    _opt(r.tau),
                    "" if r.s_total is None else str(r.s_total),
                    _opt(r.eta),
                    _opt(r.h),
                    str(r.seed),
                    str(r.grads_used),
                    _g(r.tv_aggregate),
                    _g(r.tv_min),
                    _g(r.tv_median),
                    _g(r.tv_max),
                    f"{r.wall_s:.3f}",
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_rows_csv(text: str) -> list[ResultRow]:
    """Parse a rows CSV produced by :func:`format_rows_csv`.

    Raises:
        ValueError: On a header mismatch or malformed row.
    """
    lines = [line for line in text.splitlines() if line]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"expected header {CSV_HEADER!r}")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 13:
            raise ValueError(f"malformed row: {line!r}")
        alg, d, tau, s, eta, h, seed, grads, agg, lo, med, hi, wall = parts
        rows.append(
            ResultRow(
                algorithm=alg,
                dim=int(d),
                tau=float(tau) if tau else None,
                s_total=int(s) if s else None,
                eta=float(eta) if eta else None,
                h=float(h) if h else None,
                seed=int(seed),
                grads_used=int(grads),
                tv_aggregate=float(agg),
                tv_min=float(lo),
                tv_median=float(med),
                tv_max=float(hi),
                wall_s=float(wall),
            )
        )
    return rows


def _hyper_tuple(row: ResultRow) -> tuple:
    blank = -1.0
    return (
        blank if row.tau is None else row.tau,
        blank if row.s_total is None else float(row.s_total),
        blank if row.eta is None else row.eta,
        blank if row.h is None else row.h,
    )


def _mean_stderr(values: list[float]) -> tuple[float, float]:
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(len(values)))


def emit_plot_data(rows: list[ResultRow], axis: str) -> str:
    """Tidy CSV of TV against step size or dimension, one line per (algorithm, x).

    ``axis="step-size"`` plots against the inner step (tau for SPS rows, h for
    SGLD rows); ``axis="dimension"`` against d. When several hyper-parameter
    tuples share an x value, the one with the lowest seed-mean TV represents
    it (the best-achievable curve). Mean is over seeds; stderr is the sample
    standard deviation over seeds divided by sqrt(#seeds), 0 for a single row.
    """
    if axis not in ("step-size", "dimension"):
        raise ValueError(f"axis must be 'step-size' or 'dimension', got {axis!r}")
    if not rows:
        raise ValueError("rows must be non-empty")

    groups: dict[tuple[str, float], dict[tuple, list[float]]] = {}
    for row in rows:
        x = (row.tau if row.tau is not None else row.h) if axis == "step-size" else float(row.dim)
        if x is None:
            raise ValueError(f"row for {row.algorithm!r} has no step-size hyper-parameter")
        groups.setdefault((row.algorithm, x), {}).setdefault(_hyper_tuple(row), []).append(
            row.tv_aggregate
        )

    lines = [PLOT_CSV_HEADER]
    for alg, x in sorted(groups):
        best: tuple[float, float] | None = None
        for tup in sorted(groups[(alg, x)]):
            mean, stderr = _mean_stderr(groups[(alg, x)][tup])
            if best is None or mean < best[0]:
                best = (mean, stderr)
        lines.append(f"{alg},{_g(x)},{_g(best[0])},{_g(best[1])}")
    return "\n".join(lines) + "\n"


def build_summary(
    config: ExperimentConfig, rows: list[ResultRow], reference: ReferenceResult
) -> dict:
    """JSON-ready summary: config echo, reference stats, best point per algorithm.

    The best point minimizes the mean TV over seeds; ties resolve to the
    smallest hyper-parameter tuple. Wall times are deliberately excluded so
    the summary is byte-identical under replay.
    """
    per_alg: dict[str, dict[tuple, list[ResultRow]]] = {}
    for row in rows:
        per_alg.setdefault(row.algorithm, {}).setdefault(_hyper_tuple(row), []).append(row)

    algorithms = {}
    for alg in sorted(per_alg):
        best_tuple, best_stats = None, None
        for tup in sorted(per_alg[alg]):
            cell = sorted(per_alg[alg][tup], key=lambda r: r.seed)
            mean, stderr = _mean_stderr([r.tv_aggregate for r in cell])
            if best_stats is None or mean < best_stats[0]:
                best_tuple, best_stats = tup, (mean, stderr, cell)
        mean, stderr, cell = best_stats
        first = cell[0]
        best = {}
        if first.tau is not None:
            best["tau"] = first.tau
        if first.s_total is not None:
            best["S"] = first.s_total
        if first.eta is not None:
            best["eta"] = first.eta
        if first.h is not None:
            best["h"] = first.h
        best["mean_tv"] = mean
        best["stderr"] = stderr
        best["grads_used"] = first.grads_used
        best["per_seed_tv"] = [[r.seed, r.tv_aggregate] for r in cell]
        algorithms[alg] = {"best": best}

    return {
        "config": config_as_dict(config),
        "reference": {
            "particles": int(reference.particles.shape[0]),
            "dim": int(reference.particles.shape[1]),
            "accept_rate": reference.accept_rate,
            "path": str(reference.path),
        },
        "algorithms": algorithms,
    }
