"""Outer loop of the stochastic proximal sampler.

Each outer iteration alternates two stages on every chain:

1. Exact Gaussian smoothing: x_{k+1/2} = x_k + sqrt(eta) * xi.
2. Restricted Gaussian oracle: draw x_{k+1} approximately from
   p(z) ∝ exp(-f_b(z) - ||z - x_{k+1/2}||^2 / (2 eta)) with one of the inner
   samplers, where b is the outer minibatch of that iteration.

Chains are vectorized: ``sps_run`` advances ``n_chains`` independent copies in
lockstep, drawing from Philox streams keyed by (seed, purpose) with a documented
consumption order, so runs replay bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .inner import (
    ExactRgoConfig,
    InnerProblem,
    InnerResult,
    InnerStreams,
    MalaInnerConfig,
    SgldInnerConfig,
    UldInnerConfig,
    inner_mala,
    inner_sgld,
    inner_uld,
    rgo_exact_gaussian,
)
from .rng import stream
from .targets import FiniteSumTarget, MiniBatch

InnerConfig = SgldInnerConfig | UldInnerConfig | MalaInnerConfig | ExactRgoConfig

__all__ = [
    "InnerConfig",
    "OuterConfig",
    "RunRecord",
    "SpsStreams",
    "SpsResult",
    "inner_step_cost",
    "sps_step",
    "sps_run",
]


@dataclass(frozen=True)
class OuterConfig:
    """Outer-loop parameters.

    Attributes:
        n_outer: Number of outer iterations K >= 0 (an upper limit when
            ``gradient_budget`` is set; K = 0 returns the initial ensemble).
        eta: Proximal/smoothing step size eta > 0.
        inner: Inner sampler configuration; the type selects the sampler
            (SgldInnerConfig / UldInnerConfig / MalaInnerConfig /
            ExactRgoConfig).
        outer_batch_size: Outer minibatch size b_o, drawn uniformly with
            replacement each outer iteration and shared by all chains. ``None``
            means the full component pool (the exact set {0..n-1}, drawn
            without consuming randomness).
        n_chains: Number of vectorized chains.
        gradient_budget: Optional cap on component-gradient evaluations per
            chain; the run stops before the first iteration that would
            exceed it.
        snapshot_every: If set, attach a particle snapshot to every
            ``snapshot_every``-th record.
    """

    n_outer: int
    eta: float
    inner: InnerConfig
    outer_batch_size: int | None = None
    n_chains: int = 10000
    gradient_budget: int | None = None
    snapshot_every: int | None = None

    def __post_init__(self) -> None:
        if self.n_outer < 0:
            raise ValueError("n_outer must be >= 0")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.outer_batch_size is not None and self.outer_batch_size < 1:
            raise ValueError("outer_batch_size must be >= 1 (or None for the full pool)")
        if self.n_chains < 1:
            raise ValueError("n_chains must be >= 1")
        if self.snapshot_every is not None and self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")


@dataclass
class RunRecord:
    """Per-outer-iteration trace entry.

    Attributes:
        iteration: Outer iteration index k (0-based).
        grads_used: Cumulative component-gradient evaluations per chain.
        second_moment: Empirical mean of ||x_{k+1}||^2 over chains.
        inner: Diagnostics dict from the inner sampler.
        snapshot: Optional copy of the particle ensemble after the iteration.
    """

    iteration: int
    grads_used: int
    second_moment: float
    inner: dict = field(default_factory=dict)
    snapshot: np.ndarray | None = None


class SpsStreams(NamedTuple):
    """RNG streams of one run, keyed by purpose (see :func:`sps_run`)."""

    outer_noise: np.random.Generator
    inner: InnerStreams
    outer_batch: np.random.Generator


class SpsResult(NamedTuple):
    """Final ensemble (n_chains, dim), per-iteration records, grads per chain."""

    x: np.ndarray
    records: list[RunRecord]
    grads_used: int


def inner_step_cost(config: OuterConfig, target: FiniteSumTarget) -> int:
    """Component-gradient evaluations one outer iteration costs per chain.

    SGLD inner: s_total * batch_size (one component per inner draw).
    ULD inner: s_total * |outer batch|.
    MALA inner: (s_uld + 2 * s_mala) * |outer batch|.
    Exact RGO: 0 (closed form).
    """
    b_o = target.n_components if config.outer_batch_size is None else config.outer_batch_size
    inner = config.inner
    if isinstance(inner, SgldInnerConfig):
        return inner.s_total * inner.batch_size
    if isinstance(inner, UldInnerConfig):
        return inner.s_total * b_o
    if isinstance(inner, MalaInnerConfig):
        return (inner.warm_start.s_total + 2 * inner.s_total) * b_o
    if isinstance(inner, ExactRgoConfig):
        return 0
    raise TypeError(f"unknown inner config type: {type(inner).__name__}")


def _draw_outer_batch(
    target: FiniteSumTarget, config: OuterConfig, rng: np.random.Generator
) -> MiniBatch:
    if config.outer_batch_size is None:
        return MiniBatch(np.arange(target.n_components))
    return MiniBatch(rng.integers(0, target.n_components, size=config.outer_batch_size))


def _run_inner(
    problem: InnerProblem,
    inner: InnerConfig,
    rng: np.random.Generator | InnerStreams,
) -> InnerResult:
    if isinstance(inner, SgldInnerConfig):
        return inner_sgld(problem, inner, rng)
    if isinstance(inner, UldInnerConfig):
        return inner_uld(problem, inner, rng)
    if isinstance(inner, MalaInnerConfig):
        return inner_mala(problem, inner, rng)
    if isinstance(inner, ExactRgoConfig):
        start = rng.start if isinstance(rng, InnerStreams) else rng
        z = rgo_exact_gaussian(
            problem.x_center, problem.eta, inner.quad_coeff, start, inner.center
        )
        return InnerResult(z, {"grads_used": 0})
    raise TypeError(f"unknown inner config type: {type(inner).__name__}")


def sps_step(
    target: FiniteSumTarget,
    x: np.ndarray,
    config: OuterConfig,
    streams: SpsStreams,
) -> tuple[np.ndarray, np.ndarray, InnerResult]:
    """One outer iteration on the whole ensemble.

    Stream consumption: one outer-batch draw (``outer_batch`` stream; skipped in
    full-pool mode), one (n_chains, dim) smoothing block (``outer_noise``), then
    whatever the inner sampler consumes from the role-tagged ``inner`` bundle
    (start / batch / noise / uniform; see :mod:`proxsamp.inner`).

    Args:
        target: Finite-sum target.
        x: Current ensemble, shape (n_chains, dim).
        config: Outer configuration (inner selects the stage-2 sampler).
        streams: Purpose-keyed generators for this run.

    Returns:
        (x_next, x_half, inner_result) — the advanced ensemble, the smoothed
        stage-1 ensemble, and the inner sampler's result.
    """
    batch = _draw_outer_batch(target, config, streams.outer_batch)
    x_half = x + math.sqrt(config.eta) * streams.outer_noise.standard_normal(x.shape)
    problem = InnerProblem(target, x_half, config.eta, batch)
    result = _run_inner(problem, config.inner, streams.inner)
    return result.z, x_half, result


def sps_run(target: FiniteSumTarget, config: OuterConfig, seed: int) -> SpsResult:
    """Run the stochastic proximal sampler from a standard Gaussian start.

    Streams: chains initialize from ``stream(seed, "init")``; iterations consume
    ``stream(seed, "outer-noise")``, ``stream(seed, "outer-batch")``, and the
    inner bundle ``stream(seed, "rgo-init")`` / ``stream(seed, "inner-batch")``
    / ``stream(seed, "inner-noise")`` / ``stream(seed, "inner-uniform")`` as
    documented in :func:`sps_step`. Role separation keeps each purpose a single
    homogeneous block stream, so runs replay bit for bit from precomputed
    tensors.

    When ``config.gradient_budget`` is set, the number of outer iterations is
    ``min(n_outer, budget // inner_step_cost)``; a budget below one iteration's
    cost raises.

    Returns:
        SpsResult with the final ensemble, one RunRecord per iteration, and the
        total component-gradient evaluations per chain.
    """
    cost = inner_step_cost(config, target)
    n_outer = config.n_outer
    if config.gradient_budget is not None and cost > 0:
        affordable = config.gradient_budget // cost
        if affordable == 0 and n_outer > 0:
            raise ValueError(
                f"gradient_budget={config.gradient_budget} is below the cost "
                f"{cost} of a single outer iteration"
            )
        n_outer = min(n_outer, affordable)

    x = stream(seed, "init").standard_normal((config.n_chains, target.dim))
    streams = SpsStreams(
        outer_noise=stream(seed, "outer-noise"),
        inner=InnerStreams(
            start=stream(seed, "rgo-init"),
            batch=stream(seed, "inner-batch"),
            noise=stream(seed, "inner-noise"),
            uniform=stream(seed, "inner-uniform"),
        ),
        outer_batch=stream(seed, "outer-batch"),
    )
    records: list[RunRecord] = []
    grads = 0
    for k in range(n_outer):
        x, _, result = sps_step(target, x, config, streams)
        grads += result.diagnostics["grads_used"]
        snap = None
        if config.snapshot_every is not None and (k + 1) % config.snapshot_every == 0:
            snap = x.copy()
        records.append(
            RunRecord(
                iteration=k,
                grads_used=grads,
                second_moment=float(np.square(x).sum(axis=1).mean()),
                inner=result.diagnostics,
                snapshot=snap,
            )
        )
    return SpsResult(x, records, grads)
