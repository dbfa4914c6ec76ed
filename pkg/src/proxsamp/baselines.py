"""Baseline samplers the proximal method is benchmarked against."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .outer import RunRecord
from .rng import stream
from .targets import FiniteSumTarget

__all__ = ["SgldResult", "vanilla_sgld"]


class SgldResult(NamedTuple):
    """Final ensemble (n_chains, dim), trace records, grads per chain."""

    x: np.ndarray
    records: list[RunRecord]
    grads_used: int


def vanilla_sgld(
    target: FiniteSumTarget,
    step_size: float,
    n_steps: int,
    batch_size: int = 1,
    n_chains: int = 10000,
    seed: int = 0,
    gradient_budget: int | None = None,
    record_every: int | None = None,
) -> SgldResult:
    """Plain stochastic gradient Langevin dynamics.

    x_{t+1} = x_t - h * grad f_{b_t}(x_t) + sqrt(2 h) * xi_t, with a fresh
    uniform size-``batch_size`` minibatch per chain per step and x_0 ~ N(0, I).

    Streams: ``stream(seed, "init")`` for x_0; each step consumes the
    (n_chains, batch_size) component block from ``stream(seed, "batch")`` and
    then the (n_chains, dim) noise block from ``stream(seed, "noise")``.

    Args:
        target: Finite-sum target.
        step_size: Step size h > 0.
        n_steps: Number of steps T (an upper limit when a budget is set).
        batch_size: Minibatch size m >= 1; every step costs m component
            gradients per chain.
        n_chains: Vectorized chain count.
        seed: Stream seed.
        gradient_budget: Optional cap on per-chain component-gradient
            evaluations; the run stops at min(T, budget // m) steps.
        record_every: Trace granularity; defaults to max(1, T // 100). A record
            is appended after every ``record_every``-th step and after the last.

    Returns:
        SgldResult; records reuse :class:`~proxsamp.outer.RunRecord` with an
        empty ``inner`` dict.
    """
    if not step_size > 0:
        raise ValueError("step_size must be positive")
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    if batch_size < 1 or n_chains < 1:
        raise ValueError("batch_size and n_chains must be >= 1")

    t_total = n_steps
    if gradient_budget is not None:
        t_total = min(t_total, gradient_budget // batch_size)
    if record_every is None:
        record_every = max(1, t_total // 100)

    x = stream(seed, "init").standard_normal((n_chains, target.dim))
    batch_rng = stream(seed, "batch")
    noise_rng = stream(seed, "noise")
    scale = math.sqrt(2.0 * step_size)
    records: list[RunRecord] = []
    for t in range(t_total):
        comps = batch_rng.integers(0, target.n_components, size=(n_chains, batch_size))
        xi = noise_rng.standard_normal((n_chains, target.dim))
        grad = target.component_grad(comps, x[:, None, :]).mean(axis=-2)
        x = x - step_size * grad + scale * xi
        if (t + 1) % record_every == 0 or t == t_total - 1:
            records.append(
                RunRecord(
                    iteration=t,
                    grads_used=(t + 1) * batch_size,
                    second_moment=float(np.square(x).sum(axis=1).mean()),
                )
            )
    return SgldResult(x, records, t_total * batch_size)
