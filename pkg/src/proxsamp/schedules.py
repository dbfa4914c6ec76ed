"""Theorem-driven schedule derivation and convergence diagnostics.

Given problem constants (smoothness L, log-Sobolev constant alpha, gradient-noise
variance sigma^2, dimension d, target accuracy epsilon), these functions derive
complete parameter schedules for the outer loop and each inner sampler, plus the
TV-distance upper bound and the particle second-moment recursion used to budget
runs a priori.

All formulas share the factor G = (1 + L^2) d / (4 alpha eps^2); every log in the
derivations must have an argument > 1 (the iterated log's argument may equal 1),
otherwise the inputs are outside the theory's regime and a ValueError is raised.
Continuous quantities are scaled by the optional per-field constant multipliers
*before* integerization (ceil), so the asymptotic constants can be tuned without
touching the formulas.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScheduleInputs",
    "SgldSchedule",
    "MalaSchedule",
    "derive_sgld_schedule",
    "derive_mala_schedule",
    "tv_upper_bound",
    "second_moment_bound_step",
]

THEORY_MAX_TAU = 1.0 / 36.0


@dataclass(frozen=True)
class ScheduleInputs:
    """Problem constants the schedule formulas consume.

    Attributes:
        smoothness: Gradient Lipschitz bound L of every component.
        alpha: Log-Sobolev constant alpha of the target.
        sigma2: Gradient-noise variance bound sigma^2 (0 for full gradients).
        dim: Dimension d.
        epsilon: Target total-variation accuracy.
        n_components: Component count n, used to clamp the outer batch
            (``None`` disables the clamp).
        grad0_sq: ||grad f(0)||^2, used by the default moment bound.
        moment_bound: Estimate replacing the data-dependent log arguments
            (||x0||^2, ||grad f_b(0)||^2 terms) in the inner-step-count
            formulas; defaults to dim + grad0_sq + sigma2.
        constant_multipliers: Named positive constants scaling individual
            derived quantities before integerization; missing names default
            to 1. Keys: n_outer, eta, delta, outer_batch_size, tau, tau_prime,
            s_switch, s_total (SGLD) and gamma, tau_uld, s_uld, tau_mala,
            s_mala (MALA).
    """

    smoothness: float
    alpha: float
    sigma2: float
    dim: int
    epsilon: float
    n_components: int | None = None
    grad0_sq: float = 0.0
    moment_bound: float | None = None
    constant_multipliers: Mapping[str, float] | None = None

    def __post_init__(self) -> None:
        if not (self.smoothness > 0 and self.alpha > 0 and self.epsilon > 0):
            raise ValueError("smoothness, alpha and epsilon must be positive")
        if self.sigma2 < 0 or self.grad0_sq < 0:
            raise ValueError("sigma2 and grad0_sq must be non-negative")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.moment_bound is not None and not self.moment_bound > 0:
            raise ValueError("moment_bound must be positive")
        if self.constant_multipliers is not None:
            for name, value in self.constant_multipliers.items():
                if not value > 0:
                    raise ValueError(f"constant multiplier {name!r} must be positive")

    @property
    def effective_moment_bound(self) -> float:
        if self.moment_bound is not None:
            return self.moment_bound
        return self.dim + self.grad0_sq + self.sigma2

    @property
    def g_factor(self) -> float:
        """G = (1 + L^2) d / (4 alpha eps^2), the shared contraction factor."""
        L = self.smoothness
        return (1.0 + L * L) * self.dim / (4.0 * self.alpha * self.epsilon**2)


@dataclass(frozen=True)
class SgldSchedule:
    """Derived outer + two-phase-SGLD-inner schedule."""

    n_outer: int
    eta: float
    delta: float
    outer_batch_size: int
    tau: float
    tau_prime: float
    s_switch: int
    s_total: int
    g_factor: float


@dataclass(frozen=True)
class MalaSchedule:
    """Derived outer + warm-started-MALA-inner schedule."""

    n_outer: int
    eta: float
    delta: float
    outer_batch_size: int
    gamma: float
    tau_uld: float
    s_uld: int
    tau_mala: float
    s_mala: int
    g_factor: float


def _checked_log(value: float, what: str, *, allow_one: bool = False) -> float:
    """log(value) with the theory-regime guard on the argument."""
    if (value < 1.0) or (value == 1.0 and not allow_one):
        raise ValueError(
            f"degenerate log argument for {what}: {value} <= 1 "
            "(inputs are outside the schedule's regime)"
        )
    return math.log(value)


def _mult(multipliers: Mapping[str, float] | None, key: str) -> float:
    if multipliers is None:
        return 1.0
    return float(multipliers.get(key, 1.0))


def _outer_schedule(inputs: ScheduleInputs) -> tuple[int, float, float, int, float]:
    """Shared outer-loop quantities: (K, eta, delta, b_o, log G)."""
    multipliers = inputs.constant_multipliers
    L, alpha, eps = inputs.smoothness, inputs.alpha, inputs.epsilon
    log_g = _checked_log(inputs.g_factor, "G")
    n_outer = math.ceil(_mult(multipliers, "n_outer") * (L / alpha) * log_g)
    eta = _mult(multipliers, "eta") / (2.0 * L)
    delta = _mult(multipliers, "delta") * (2.0 * eps**2 * alpha / L) / log_g
    b_o = math.ceil(
        _mult(multipliers, "outer_batch_size") * inputs.sigma2 / (4.0 * alpha * eps**2) * log_g
    )
    if inputs.n_components is not None:
        b_o = min(b_o, inputs.n_components)
    b_o = max(b_o, 1)
    return n_outer, eta, delta, b_o, log_g


def derive_sgld_schedule(inputs: ScheduleInputs) -> SgldSchedule:
    """Derive the full SPS + two-phase-SGLD schedule from problem constants.

    With G = (1 + L^2) d / (4 alpha eps^2) and MB the moment-bound estimate:

        K      = ceil( (L / alpha) log G )
        eta    = 1 / (2 L)
        delta  = (2 eps^2 alpha / L) / log G
        b_o    = clamp( ceil( (sigma^2 / (4 alpha eps^2)) log G ), 1, n )
        tau    = min( (alpha eps^2 / 16) / ((sigma^2 + 3 L d) log G), 1/36 )
        tau'   = min( (alpha eps^2 / (4 L)) / ((sigma^2 + 3 L d) log G), 1/36 )
        S'     = ceil( (4 / (L tau)) * ( log( (MB (1 + L) + L) / (L alpha eps^2) )
                                         + log log G ) )
        S      = S' + ceil( 1 / tau' )

    where the derived tau / tau' (after multipliers) feed the S' / S formulas.
    ``inputs.constant_multipliers`` scales individual outputs by key: n_outer,
    eta, delta, outer_batch_size, tau, tau_prime, s_switch, s_total.

    Raises:
        ValueError: If any log argument falls outside the regime (argument
            <= 1; the iterated log allows exactly 1).
    """
    multipliers = inputs.constant_multipliers
    n_outer, eta, delta, b_o, log_g = _outer_schedule(inputs)
    L, alpha, eps, d = inputs.smoothness, inputs.alpha, inputs.epsilon, inputs.dim
    noise_scale = (inputs.sigma2 + 3.0 * L * d) * log_g
    tau = _mult(multipliers, "tau") * min(alpha * eps**2 / 16.0 / noise_scale, THEORY_MAX_TAU)
    tau_prime = _mult(multipliers, "tau_prime") * min(
        alpha * eps**2 / (4.0 * L) / noise_scale, THEORY_MAX_TAU
    )
    mb = inputs.effective_moment_bound
    warm_log = _checked_log((mb * (1.0 + L) + L) / (L * alpha * eps**2), "S' numerator")
    loglog_g = _checked_log(log_g, "log G", allow_one=True)
    s_switch = math.ceil(
        _mult(multipliers, "s_switch") * (4.0 / (L * tau)) * (warm_log + loglog_g)
    )
    s_total = s_switch + math.ceil(_mult(multipliers, "s_total") / tau_prime)
    return SgldSchedule(
        n_outer=n_outer,
        eta=eta,
        delta=delta,
        outer_batch_size=b_o,
        tau=tau,
        tau_prime=tau_prime,
        s_switch=s_switch,
        s_total=s_total,
        g_factor=inputs.g_factor,
    )


def derive_mala_schedule(inputs: ScheduleInputs) -> MalaSchedule:
    """Derive the full SPS + warm-started-MALA schedule from problem constants.

    Outer quantities (K, eta, delta, b_o) are shared with
    :func:`derive_sgld_schedule`. The inner phases use

        gamma    = sqrt(6 L)
        tau_uld  = 1 / sqrt(2 L d)
        S_uld    = ceil( sqrt(d) * log( MB (1 + 1/(2 L^2)) ) )
        tau_mala = 1 / ( 2 L sqrt(d) * log^2( max(d, 1/delta) ) )
        S_mala   = ceil( sqrt(d) * log^3( 1 / delta ) )

    with MB the moment-bound estimate replacing the data-dependent warm-start
    log argument. ``inputs.constant_multipliers`` keys: the outer four plus
    gamma, tau_uld, s_uld, tau_mala, s_mala.

    Raises:
        ValueError: On degenerate log arguments (<= 1).
    """
    multipliers = inputs.constant_multipliers
    n_outer, eta, delta, b_o, _ = _outer_schedule(inputs)
    L, d = inputs.smoothness, inputs.dim
    gamma = _mult(multipliers, "gamma") * math.sqrt(6.0 * L)
    tau_uld = _mult(multipliers, "tau_uld") / math.sqrt(2.0 * L * d)
    mb_arg = inputs.effective_moment_bound * (1.0 + 1.0 / (2.0 * L * L))
    s_uld = math.ceil(
        _mult(multipliers, "s_uld") * math.sqrt(d) * _checked_log(mb_arg, "S_uld argument")
    )
    if not delta < 1.0:
        raise ValueError(f"derived delta={delta} must be < 1 for the MALA step formulas")
    mala_log = _checked_log(max(float(d), 1.0 / delta), "tau_mala argument")
    tau_mala = _mult(multipliers, "tau_mala") / (2.0 * L * math.sqrt(d) * mala_log**2)
    s_mala = math.ceil(
        _mult(multipliers, "s_mala")
        * math.sqrt(d)
        * _checked_log(1.0 / delta, "S_mala argument") ** 3
    )
    return MalaSchedule(
        n_outer=n_outer,
        eta=eta,
        delta=delta,
        outer_batch_size=b_o,
        gamma=gamma,
        tau_uld=tau_uld,
        s_uld=s_uld,
        tau_mala=tau_mala,
        s_mala=s_mala,
        g_factor=inputs.g_factor,
    )


def tv_upper_bound(
    deltas,
    etas,
    batch_sizes,
    sigma2: float,
    smoothness: float,
    alpha: float,
    dim: int,
) -> float:
    """A-priori TV bound for a K-round run with per-round (delta_i, eta_i, b_i).

    TV( p_K, p_* ) <= sqrt( (1/2) sum_i delta_i )
                    + sigma * sqrt( sum_i eta_i / (2 b_i) )
                    + sqrt( (1 + L^2) d / (4 alpha) ) * prod_i (1 + alpha eta_i)^-1

    The three terms are the accumulated inner-sampler error, the stochastic
    gradient error, and the residual initialization error.

    Args:
        deltas: Per-round inner KL accuracies, length K, each >= 0. Empty
            lists (K = 0) are allowed: the bound is then the third term alone.
        etas: Per-round proximal step sizes, length K, each > 0.
        batch_sizes: Per-round outer batch sizes, length K, each >= 1.
        sigma2: Gradient-noise variance bound sigma^2 >= 0.
        smoothness: Gradient Lipschitz bound L > 0.
        alpha: Log-Sobolev constant > 0.
        dim: Dimension d >= 1.

    Returns:
        The bound (may exceed 1, in which case it is vacuous but still valid).
    """
    deltas = np.asarray(deltas, dtype=np.float64)
    etas = np.asarray(etas, dtype=np.float64)
    batch_sizes = np.asarray(batch_sizes, dtype=np.float64)
    if not deltas.shape == etas.shape == batch_sizes.shape or deltas.ndim != 1:
        raise ValueError("deltas, etas and batch_sizes must be 1-D with equal length")
    if np.any(deltas < 0) or np.any(etas <= 0) or np.any(batch_sizes < 1):
        raise ValueError("need deltas >= 0, etas > 0, batch_sizes >= 1")
    if sigma2 < 0 or smoothness <= 0 or alpha <= 0 or dim < 1:
        raise ValueError("invalid problem constants")
    inner_err = math.sqrt(0.5 * deltas.sum())
    grad_err = math.sqrt(sigma2) * math.sqrt((etas / (2.0 * batch_sizes)).sum())
    init_err = math.sqrt((1.0 + smoothness**2) * dim / (4.0 * alpha)) * float(
        np.prod(1.0 / (1.0 + alpha * etas))
    )
    return inner_err + grad_err + init_err


def second_moment_bound_step(
    m_k: float,
    eta: float,
    delta: float,
    sigma2: float,
    batch_size: int,
    target_second_moment: float,
    dim: int,
) -> float:
    """One step of the particle second-moment recursion.

    M_{k+1} <= 24 M_k + 4 eta delta + 24 eta^2 sigma^2 / b + 28 M + 24 eta d,

    where M_k bounds E||x_k||^2 and M bounds the target's second moment. The
    bound grows geometrically by design; only its logarithm enters complexity
    accounting. The smoothing stage obeys the exact identity
    M_{k+1/2} = M_k + eta * d.

    Args:
        m_k: Current second-moment bound M_k >= 0.
        eta: Proximal step size >= 0.
        delta: Inner KL accuracy >= 0.
        sigma2: Gradient-noise variance bound >= 0.
        batch_size: Outer batch size b >= 1.
        target_second_moment: Bound M on E_{p_*}||x||^2, >= 0.
        dim: Dimension d >= 0.

    Returns:
        The bound M_{k+1}.
    """
    if min(m_k, eta, delta, sigma2, target_second_moment, dim) < 0:
        raise ValueError("all recursion inputs must be non-negative")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    return (
        24.0 * m_k
        + 4.0 * eta * delta
        + 24.0 * eta**2 * sigma2 / batch_size
        + 28.0 * target_second_moment
        + 24.0 * eta * dim
    )
