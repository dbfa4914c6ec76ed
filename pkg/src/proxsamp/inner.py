"""Inner samplers for the proximal step's restricted Gaussian oracle.

Stage 2 of the proximal sampler needs (approximate) draws from

    p(z | x0, b)  ∝  exp( -f_b(z) - ||z - x0||^2 / (2 eta) ),

the minibatch energy tilted by a Gaussian centered at the stage-1 particle x0.
:class:`InnerProblem` packages that distribution; three interchangeable samplers
draw from it:

* :func:`inner_sgld` — two-phase stochastic gradient Langevin dynamics with a
  coarse phase (step tau), a fine phase (step tau'), and a trajectory average
  over the fine tail.
* :func:`inner_uld` — discretized underdamped Langevin with the exact
  per-coordinate Gaussian transition kernel (no discretization drift beyond the
  gradient freeze), used both standalone and as a warm start.
* :func:`inner_mala` — Metropolis-adjusted Langevin warm-started by
  :func:`inner_uld`; exact stationary law for the inner target.

:func:`rgo_exact_gaussian` gives the closed-form oracle for isotropic quadratic
energies, used to validate all of the above.

All samplers are vectorized over chains: centers and returned particles have
shape ``(n_chains, dim)``. Every sampler documents the exact order in which it
consumes randomness, so fused/preloaded replays can reproduce runs bit for bit.
Randomness is drawn by role — initialization, minibatch indices, Gaussian noise,
acceptance uniforms — either from one generator (blocks consumed in the
documented order) or from an :class:`InnerStreams` bundle with one generator per
role, which is what the outer loop passes so each role forms a homogeneous,
preloadable stream. Diagnostics count *component* gradient evaluations (one
minibatch-gradient evaluation of a size-m batch costs m).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .targets import FiniteSumTarget, MiniBatch

__all__ = [
    "InnerProblem",
    "InnerStreams",
    "SgldInnerConfig",
    "UldInnerConfig",
    "MalaInnerConfig",
    "ExactRgoConfig",
    "InnerResult",
    "UldMoments",
    "sgld_noise_scale",
    "uld_moments",
    "inner_sgld",
    "inner_uld",
    "inner_mala",
    "mala_log_accept",
    "rgo_exact_gaussian",
]

# Phase step sizes above this bound void the inner-convergence theory (though the
# dynamics remain well defined as long as tau < 4 eta); exceeding it warns.
THEORY_MAX_TAU = 1.0 / 36.0


@dataclass(frozen=True)
class InnerProblem:
    """The stage-2 target: minibatch energy plus proximal regularizer.

    Attributes:
        target: Finite-sum target supplying f_b.
        x_center: Regularizer centers, shape ``(n_chains, dim)`` (the stage-1
            particles; one independent inner problem per chain).
        eta: Proximal step size eta > 0 (regularizer is ||z - x0||^2 / (2 eta)).
        batch: Outer minibatch b defining f_b.
    """

    target: FiniteSumTarget
    x_center: np.ndarray
    eta: float
    batch: MiniBatch

    def __post_init__(self) -> None:
        x0 = np.atleast_2d(np.asarray(self.x_center, dtype=np.float64))
        if x0.ndim != 2 or x0.shape[1] != self.target.dim:
            raise ValueError("x_center must have shape (n_chains, dim)")
        object.__setattr__(self, "x_center", x0)
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.eta > 1.0 / (2.0 * self.target.smoothness):
            warnings.warn(
                f"eta={self.eta} exceeds 1/(2L)={1.0 / (2.0 * self.target.smoothness):.3g}; "
                "inner targets may not be strongly log-concave",
                UserWarning,
                stacklevel=2,
            )

    @property
    def n_chains(self) -> int:
        return int(self.x_center.shape[0])

    @property
    def dim(self) -> int:
        return int(self.x_center.shape[1])

    def energy(self, z: np.ndarray) -> np.ndarray:
        """g(z) = f_b(z) + ||z - x0||^2 / (2 eta), shape (n_chains,)."""
        reg = 0.5 / self.eta * np.square(z - self.x_center).sum(axis=-1)
        return self.target.minibatch_energy(self.batch, z) + reg

    def grad(self, z: np.ndarray) -> np.ndarray:
        """grad g(z) = grad f_b(z) + (z - x0) / eta, shape (n_chains, dim)."""
        return self.target.minibatch_grad(self.batch, z) + (z - self.x_center) / self.eta


@dataclass(frozen=True)
class SgldInnerConfig:
    """Two-phase inner SGLD parameters.

    Steps 0..s_switch use step size ``tau`` (coarse phase); steps
    s_switch+1..s_total-1 use ``tau_prime`` (fine phase). The returned particle
    is the arithmetic mean of the pre-drift iterates z'_s over the fine window
    s in {s_switch+1, ..., s_total-1}.

    Attributes:
        tau: Coarse step size, > 0.
        tau_prime: Fine step size, > 0.
        s_switch: Last coarse step index S'; 0 <= s_switch < s_total - 1 so the
            averaging window is non-empty.
        s_total: Total number of steps S.
        batch_size: Inner minibatch size b_in drawn (uniformly, with
            replacement) from the outer batch each step.
    """

    tau: float
    tau_prime: float
    s_switch: int
    s_total: int
    batch_size: int = 1

    def __post_init__(self) -> None:
        if not (self.tau > 0 and self.tau_prime > 0):
            raise ValueError("tau and tau_prime must be positive")
        if not 0 <= self.s_switch < self.s_total - 1:
            raise ValueError("need 0 <= s_switch < s_total - 1 (non-empty averaging window)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if max(self.tau, self.tau_prime) > THEORY_MAX_TAU:
            warnings.warn(
                f"inner step sizes ({self.tau}, {self.tau_prime}) exceed the theory bound "
                f"1/36; convergence guarantees no longer apply",
                UserWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class UldInnerConfig:
    """Underdamped Langevin parameters: friction gamma, step tau, steps s_total."""

    gamma: float
    tau: float
    s_total: int

    def __post_init__(self) -> None:
        if not (self.gamma > 0 and self.tau > 0):
            raise ValueError("gamma and tau must be positive")
        if self.s_total < 1:
            raise ValueError("s_total must be >= 1")


@dataclass(frozen=True)
class MalaInnerConfig:
    """Warm-started MALA parameters.

    Attributes:
        warm_start: ULD phase configuration producing the initial particle.
        tau: MALA proposal step size, > 0.
        s_total: Number of Metropolis steps S.
    """

    warm_start: UldInnerConfig
    tau: float
    s_total: int

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.s_total < 1:
            raise ValueError("s_total must be >= 1")


@dataclass(frozen=True)
class ExactRgoConfig:
    """Closed-form inner draw via :func:`rgo_exact_gaussian`.

    Valid only when the effective batch energy is the isotropic quadratic
    (quad_coeff/2)||z - center||^2 (e.g. quadratic targets, or quad_coeff = 0
    to draw from the bare proximal Gaussian N(x0, eta I)). Costs zero gradient
    evaluations; used to isolate the outer loop from inner-sampler error.

    Attributes:
        quad_coeff: Curvature q >= 0 of the assumed quadratic energy.
        center: Quadratic's center c (scalar or length-dim array).
    """

    quad_coeff: float = 0.0
    center: float = 0.0

    def __post_init__(self) -> None:
        if self.quad_coeff < 0:
            raise ValueError("quad_coeff must be non-negative")


class InnerStreams(NamedTuple):
    """Role-separated generators for an inner sampler.

    Samplers also accept a single generator, which then serves every role in
    the documented per-sampler block order; passing distinct generators keeps
    each role's stream homogeneous (all-normals / all-ints / all-uniforms).

    Attributes:
        start: Initialization draws (z_0 / v_0 blocks).
        batch: Minibatch position draws (uniform ints).
        noise: Per-step Gaussian increments.
        uniform: Metropolis acceptance uniforms.
    """

    start: np.random.Generator
    batch: np.random.Generator
    noise: np.random.Generator
    uniform: np.random.Generator


def _as_streams(rng: np.random.Generator | InnerStreams) -> InnerStreams:
    if isinstance(rng, InnerStreams):
        return rng
    return InnerStreams(rng, rng, rng, rng)


class InnerResult(NamedTuple):
    """Sampler output: particles ``z`` of shape (n_chains, dim) and diagnostics."""

    z: np.ndarray
    diagnostics: dict


def sgld_noise_scale(tau_s: float, eta: float) -> float:
    """Pre-drift diffusion scale sqrt( 2 tau_s / (1 - tau_s / (4 eta)) ).

    Raises:
        ValueError: If tau_s >= 4 eta, where the scale is non-finite/undefined.
    """
    if tau_s >= 4.0 * eta:
        raise ValueError(f"tau_s={tau_s} must be < 4*eta={4.0 * eta} for a finite noise scale")
    return math.sqrt(2.0 * tau_s / (1.0 - tau_s / (4.0 * eta)))


def inner_sgld(
    problem: InnerProblem,
    config: SgldInnerConfig,
    rng: np.random.Generator | InnerStreams,
) -> InnerResult:
    """Two-phase SGLD targeting the inner distribution.

    z_0 ~ N(x0, eta I); each step first diffuses, z'_s = z_s + c_s xi with
    c_s = sgld_noise_scale(tau_s, eta), then drifts,
    z_{s+1} = z'_s - tau_s (grad f_{b_s}(z'_s) + (z'_s - x0)/eta), with a fresh
    size-b_in minibatch b_s drawn from the outer batch each step. Returns the
    arithmetic mean of z'_s over the fine window {s_switch+1, ..., s_total-1}.

    Randomness (single generator: consumed as blocks in this order): the
    (n_chains, dim) z_0 block [start], then the (s_total, n_chains, batch_size)
    position block of uniform ints into the outer batch [batch], then the
    (s_total, n_chains, dim) noise block [noise].

    Returns:
        InnerResult with diagnostics ``grads_used`` (= s_total * batch_size
        component evaluations per chain) and ``window_size``.
    """
    streams = _as_streams(rng)
    n_chains, dim = problem.n_chains, problem.dim
    s_total, s_switch = config.s_total, config.s_switch
    scales = np.where(
        np.arange(s_total) <= s_switch,
        sgld_noise_scale(config.tau, problem.eta),
        sgld_noise_scale(config.tau_prime, problem.eta),
    )
    taus = np.where(np.arange(s_total) <= s_switch, config.tau, config.tau_prime)

    z = problem.x_center + math.sqrt(problem.eta) * streams.start.standard_normal(
        (n_chains, dim)
    )
    pos = streams.batch.integers(
        0, problem.batch.size, size=(s_total, n_chains, config.batch_size)
    )
    noise = streams.noise.standard_normal((s_total, n_chains, dim))

    comps = problem.batch.indices[pos]  # (s_total, n_chains, batch_size)
    z_bar = np.zeros((n_chains, dim))
    inv_eta = 1.0 / problem.eta
    for s in range(s_total):
        z_prime = z + scales[s] * noise[s]
        if s > s_switch:
            z_bar += z_prime
        grad = problem.target.component_grad(comps[s], z_prime[:, None, :]).mean(axis=-2)
        z = z_prime - taus[s] * (grad + (z_prime - problem.x_center) * inv_eta)

    window = s_total - 1 - s_switch
    return InnerResult(
        z_bar / window,
        {"grads_used": s_total * config.batch_size, "window_size": window},
    )


class UldMoments(NamedTuple):
    """Coefficients of the exact per-coordinate ULD transition kernel.

    The next state is Gaussian:
        mean_z = z + c_zv * v - c_zg * grad g(z)
        mean_v = a * v - c_vg * grad g(z)
    with per-coordinate covariance [[cov_zz, cov_zv], [cov_zv, cov_vv]].
    """

    a: float
    c_zv: float
    c_zg: float
    c_vg: float
    cov_zz: float
    cov_zv: float
    cov_vv: float


def uld_moments(gamma: float, tau: float) -> UldMoments:
    """Exact transition moments of underdamped Langevin with frozen gradient.

    For dz = v dt, dv = -grad g(z) dt - gamma v dt + sqrt(2 gamma) dW over a
    step of length tau with grad g frozen at the start point, the (z, v) pair
    is jointly Gaussian with (a := exp(-gamma tau)):

        mean_z = z + (1-a)/gamma * v - (tau - (1-a)/gamma)/gamma * grad g(z)
        mean_v = a v - (1-a)/gamma * grad g(z)
        cov_zz = (2/gamma) * ( tau - (2/gamma)(1-a) + (1-a^2)/(2 gamma) )
        cov_zv = (1-a)^2 / gamma
        cov_vv = 1 - a^2
    """
    if not (gamma > 0 and tau > 0):
        raise ValueError("gamma and tau must be positive")
    a = math.exp(-gamma * tau)
    inv_g = 1.0 / gamma
    c_zv = inv_g * (1.0 - a)
    return UldMoments(
        a=a,
        c_zv=c_zv,
        c_zg=inv_g * (tau - c_zv),
        c_vg=c_zv,
        cov_zz=2.0 * inv_g * (tau - 2.0 * inv_g * (1.0 - a) + 0.5 * inv_g * (1.0 - a * a)),
        cov_zv=inv_g * (1.0 - a) ** 2,
        cov_vv=1.0 - a * a,
    )


def _uld_cholesky(m: UldMoments) -> tuple[float, float, float]:
    """Lower Cholesky factor of the 2x2 kernel covariance.

    cov_zz underflows to a tiny negative value in floating point for very small
    gamma*tau (exact value is Theta(tau^3)); it is clamped at zero, which keeps
    the factor well defined and the kernel exact to machine precision.
    """
    czz = max(m.cov_zz, 0.0)
    l_zz = math.sqrt(czz)
    if l_zz == 0.0:
        return 0.0, 0.0, math.sqrt(max(m.cov_vv, 0.0))
    l_vz = m.cov_zv / l_zz
    l_vv = math.sqrt(max(m.cov_vv - l_vz * l_vz, 0.0))
    return l_zz, l_vz, l_vv


def inner_uld(
    problem: InnerProblem,
    config: UldInnerConfig,
    rng: np.random.Generator | InnerStreams,
) -> InnerResult:
    """Underdamped Langevin with the exact Gaussian transition kernel.

    Initializes z_0 = x0 (the proximal center) and v_0 ~ N(0, I), then applies
    :func:`uld_moments` steps with the gradient of the regularized energy g
    evaluated on the full outer batch. The velocity is discarded on return.

    Randomness (single generator: consumed in this order): the (n_chains, dim)
    v_0 block [start], then the (s_total, 2, n_chains, dim) noise block
    [noise] with xi_z = [s][0], xi_v = [s][1].

    Returns:
        InnerResult with ``grads_used`` = s_total * |batch| component evals.
    """
    streams = _as_streams(rng)
    n_chains, dim = problem.n_chains, problem.dim
    m = uld_moments(config.gamma, config.tau)
    l_zz, l_vz, l_vv = _uld_cholesky(m)

    z = problem.x_center.copy()
    v = streams.start.standard_normal((n_chains, dim))
    noise = streams.noise.standard_normal((config.s_total, 2, n_chains, dim))
    for s in range(config.s_total):
        grad = problem.grad(z)
        mean_z = z + m.c_zv * v - m.c_zg * grad
        mean_v = m.a * v - m.c_vg * grad
        xi_z, xi_v = noise[s, 0], noise[s, 1]
        z = mean_z + l_zz * xi_z
        v = mean_v + l_vz * xi_z + l_vv * xi_v
    return InnerResult(z, {"grads_used": config.s_total * problem.batch.size})


def mala_log_accept(
    problem: InnerProblem, z: np.ndarray, z_prime: np.ndarray, tau: float
) -> np.ndarray:
    """Log Metropolis ratio for the proposal N(z - tau grad g(z), 2 tau I).

    With phi(a; b) = ||a - (b - tau grad g(b))||^2 / (4 tau),

        log_acc = ( g(z) + phi(z'; z) ) - ( g(z') + phi(z; z') )

    and the move z -> z' is accepted when log(u) <= log_acc, u ~ U[0, 1].
    Exactly antisymmetric under swapping z and z', and exactly zero at z' = z.

    Returns:
        Shape (n_chains,) log acceptance ratios.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    grad_z = problem.grad(z)
    grad_zp = problem.grad(z_prime)
    phi_fwd = np.square(z_prime - (z - tau * grad_z)).sum(axis=-1) / (4.0 * tau)
    phi_rev = np.square(z - (z_prime - tau * grad_zp)).sum(axis=-1) / (4.0 * tau)
    return (problem.energy(z) + phi_fwd) - (problem.energy(z_prime) + phi_rev)


def inner_mala(
    problem: InnerProblem,
    config: MalaInnerConfig,
    rng: np.random.Generator | InnerStreams,
) -> InnerResult:
    """Metropolis-adjusted Langevin warm-started by :func:`inner_uld`.

    The ULD phase consumes randomness first (see :func:`inner_uld`), then each
    MALA step draws the (n_chains, dim) proposal noise [noise] followed by the
    (n_chains,) acceptance uniforms [uniform]. Energy and gradient of the
    current point are cached across rejections, so each step evaluates the
    proposal exactly once; ``grads_used`` counts the pinned budget
    (s_uld + 2 * s_total) * |batch| component evaluations.

    Returns:
        InnerResult with diagnostics ``grads_used`` and ``accept_rate``.
    """
    streams = _as_streams(rng)
    warm = inner_uld(problem, config.warm_start, streams)
    z = warm.z
    tau = config.tau
    g_z = problem.energy(z)
    grad_z = problem.grad(z)
    accepts = np.zeros(problem.n_chains)
    for _ in range(config.s_total):
        xi = streams.noise.standard_normal(z.shape)
        u = streams.uniform.uniform(size=problem.n_chains)
        z_prop = z - tau * grad_z + math.sqrt(2.0 * tau) * xi
        g_prop = problem.energy(z_prop)
        grad_prop = problem.grad(z_prop)
        phi_fwd = np.square(z_prop - (z - tau * grad_z)).sum(axis=-1) / (4.0 * tau)
        phi_rev = np.square(z - (z_prop - tau * grad_prop)).sum(axis=-1) / (4.0 * tau)
        log_acc = (g_z + phi_fwd) - (g_prop + phi_rev)
        acc = np.log(u) <= log_acc
        z = np.where(acc[:, None], z_prop, z)
        g_z = np.where(acc, g_prop, g_z)
        grad_z = np.where(acc[:, None], grad_prop, grad_z)
        accepts += acc
    grads = (config.warm_start.s_total + 2 * config.s_total) * problem.batch.size
    return InnerResult(
        z,
        {"grads_used": grads, "accept_rate": float(accepts.mean() / config.s_total)},
    )


def rgo_exact_gaussian(
    x_center: np.ndarray,
    eta: float,
    quad_coeff: float,
    rng: np.random.Generator,
    center: float | np.ndarray = 0.0,
) -> np.ndarray:
    """Exact draw from the inner target for quadratic energy (q/2)||z - c||^2.

    The tilted density exp(-q||z-c||^2/2 - ||z-x0||^2/(2 eta)) is the Gaussian

        N( (x0 + q eta c) / (1 + q eta),  eta / (1 + q eta) * I ),

    which this oracle samples directly — the ground truth that every inner
    sampler must reproduce on quadratic problems.

    Args:
        x_center: Proximal centers, shape (n_chains, dim).
        eta: Proximal step size, > 0.
        quad_coeff: Curvature q >= 0 of the quadratic energy (q = 0 degrades
            to the pure Gaussian N(x0, eta I)).
        rng: Generator; consumes one (n_chains, dim) standard-normal block.
        center: Quadratic's center c (scalar or broadcastable array).

    Returns:
        Samples, shape (n_chains, dim).
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    if quad_coeff < 0:
        raise ValueError("quad_coeff must be non-negative")
    x0 = np.atleast_2d(np.asarray(x_center, dtype=np.float64))
    shrink = 1.0 + quad_coeff * eta
    mean = (x0 + quad_coeff * eta * np.asarray(center)) / shrink
    std = math.sqrt(eta / shrink)
    return mean + std * rng.standard_normal(x0.shape)
