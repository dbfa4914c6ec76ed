"""Finite-sum sampling targets and minibatch gradient machinery.

A target is a potential f(x) = (1/n) * sum_i f_i(x) given through its components.
Samplers only touch targets through component/minibatch energies and gradients, so
any smooth finite-sum potential can be plugged in. Two concrete targets ship:

* :class:`QuadraticTarget` — shifted isotropic quadratics, used as an analytically
  tractable oracle (Gaussian posteriors, exactly known gradient-noise variance).
* :class:`MixtureExperimentTarget` — the bimodal equal-weight Gaussian-pair
  components used by the benchmark: exp(-f_i(x)) = exp(-||x-b-mu_i||^2/2)
  + exp(-||x-b+mu_i||^2/2) with randomized directions mu_i around a common mean.

Shapes: points ``x`` have shape ``(..., dim)`` with arbitrary leading batch axes;
component indices ``i`` broadcast against the leading axes, so e.g.
``component_grad(i=(P,), x=(P, d))`` evaluates one component per chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import stream

__all__ = [
    "MiniBatch",
    "FiniteSumTarget",
    "QuadraticTarget",
    "MixtureExperimentTarget",
]


@dataclass(frozen=True)
class MiniBatch:
    """Indices into a target's component list.

    Attributes:
        indices: Integer array of shape ``(m,)`` with values in ``[0, n_components)``.
            Sampled with replacement, so repeats are legal.
    """

    indices: np.ndarray

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError("MiniBatch.indices must be a non-empty 1-D array")
        if np.any(idx < 0):
            raise ValueError("MiniBatch.indices must be non-negative")
        object.__setattr__(self, "indices", idx)

    @property
    def size(self) -> int:
        return int(self.indices.size)


class FiniteSumTarget:
    """Base class: a potential given as the average of n smooth components.

    Subclasses implement :meth:`component_energy` and :meth:`component_grad`;
    everything else (minibatch/full averages, minibatch sampling, gradient-noise
    variance) is derived here. ``smoothness`` is an upper bound L on the gradient
    Lipschitz constant of every component, used by schedule derivations.
    """

    dim: int
    n_components: int
    smoothness: float

    # -- component interface -------------------------------------------------

    def component_energy(self, i, x: np.ndarray) -> np.ndarray:
        """Energy f_i(x). ``i`` broadcasts against x's leading axes."""
        raise NotImplementedError

    def component_grad(self, i, x: np.ndarray) -> np.ndarray:
        """Gradient of f_i at x, shape like x."""
        raise NotImplementedError

    # -- derived operations ---------------------------------------------------

    def _check_batch(self, batch: MiniBatch) -> np.ndarray:
        if np.any(batch.indices >= self.n_components):
            raise ValueError(
                f"minibatch index out of range for n_components={self.n_components}"
            )
        return batch.indices

    def minibatch_energy(self, batch: MiniBatch, x: np.ndarray) -> np.ndarray:
        """Average energy over the batch: f_b(x) = (1/m) sum_{i in b} f_i(x)."""
        idx = self._check_batch(batch)
        x = np.asarray(x, dtype=np.float64)
        return self.component_energy(idx, x[..., None, :]).mean(axis=-1)

    def minibatch_grad(self, batch: MiniBatch, x: np.ndarray) -> np.ndarray:
        """Average gradient over the batch, shape like x."""
        idx = self._check_batch(batch)
        x = np.asarray(x, dtype=np.float64)
        return self.component_grad(idx, x[..., None, :]).mean(axis=-2)

    def full_energy(self, x: np.ndarray) -> np.ndarray:
        """f(x) = (1/n) sum_i f_i(x)."""
        return self.minibatch_energy(MiniBatch(np.arange(self.n_components)), x)

    def full_grad(self, x: np.ndarray) -> np.ndarray:
        """grad f(x), shape like x."""
        return self.minibatch_grad(MiniBatch(np.arange(self.n_components)), x)

    def sample_minibatch(self, size: int, rng: np.random.Generator) -> MiniBatch:
        """Draw ``size`` component indices uniformly iid with replacement."""
        if size < 1:
            raise ValueError("minibatch size must be >= 1")
        return MiniBatch(rng.integers(0, self.n_components, size=size))

    def estimate_sigma2(self, x: np.ndarray) -> np.ndarray:
        """Exact gradient-noise variance sigma^2(x) at x.

        sigma^2(x) = (1/n) sum_i ||grad f_i(x) - grad f(x)||^2, so that a
        uniform-with-replacement minibatch of size m has
        E||grad f_b(x) - grad f(x)||^2 = sigma^2(x) / m.

        Args:
            x: Point(s), shape ``(..., dim)``.

        Returns:
            Scalar for a single point, else shape ``(...)``.
        """
        x = np.asarray(x, dtype=np.float64)
        idx = np.arange(self.n_components)
        grads = self.component_grad(idx, x[..., None, :])  # (..., n, d)
        mean = grads.mean(axis=-2, keepdims=True)
        var = np.square(grads - mean).sum(axis=-1).mean(axis=-1)
        return var if var.ndim else float(var)


@dataclass
class QuadraticTarget(FiniteSumTarget):
    """Components f_i(x) = (q/2) ||x - c_i||^2.

    With all centers at zero this is the Gaussian N(0, I/q); the restricted
    Gaussian oracle against it is available in closed form, which makes this the
    oracle target for inner-sampler equivalence tests. With distinct centers the
    gradient noise is constant in x: sigma^2 = q^2 * (1/n) sum_i ||c_i - c_bar||^2.

    Attributes:
        dim: Dimension d.
        quad_coeff: Curvature q > 0.
        centers: Optional ``(n, d)`` component centers; defaults to a single
            component centered at the origin.
    """

    dim: int
    quad_coeff: float = 1.0
    centers: np.ndarray | None = None
    n_components: int = field(init=False)
    smoothness: float = field(init=False)

    def __post_init__(self) -> None:
        if self.quad_coeff <= 0:
            raise ValueError("quad_coeff must be positive")
        if self.centers is None:
            self.centers = np.zeros((1, self.dim))
        self.centers = np.asarray(self.centers, dtype=np.float64)
        if self.centers.shape[-1] != self.dim:
            raise ValueError("centers must have shape (n, dim)")
        self.n_components = int(self.centers.shape[0])
        self.smoothness = float(self.quad_coeff)

    def component_energy(self, i, x: np.ndarray) -> np.ndarray:
        u = np.asarray(x, dtype=np.float64) - self.centers[i]
        return 0.5 * self.quad_coeff * np.square(u).sum(axis=-1)

    def component_grad(self, i, x: np.ndarray) -> np.ndarray:
        return self.quad_coeff * (np.asarray(x, dtype=np.float64) - self.centers[i])


@dataclass
class MixtureExperimentTarget(FiniteSumTarget):
    """Bimodal finite-sum benchmark target.

    Each component is an equal-weight pair of unit Gaussians mirrored about a
    common bias point b:

        exp(-f_i(x)) = exp(-||x - b - mu_i||^2 / 2) + exp(-||x - b + mu_i||^2 / 2)

    with b = 3 * ones(d) and mu_i = sqrt(10/d) * (2 * ones(d) + z_i),
    z_i ~ N(0, I) drawn from a seed-keyed stream. The full target is exactly
    symmetric under x -> 2b - x, with two well-separated modes near b +- mu_bar:
    a deliberately hard multimodal instance.

    The component means are regenerated from ``seed`` deterministically (single
    ``(n, dim)`` standard-normal draw from stream(seed, "mixture-means"), C-order),
    so two instances with equal (dim, n_components, seed) are bit-identical.

    Attributes:
        dim: Dimension d.
        n_components: Number of components n.
        seed: Stream seed for the component means.
        smoothness: Gradient-Lipschitz bound; defaults to 1 + max_i ||mu_i||^2.
    """

    dim: int = 10
    n_components: int = 100
    seed: int = 0
    smoothness: float | None = None
    bias: np.ndarray = field(init=False)
    mus: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if self.dim < 1 or self.n_components < 1:
            raise ValueError("dim and n_components must be >= 1")
        rng = stream(self.seed, "mixture-means")
        z = rng.standard_normal((self.n_components, self.dim))
        self.bias = 3.0 * np.ones(self.dim)
        self.mus = np.sqrt(10.0 / self.dim) * (2.0 * np.ones(self.dim) + z)
        if self.smoothness is None:
            self.smoothness = 1.0 + float(np.square(self.mus).sum(axis=1).max())

    def component_energy(self, i, x: np.ndarray) -> np.ndarray:
        """f_i(x) = -log( exp(-||u+||^2/2) + exp(-||u-||^2/2) ), u+- = x - b -+ mu_i.

        Evaluated with the max subtracted inside the log-sum-exp, so it is stable
        arbitrarily far from the modes.
        """
        y = np.asarray(x, dtype=np.float64) - self.bias
        mu = self.mus[i]
        a_plus = -0.5 * np.square(y - mu).sum(axis=-1)
        a_minus = -0.5 * np.square(y + mu).sum(axis=-1)
        m = np.maximum(a_plus, a_minus)
        return -(m + np.log(np.exp(a_plus - m) + np.exp(a_minus - m)))

    def component_grad(self, i, x: np.ndarray) -> np.ndarray:
        """grad f_i(x) = w+ (x - b - mu_i) + w- (x - b + mu_i), softmax weights w+-."""
        y = np.asarray(x, dtype=np.float64) - self.bias
        mu = self.mus[i]
        u_plus = y - mu
        u_minus = y + mu
        a_plus = -0.5 * np.square(u_plus).sum(axis=-1, keepdims=True)
        a_minus = -0.5 * np.square(u_minus).sum(axis=-1, keepdims=True)
        m = np.maximum(a_plus, a_minus)
        e_plus = np.exp(a_plus - m)
        e_minus = np.exp(a_minus - m)
        denom = e_plus + e_minus
        return (e_plus * u_plus + e_minus * u_minus) / denom

    def full_energy(self, x: np.ndarray) -> np.ndarray:
        """Fast full-average energy via the log-cosh identity.

        f_i(x) = (||y||^2 + ||mu_i||^2)/2 - log 2 - logcosh(<y, mu_i>), y = x - b,
        so the average needs one (..., n) inner-product matrix instead of n
        separate log-sum-exps. logcosh(t) = |t| + log1p(exp(-2|t|)) - log 2.
        """
        y = np.asarray(x, dtype=np.float64) - self.bias
        t = y @ self.mus.T  # (..., n)
        at = np.abs(t)
        logcosh = at + np.log1p(np.exp(-2.0 * at)) - np.log(2.0)
        const = 0.5 * (np.square(y).sum(axis=-1) + np.square(self.mus).sum(axis=1).mean())
        return const - np.log(2.0) - logcosh.mean(axis=-1)

    def full_grad(self, x: np.ndarray) -> np.ndarray:
        """grad f(x) = y - (1/n) sum_i tanh(<y, mu_i>) mu_i, y = x - b."""
        y = np.asarray(x, dtype=np.float64) - self.bias
        t = np.tanh(y @ self.mus.T)  # (..., n)
        return y - (t @ self.mus) / self.n_components

    def overdispersed_init(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draw chain initializations from the component-mode overlay.

        Samples x = b + s * mu_i + xi with i uniform over components,
        xi ~ N(0, I), and signs s stratified (first ceil(size/2) rows +1, rest
        -1) so the two symmetric wells get exactly balanced mass. This is the
        overdispersed multi-chain initialization used by the reference sampler;
        by the target's x -> 2b - x symmetry the balanced split is exact.

        Draw order: component indices, then the Gaussian offsets.
        """
        comps = rng.integers(0, self.n_components, size=size)
        signs = np.where(np.arange(size) < (size + 1) // 2, 1.0, -1.0)
        xi = rng.standard_normal((size, self.dim))
        return self.bias + signs[:, None] * self.mus[comps] + xi
