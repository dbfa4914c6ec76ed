"""Fast-path equivalence tests.

The compiled kernels must replay the reference implementations bit-for-bit up
to floating-point reassociation: both paths consume identical random tensors,
and the only arithmetic difference is the tanh form of the mixture component
gradient, so final ensembles agree to roundoff (measured ~1e-15 over the
horizons used here; asserted at 1e-12).
"""

import numpy as np
import pytest

from proxsamp.baselines import vanilla_sgld
from proxsamp.engine import (
    preload_sgld,
    preload_sps,
    run_sgld_fast,
    run_sps_sgld_fast,
)
from proxsamp.inner import SgldInnerConfig
from proxsamp.outer import OuterConfig, sps_run
from proxsamp.targets import MixtureExperimentTarget, QuadraticTarget

pytestmark = pytest.mark.filterwarnings("ignore::UserWarning")

TARGET = MixtureExperimentTarget(dim=3, n_components=5, seed=2)


def test_sgld_fast_path_matches_reference_implementation():
    n_steps, n_chains, seed = 60, 40, 9
    tensors = preload_sgld(TARGET, n_steps, n_chains, seed)
    for step_size in (0.05, 0.4):
        fast = run_sgld_fast(TARGET, step_size, n_steps, tensors)
        ref = vanilla_sgld(
            TARGET, step_size, n_steps, batch_size=1, n_chains=n_chains, seed=seed
        ).x
        assert np.max(np.abs(fast - ref)) <= 1e-12


def test_sps_fast_path_matches_reference_implementation():
    inner = SgldInnerConfig(tau=0.2, tau_prime=0.1, s_switch=2, s_total=8)
    n_outer, n_chains, seed, eta = 5, 30, 4, 0.7
    tensors = preload_sps(TARGET, n_outer, n_outer * inner.s_total, n_chains, seed)
    fast = run_sps_sgld_fast(TARGET, eta, inner, n_outer, tensors)
    config = OuterConfig(
        n_outer=n_outer,
        eta=eta,
        inner=inner,
        outer_batch_size=None,
        n_chains=n_chains,
    )
    ref = sps_run(TARGET, config, seed=seed).x
    assert np.max(np.abs(fast - ref)) <= 1e-12


def test_preloads_are_prefix_stable():
    # A bigger preload must reproduce the same run: grid points share tensors.
    inner = SgldInnerConfig(tau=0.15, tau_prime=0.1, s_switch=1, s_total=6)
    small = preload_sps(TARGET, 3, 3 * inner.s_total, 25, seed=8)
    large = preload_sps(TARGET, 10, 10 * inner.s_total + 17, 25, seed=8)
    out_small = run_sps_sgld_fast(TARGET, 0.5, inner, 3, small)
    out_large = run_sps_sgld_fast(TARGET, 0.5, inner, 3, large)
    assert np.array_equal(out_small, out_large)

    sg_small = preload_sgld(TARGET, 20, 25, seed=8)
    sg_large = preload_sgld(TARGET, 50, 25, seed=8)
    assert np.array_equal(
        run_sgld_fast(TARGET, 0.3, 20, sg_small), run_sgld_fast(TARGET, 0.3, 20, sg_large)
    )


def test_fast_paths_are_deterministic():
    tensors_a = preload_sgld(TARGET, 15, 20, seed=3)
    tensors_b = preload_sgld(TARGET, 15, 20, seed=3)
    assert all(np.array_equal(a, b) for a, b in zip(tensors_a, tensors_b))
    assert np.array_equal(
        run_sgld_fast(TARGET, 0.2, 15, tensors_a), run_sgld_fast(TARGET, 0.2, 15, tensors_b)
    )


def test_fast_path_guards():
    inner = SgldInnerConfig(tau=0.2, tau_prime=0.1, s_switch=1, s_total=4)
    with pytest.raises(TypeError, match="MixtureExperimentTarget"):
        preload_sgld(QuadraticTarget(dim=2), 5, 5, 0)
    with pytest.raises(TypeError, match="MixtureExperimentTarget"):
        preload_sps(QuadraticTarget(dim=2), 2, 8, 5, 0)

    tensors = preload_sgld(TARGET, 10, 5, seed=0)
    with pytest.raises(ValueError, match="exceeds the preloaded"):
        run_sgld_fast(TARGET, 0.1, 11, tensors)
    with pytest.raises(ValueError, match="step_size"):
        run_sgld_fast(TARGET, 0.0, 5, tensors)

    sps_tensors = preload_sps(TARGET, 2, 2 * inner.s_total, 5, seed=0)
    with pytest.raises(ValueError, match="inner rows"):
        run_sps_sgld_fast(TARGET, 0.5, inner, 3, sps_tensors)
    with pytest.raises(ValueError, match="batch_size"):
        run_sps_sgld_fast(
            TARGET,
            0.5,
            SgldInnerConfig(tau=0.2, tau_prime=0.1, s_switch=1, s_total=4, batch_size=2),
            2,
            sps_tensors,
        )
    with pytest.raises(ValueError, match="eta"):
        run_sps_sgld_fast(TARGET, 0.0, inner, 2, sps_tensors)
