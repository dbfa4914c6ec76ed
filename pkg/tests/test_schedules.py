"""Theorem-driven schedules and diagnostic calculators against frozen oracles.

The pinned constants below were produced by an independent 50-digit evaluation
of the closed forms (mpmath), not by running this library; the library must
reproduce them to 1e-9 relative.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from proxsamp import (
    ScheduleInputs,
    derive_mala_schedule,
    derive_sgld_schedule,
    second_moment_bound_step,
    tv_upper_bound,
)

# Oracle point: L = 5, alpha = 0.5, sigma^2 = 1, d = 10, eps = 0.1,
# moment bound default = d + grad0_sq + sigma^2 = 11.
ORACLE_INPUTS = dict(smoothness=5.0, alpha=0.5, sigma2=1.0, dim=10, epsilon=0.1)
SGLD_ORACLE = dict(
    g_factor=13000.0,
    n_outer=95,
    eta=0.1,
    delta=2.111329421489127751753e-4,
    outer_batch_size=474,
    tau=2.184736570249511332526e-7,
    tau_prime=1.747789256199609066021e-7,
    s_switch=37_349_945,
    s_total=43_071_459,
)
MALA_ORACLE = dict(
    n_outer=95,
    eta=0.1,
    delta=2.111329421489127751753e-4,
    outer_batch_size=474,
    gamma=5.47722557505166113457,
    tau_uld=0.1,
    s_uld=8,
    tau_mala=4.415185982975154454174e-4,
    s_mala=1917,
)


def assert_matches(schedule, oracle, rel=1e-9):
    for name, want in oracle.items():
        got = getattr(schedule, name)
        if isinstance(want, int):
            assert got == want, f"{name}: {got} != {want}"
        else:
            assert got == pytest.approx(want, rel=rel), f"{name}: {got} vs {want}"


def test_sgld_schedule_matches_independent_oracle():
    sched = derive_sgld_schedule(ScheduleInputs(**ORACLE_INPUTS))
    assert_matches(sched, SGLD_ORACLE)


def test_mala_schedule_matches_independent_oracle():
    sched = derive_mala_schedule(ScheduleInputs(**ORACLE_INPUTS))
    assert_matches(sched, MALA_ORACLE)


def test_unit_log_point_k1():
    """eps chosen so the log factor G equals e: K = ceil(log e) = 1, eta = 1/2,
    and sigma = 0 clamps the outer batch at 1."""
    eps = math.sqrt(1.0 / (2.0 * math.e))
    sched = derive_sgld_schedule(
        ScheduleInputs(smoothness=1.0, alpha=1.0, sigma2=0.0, dim=1, epsilon=eps)
    )
    assert sched.g_factor == pytest.approx(math.e, rel=1e-12)
    assert sched.n_outer == 1
    assert sched.eta == 0.5
    assert sched.outer_batch_size == 1


def test_mala_unit_delta_point():
    """Same eps makes delta = 1/e exactly: S_mala = ceil(1 * 1^3) = 1 and
    tau_mala = 1/(2 L sqrt(d) log^2(e)) = 1/2; gamma = sqrt(6L)."""
    eps = math.sqrt(1.0 / (2.0 * math.e))
    sched = derive_mala_schedule(
        ScheduleInputs(smoothness=1.0, alpha=1.0, sigma2=0.0, dim=1, epsilon=eps)
    )
    assert sched.delta == pytest.approx(1.0 / math.e, rel=1e-12)
    assert sched.s_mala == 1
    assert sched.tau_mala == pytest.approx(0.5, rel=1e-12)
    assert sched.gamma == pytest.approx(math.sqrt(6.0), rel=1e-12)


def test_schedule_rejects_degenerate_log_arguments():
    # eps so large that G <= 1: no meaningful accuracy demanded
    with pytest.raises(ValueError):
        derive_sgld_schedule(
            ScheduleInputs(smoothness=1.0, alpha=1.0, sigma2=0.0, dim=1, epsilon=10.0)
        )
    with pytest.raises(ValueError):
        derive_mala_schedule(
            ScheduleInputs(smoothness=1.0, alpha=1.0, sigma2=0.0, dim=1, epsilon=10.0)
        )


def test_schedule_inputs_validation():
    with pytest.raises(ValueError):
        ScheduleInputs(smoothness=-1.0, alpha=1.0, sigma2=1.0, dim=10, epsilon=0.1)
    with pytest.raises(ValueError):
        ScheduleInputs(smoothness=1.0, alpha=0.0, sigma2=1.0, dim=10, epsilon=0.1)
    with pytest.raises(ValueError):
        ScheduleInputs(smoothness=1.0, alpha=1.0, sigma2=-0.5, dim=10, epsilon=0.1)
    with pytest.raises(ValueError):
        ScheduleInputs(smoothness=1.0, alpha=1.0, sigma2=1.0, dim=0, epsilon=0.1)
    with pytest.raises(ValueError):
        ScheduleInputs(smoothness=1.0, alpha=1.0, sigma2=1.0, dim=10, epsilon=0.1,
                       constant_multipliers={"tau": -2.0})
    # sigma2 = 0 is legal (noiseless finite sum)
    ScheduleInputs(smoothness=1.0, alpha=1.0, sigma2=0.0, dim=1, epsilon=0.3)


def test_constant_multipliers_scale_named_quantities():
    base = ScheduleInputs(**ORACLE_INPUTS)
    doubled = replace(base, constant_multipliers={"tau": 2.0, "s_uld": 3.0})
    s0 = derive_sgld_schedule(base)
    s1 = derive_sgld_schedule(doubled)
    assert s1.tau == pytest.approx(2 * s0.tau, rel=1e-12)
    assert s1.tau_prime == s0.tau_prime  # untouched quantities unchanged
    m0 = derive_mala_schedule(base)
    m1 = derive_mala_schedule(doubled)
    assert m1.s_uld == math.ceil(3.0 * math.sqrt(10) * math.log(11 * (1 + 1 / 50)))
    assert m1.gamma == m0.gamma


def test_outer_batch_clamps_to_component_count():
    sched = derive_sgld_schedule(ScheduleInputs(**ORACLE_INPUTS, n_components=100))
    assert sched.outer_batch_size == 100  # oracle value 474 clamped at n


# ---------------------------------------------------------------------------
# tv_upper_bound
# ---------------------------------------------------------------------------


def test_tv_upper_bound_hand_example():
    # K=2, eta=(1,1), alpha=1, delta=(.02,.02), sigma=1, b=(4,4), L=1, d=4.
    # Hand evaluation of the three terms:
    #   sqrt(0.5*(0.02+0.02)) + 1*sqrt(1/8 + 1/8) + sqrt((1+1)*4/4) * (1/2)^2
    want = math.sqrt(0.02) + math.sqrt(0.25) + math.sqrt(2.0) * 0.25
    got = tv_upper_bound([0.02, 0.02], [1.0, 1.0], [4, 4], sigma2=1.0,
                         smoothness=1.0, alpha=1.0, dim=4)
    assert abs(got - want) < 1e-12
    assert abs(got - 0.9949747468305833) < 1e-12  # frozen 50-digit evaluation


def test_tv_upper_bound_empty_lists_is_initial_divergence_term():
    got = tv_upper_bound([], [], [], sigma2=1.0, smoothness=1.0, alpha=1.0, dim=4)
    assert abs(got - math.sqrt(2.0 * 4.0 / 4.0)) < 1e-12


def test_tv_upper_bound_noiseless_exact_inner_is_third_term_only():
    got = tv_upper_bound([0.0, 0.0], [1.0, 1.0], [1, 1], sigma2=0.0,
                         smoothness=1.0, alpha=1.0, dim=4)
    assert abs(got - math.sqrt(2.0) * 0.25) < 1e-12


def test_tv_upper_bound_monotone_in_k_when_third_term_dominates():
    vals = [
        tv_upper_bound([0.0] * k, [1.0] * k, [1] * k, sigma2=0.0,
                       smoothness=1.0, alpha=1.0, dim=4)
        for k in range(6)
    ]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_tv_upper_bound_rejects_mismatched_lengths():
    with pytest.raises(ValueError):
        tv_upper_bound([0.1], [1.0, 1.0], [1], sigma2=0.0, smoothness=1.0,
                       alpha=1.0, dim=4)


# ---------------------------------------------------------------------------
# second_moment_bound_step
# ---------------------------------------------------------------------------


def test_second_moment_step_trivial_cases():
    assert second_moment_bound_step(1.0, 0.0, 0.0, 0.0, 1, 0.0, 0) == 24.0
    assert second_moment_bound_step(0.0, 1.0, 0.0, 0.0, 1, 0.0, 1) == 24.0


def test_second_moment_step_hand_example():
    # 24*2 + 4*0.5*0.1 + 24*0.25*1/2 + 28*3 + 24*0.5*10 = 255.2
    got = second_moment_bound_step(2.0, 0.5, 0.1, 1.0, 2, 3.0, 10)
    assert abs(got - 255.2) < 1e-12


def test_second_moment_step_rejects_zero_batch():
    with pytest.raises(ValueError):
        second_moment_bound_step(1.0, 1.0, 0.0, 1.0, 0, 0.0, 1)


# ---------------------------------------------------------------------------
# Derived schedules plug into the TV bound
# ---------------------------------------------------------------------------


def test_derived_schedule_meets_its_epsilon_in_the_bound():
    """The schedule is built to make each of the three bound terms Theta(eps).

    The first two terms land at eps exactly; the third sits slightly above eps
    because (1 + alpha*eta)^-K decays a bit slower than exp(-alpha*eta*K), so
    the honest total is ~3.1 eps rather than the nominal 3 eps.
    """
    inputs = ScheduleInputs(**ORACLE_INPUTS)
    s = derive_sgld_schedule(inputs)
    k = s.n_outer
    bound = tv_upper_bound(
        [s.delta] * k, [s.eta] * k, [s.outer_batch_size] * k,
        sigma2=inputs.sigma2, smoothness=inputs.smoothness, alpha=inputs.alpha,
        dim=inputs.dim,
    )
    assert 2.5 * inputs.epsilon <= bound <= 3.5 * inputs.epsilon
