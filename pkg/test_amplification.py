#!/usr/bin/env python3
"""
Tests for the angle sequence of the amplification argument
"""

import math

import numpy as np
import pytest

from synclab.amplification import (
    amplification_trace, condition_for_k_star_holds, sample_valid_pairs, worst_case_steps,
)
from synclab.errors import InputError
from synclab.kuramoto import PhaseState


def test_single_phase1_step():
    trace = amplification_trace(0.5, 0.01, d=10, d_max=20)
    assert trace.k_star == 1
    assert trace.delta == pytest.approx(0.5)
    assert len(trace.betas_phase1) == 2
    assert trace.phase1_drop == pytest.approx(math.asin(0.4))
    assert trace.phase1_drop == pytest.approx(0.4115, abs=1e-4)
    assert trace.checks.get("phase1_drop").passed


def test_empty_phase1():
    trace = amplification_trace(0.5, 0.1, d=10, d_max=20)
    assert trace.k_star == 0
    assert trace.betas_phase1 == [math.pi / 2]
    assert trace.beta_star == math.pi / 2


def test_worst_case_schedule_closes_the_argument():
    # delta = 0.5, k* = 16: 8 * 1.5 * 11 = 132 <= 0.25 * 1.5^16
    eps, alpha, d, d_max = 0.5, 0.5 / 650, 5, 10
    trace = amplification_trace(eps, alpha, d, d_max)
    assert trace.k_star == 16 and trace.delta == pytest.approx(0.5)
    assert condition_for_k_star_holds(trace.delta, d_max, trace.k_star)
    assert trace.undefined_at is None
    assert trace.phase2_drop <= math.pi / 16 + 1e-12
    assert trace.beta_M >= 3 * math.pi / 16 - 1e-12
    assert trace.checks.overall
    assert trace.case1_contradiction and trace.case2_contradiction
    assert trace.drops == sorted(trace.drops, reverse=True)


def test_n_limits_phase2():
    assert worst_case_steps(0.5, 0, 1000) == 16
    assert worst_case_steps(0.5, 16, 1000) == 0
    assert worst_case_steps(0.5, 3, None) is None
    trace = amplification_trace(0.5, 0.5 / 650, 5, 10, n=10**6)
    assert len(trace.betas_phase2) == worst_case_steps(0.5, 16, 10**6)


def test_undefined_sequence_is_reported():
    trace = amplification_trace(0.5, 0.1, 10, 20, ratio_schedule=[0.5, 0.25])
    assert trace.undefined_at == 1
    assert not trace.checks.get("phase2_drop").passed
    assert trace.checks.get("beta_M").detail == "sequence undefined at k=1"
    assert trace.case2_contradiction is None
    assert trace.to_dict()["checks"]["overall"] is False


def test_explicit_ratio_schedule():
    trace = amplification_trace(0.5, 0.1, 10, 20, ratio_schedule=[0.01, 0.005])
    coeff = 21 / 0.5
    assert trace.drops == pytest.approx([math.asin(coeff * 0.01), math.asin(coeff * 0.005)])
    assert trace.beta_M == pytest.approx(math.pi / 2 - sum(trace.drops))


def test_state_schedule_with_empty_half_circle():
    trace = amplification_trace(0.5, 0.1, 10, 20, ratio_schedule=PhaseState(np.zeros(10)))
    assert trace.betas_phase2 == [] and trace.undefined_at is None


def test_invalid_parameters():
    with pytest.raises(InputError):
        amplification_trace(0.5, 0.2, 10, 20)
    with pytest.raises(InputError):
        amplification_trace(1.0, 0.1, 10, 20)
    with pytest.raises(InputError):
        amplification_trace(0.5, 0.1, 10, 10)


def test_phase1_drop_bound_on_random_pairs():
    pairs = sample_valid_pairs(10_000, np.random.Generator(np.random.Philox(8)))
    for eps, alpha in pairs:
        trace = amplification_trace(float(eps), float(alpha), 10, 20, n=1000)
        assert trace.phase1_drop <= math.pi / 4 + 1e-12


def test_phase2_bound_whenever_k_star_condition_holds():
    rng = np.random.Generator(np.random.Philox(9))
    checked = 0
    for _ in range(2000):
        eps = float(rng.uniform(0.05, 0.95))
        alpha = float(10 ** rng.uniform(-6, math.log10(0.2)))
        d, d_max = 10.0, float(rng.integers(21, 200))
        delta = eps * d / (d_max - 2 * eps * d)
        k_star = math.floor(eps / (40 * alpha))
        if not condition_for_k_star_holds(delta, d_max, k_star):
            continue
        trace = amplification_trace(eps, alpha, d, d_max)
        assert trace.phase2_drop <= math.pi / 16 + 1e-12
        assert trace.beta_M >= 3 * math.pi / 16 - 1e-12
        checked += 1
    assert checked >= 100
