#!/usr/bin/env python3
"""
Tests for the expansion, kernel and stable-state inequality checkers
"""

import math

import numpy as np
import pytest

from synclab.defective import DefectiveInput
from synclab.errors import InputError
from synclab.graph import VertexSet, cycle_graph, gnp_graph
from synclab.kuramoto import PhaseState, normalize_rotation, twisted_state
from synclab.lemmas import (
    contradiction_bound_check, core_expansion_holds, expansion_values, kernel_function,
    pointwise_kernel_check, ratio_large_check, ratio_small_check, stability_inequality_check,
    verify_expansion_inequalities,
)
from synclab.spectral import spectral_norm_deviation


def _certified(seed: int, n: int = 200, eps: float = 0.1) -> DefectiveInput:
    G = gnp_graph(n, 0.5, seed)
    d = G.average_degree
    alpha = spectral_norm_deviation(G, d) / d
    return DefectiveInput.from_defects(G, VertexSet.empty(n), eps, alpha, d)


def test_kernel_values():
    assert kernel_function(np.pi / 2, 0.0) == pytest.approx(1.0)
    assert kernel_function(0.0, 0.0) == 0.0
    assert kernel_function(np.pi, np.pi) == pytest.approx(1.0)
    assert kernel_function(-0.3, 2.0) == pytest.approx(math.sin(0.3 - np.pi / 2))


def test_pointwise_kernel_inequality():
    audit = pointwise_kernel_check(100_000)
    assert audit.trials == 100_000
    assert audit.violations == 0 and audit.counterexample is None


def test_expansion_audits_on_certified_graph():
    inp = _certified(0)
    audits = verify_expansion_inequalities(inp, trials=250)
    assert set(audits) == {"xx_bound", "xy_expansion", "xv_bound", "xyc_to_xx"}
    for audit in audits.values():
        assert audit.hypotheses_ok and not audit.vacuous
        assert audit.trials == 250
        assert audit.violations == 0, audit.to_dict()


def test_empty_x_holds_everywhere():
    inp = _certified(1, n=60, eps=0.05)
    empty = VertexSet.empty(60)
    values = expansion_values(inp, empty, empty)
    assert all(values.values())
    assert core_expansion_holds(inp.G, inp.eps, inp.d, empty, empty)


def test_unmet_hypotheses_make_audits_vacuous():
    G = cycle_graph(12)
    inp = DefectiveInput.from_defects(G, VertexSet.empty(12), 0.05, 0.1, 2)
    audits = verify_expansion_inequalities(inp, trials=10)
    assert audits["xx_bound"].vacuous and audits["xx_bound"].trials == 0
    assert audits["xyc_to_xx"].detail == "hypotheses not met"
    # B3 and B4 hold trivially with B empty, so the degree bound is still sampled
    assert not audits["xv_bound"].vacuous
    assert audits["xv_bound"].violations == 0


def test_stability_chain_examples():
    for n, gamma in ((6, np.pi / 3), (8, np.pi / 4)):
        G = cycle_graph(n)
        chain = stability_inequality_check(G, normalize_rotation(twisted_state(n, 1)), np.pi / 2, gamma)
        assert chain.holds
        assert chain.e_beta_beta >= chain.e_half_beta


def test_stability_chain_with_empty_c_beta():
    chain = stability_inequality_check(cycle_graph(6), np.zeros(6), np.pi / 2, np.pi / 4)
    assert (chain.e_beta_beta, chain.e_half_beta, chain.e_beta_gamma_complement) == (0, 0, 0)
    assert chain.holds


def test_stability_chain_preconditions():
    C6 = cycle_graph(6)
    with pytest.raises(InputError):
        stability_inequality_check(C6, np.zeros(6), np.pi / 4, np.pi / 2)
    with pytest.raises(InputError):
        stability_inequality_check(C6, twisted_state(6, 2), np.pi / 2, np.pi / 4)
    with pytest.raises(InputError):
        stability_inequality_check(C6, PhaseState(np.linspace(0, 1, 6)), np.pi / 2, np.pi / 4)


def test_contradiction_bound_examples():
    assert contradiction_bound_check(np.zeros(10), np.pi / 2, 0.1).to_dict() == {
        "lhs": 0.0, "rhs": pytest.approx(0.25), "pass": True}

    theta = np.zeros(100)
    theta[:10] = np.pi
    state = PhaseState(theta)
    bound = contradiction_bound_check(state, np.pi / 2, 0.1)
    assert bound.lhs == pytest.approx(10.0)
    assert bound.rhs == pytest.approx(2.5)
    assert not bound.passed

    assert contradiction_bound_check(state, 1e-9, 0.1).passed


def test_ratio_checks_not_applicable_without_structure():
    G = cycle_graph(6)
    inp = DefectiveInput.from_defects(G, VertexSet.empty(6), 0.05, 0.1, 2)
    state = normalize_rotation(twisted_state(6, 1))
    for check in (ratio_small_check, ratio_large_check):
        result = check(G, state, inp, np.pi / 2, np.pi / 3)
        assert not result.applicable and result.holds
        assert "defective expander" in result.detail


def test_ratio_checks_reject_foreign_input():
    inp = DefectiveInput.from_defects(cycle_graph(6), VertexSet.empty(6), 0.05, 0.1, 2)
    with pytest.raises(InputError):
        ratio_small_check(cycle_graph(8), twisted_state(8, 1), inp, np.pi / 2, np.pi / 3)


def test_ratio_checks_with_empty_c_beta():
    inp = _certified(2, n=80, eps=0.05)
    result = ratio_small_check(inp.G, np.zeros(80), inp, np.pi / 2, np.pi / 4)
    assert not result.applicable
    assert "C_beta empty" in result.detail


@pytest.mark.slow
def test_expansion_audits_acceptance():
    total = 0
    for seed in range(50):
        inp = _certified(seed)
        for audit in verify_expansion_inequalities(inp, trials=500).values():
            assert audit.violations == 0
            total += audit.trials
    total += pointwise_kernel_check(100_000).trials
    assert total >= 100_000
