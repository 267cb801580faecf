#!/usr/bin/env python3
"""
Tests for defective-expander inputs and their certificate
"""

import pytest

from synclab.defective import DefectiveInput, check_defective, k_star_lhs, structure_holds
from synclab.errors import InputError
from synclab.graph import VertexSet, circulant_graph, complete_graph, gnp_graph, path_graph
from synclab.spectral import spectral_norm_deviation

ORDER = [
    "no_isolated_vertices", "expander", "core_min_degree", "delta_defined",
    "condition_for_k_star", "condition_for_k_star_displayed", "condition_for_d",
    "B1_small", "B2_independent", "B3_bounded_degree", "B4_one_B_neighbor",
    "alpha_range", "alpha_d_at_least_one", "eps_range",
]


def test_synthetic_arithmetic():
    # 20-regular circulant: d_max = 20, eps d = 1, delta = 1/18
    G = circulant_graph(41, range(1, 11))
    inp = DefectiveInput.from_defects(G, VertexSet.empty(41), eps=0.05, alpha=0.1, d=20)
    assert inp.d_max == 20
    assert inp.delta == pytest.approx(1 / 18)
    report = check_defective(inp)
    assert [c.name for c in report.conditions] == ORDER
    assert report.get("condition_for_d").lhs == pytest.approx(0.5)
    assert report.get("condition_for_d").passed
    assert not report.get("expander").passed
    assert not report.overall


def test_adjacent_defects_fail_independence():
    G = path_graph(5)
    inp = DefectiveInput.from_defects(G, VertexSet.of(5, [1, 2]), eps=0.1, alpha=0.1, d=2)
    report = check_defective(inp)
    assert not report.get("B2_independent").passed
    assert report.get("B2_independent").lhs == 1
    assert report.get("B4_one_B_neighbor").passed


def test_two_defect_neighbours_fail_b4():
    G = path_graph(3)
    report = check_defective(DefectiveInput.from_defects(G, VertexSet.of(3, [0, 2]), 0.1, 0.1, 2))
    assert report.get("B2_independent").passed
    assert not report.get("B4_one_B_neighbor").passed


def test_empty_defect_set_passes_b_conditions():
    G = gnp_graph(60, 0.3, seed=4)
    inp = DefectiveInput.from_defects(G, VertexSet.empty(60), 0.05, 0.1, G.average_degree)
    report = check_defective(inp)
    for name in ("B1_small", "B2_independent", "B3_bounded_degree", "B4_one_B_neighbor"):
        assert report.get(name).passed


def test_undefined_delta():
    G = complete_graph(5)
    inp = DefectiveInput.from_defects(G, VertexSet.empty(5), 0.9, 0.1, 4)
    assert inp.delta is None
    report = check_defective(inp)
    assert not report.get("delta_defined").passed
    assert report.get("condition_for_k_star").detail == "undefined without delta"
    assert report.get("condition_for_d").detail == "d_max - 4 eps d <= 0"


def test_malformed_partitions():
    G = path_graph(4)
    with pytest.raises(InputError):
        DefectiveInput(G, VertexSet.of(4, [0, 1, 2]), VertexSet.of(4, [2, 3]), 0.1, 0.1, 2)
    with pytest.raises(InputError):
        DefectiveInput(G, VertexSet.of(4, [0, 1]), VertexSet.of(4, [3]), 0.1, 0.1, 2)
    with pytest.raises(InputError):
        DefectiveInput(G, VertexSet.of(5, [0]), VertexSet.of(5, [1, 2, 3, 4]), 0.1, 0.1, 2)
    with pytest.raises(InputError):
        DefectiveInput.from_defects(G, VertexSet.empty(4), 0.1, 0.1, 0)


def test_random_graph_structure():
    G = gnp_graph(200, 0.5, seed=0)
    d = G.average_degree
    alpha = spectral_norm_deviation(G, d) / d
    inp = DefectiveInput.from_defects(G, VertexSet.empty(200), 0.1, alpha, d)
    report = check_defective(inp)
    assert alpha < 0.2
    assert structure_holds(report)
    assert report.get("condition_for_d").passed
    # k* = floor(0.1 / (40 alpha)) = 0 makes the k* condition hopeless at this size
    assert inp.k_star == 0
    assert not report.get("condition_for_k_star").passed


def test_k_star_lhs_saturates():
    assert k_star_lhs(0.5, 10, 1e6) == 0.0
    assert k_star_lhs(1.0, 1.0, 0.0) == pytest.approx(32.0)


def test_to_dict():
    G = circulant_graph(41, range(1, 11))
    payload = DefectiveInput.from_defects(G, VertexSet.empty(41), 0.05, 0.1, 20).to_dict()
    assert payload["d_max"] == 20 and payload["b_size"] == 0
    assert payload["ell"] == pytest.approx(6.0)
