#!/usr/bin/env python3
"""
Tests for the adaptive gradient-flow integrator
"""

import numpy as np
import pytest

from synclab.errors import InputError
from synclab.experiments import derive_rng
from synclab.flow import FlowOptions, energy_is_monotone, flow
from synclab.graph import Graph, cycle_graph, gnp_graph, random_tree
from synclab.kuramoto import circular_distance, random_state, twisted_state


def test_tree_flows_synchronize():
    for tree_seed in range(4):
        tree = random_tree(12, tree_seed)
        for start in range(5):
            s0 = random_state(tree.n, derive_rng(0, tree.n, tree_seed, tree.m, start))
            result = flow(tree, s0)
            assert result.converged
            assert result.final_energy < 1e-8
            assert energy_is_monotone(result)


def test_twisted_state_is_a_fixed_point():
    s0 = twisted_state(6, 1)
    result = flow(cycle_graph(6), s0)
    assert result.converged and result.steps == 0
    assert float(np.max(circular_distance(result.final_state.theta, s0.theta))) < 1e-6


def test_constant_start_converges_immediately():
    result = flow(gnp_graph(10, 0.5, seed=1), np.full(10, 0.3))
    assert result.converged
    assert result.steps == 0
    assert result.final_energy == pytest.approx(0.0, abs=1e-15)


def test_edgeless_and_single_vertex_graphs():
    assert flow(Graph.empty(1), [1.0]).final_energy == 0.0
    result = flow(Graph.empty(3), [0.1, 2.0, -1.0])
    assert result.converged and result.final_energy == 0.0


def test_energy_trace_is_monotone_on_dense_graphs():
    rng = np.random.default_rng(21)
    for seed in range(5):
        G = gnp_graph(30, 0.3, seed)
        result = flow(G, random_state(G.n, rng), FlowOptions(sample_stride=1))
        assert energy_is_monotone(result)
        assert result.energy_trace[-1][0] == pytest.approx(result.time)
        assert result.final_energy <= result.energy_trace[0][1]


def test_time_budget_stops_unconverged_flow():
    G = cycle_graph(40)
    s0 = twisted_state(40, 1).theta + 0.3 * np.sin(np.arange(40))
    result = flow(G, s0, FlowOptions(max_time=0.5))
    assert not result.converged
    assert result.time == pytest.approx(0.5)


def test_flow_options_validation_and_config():
    with pytest.raises(InputError):
        FlowOptions(grad_tol=0)
    with pytest.raises(InputError):
        FlowOptions(sample_stride=0)
    opts = FlowOptions.from_config({"grad_tol": "1e-7", "max_time": 50})
    assert opts.grad_tol == 1e-7 and opts.max_time == 50.0 and opts.rtol == 1e-8


@pytest.mark.slow
def test_tree_synchronization_acceptance():
    for tree_seed in range(50):
        n = 2 + tree_seed % 49
        tree = random_tree(n, tree_seed)
        for start in range(200):
            s0 = random_state(n, derive_rng(1, n, tree_seed, tree.m, start))
            result = flow(tree, s0)
            assert result.final_energy < 1e-8
            assert energy_is_monotone(result)
