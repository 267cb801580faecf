#!/usr/bin/env python3
"""
Tests for the edge-list, phase-state and vertex-set text formats
"""

import io

import numpy as np
import pytest

from synclab.errors import InputError
from synclab.formats import (
    format_edge_list, parse_edge_list, read_edge_list, read_phase_state,
    read_vertex_set, write_edge_list, write_phase_state,
)
from synclab.graph import cycle_graph, random_tree


def test_parse_edge_list_with_comments():
    text = "# triangle plus a leaf\n4 4\n0 1\n1 2\n\n0 2  # closing edge\n2 3\n"
    G = parse_edge_list(text)
    assert G.n == 4 and G.m == 4
    assert G.degrees.tolist() == [2, 2, 3, 1]


def test_single_vertex_graph():
    G = parse_edge_list("1 0\n")
    assert G.n == 1 and G.m == 0


@pytest.mark.parametrize("text", [
    "",
    "3\n",
    "3 1\n0 1\n1 2\n",
    "3 1\n1 0\n",
    "3 1\n0 3\n",
    "3 2\n0 1\n0 1\n",
    "3 1\nzero one\n",
])
def test_parse_edge_list_rejects_malformed(text):
    with pytest.raises(InputError):
        parse_edge_list(text)


def test_edge_list_file_round_trip(tmp_path):
    G = random_tree(12, seed=5)
    path = tmp_path / "tree.edges"
    write_edge_list(G, path)
    assert read_edge_list(path) == G
    assert path.read_text().splitlines()[0] == "12 11"


def test_format_is_sorted_and_stable():
    text = format_edge_list(cycle_graph(4))
    assert text == "4 4\n0 1\n0 3\n1 2\n2 3\n"


def test_missing_file_is_input_error(tmp_path):
    with pytest.raises(InputError):
        read_edge_list(tmp_path / "absent.edges")


def test_phase_state_keeps_full_precision():
    theta = np.array([0.1, -np.pi / 3, 3.0000000000000004])
    buffer = io.StringIO()
    write_phase_state(theta, buffer)
    buffer.seek(0)
    np.testing.assert_array_equal(read_phase_state(buffer), theta)


def test_phase_state_rejects_bad_values():
    with pytest.raises(InputError):
        read_phase_state(io.StringIO("0.5\nnan\n"))
    with pytest.raises(InputError):
        read_phase_state(io.StringIO("# nothing\n"))
    with pytest.raises(InputError):
        read_phase_state(io.StringIO("abc\n"))


def test_vertex_set_file(tmp_path):
    path = tmp_path / "b.txt"
    path.write_text("# defects\n3\n0\n")
    B = read_vertex_set(path, 5)
    assert B.members.tolist() == [0, 3]
    path.write_text("")
    assert len(read_vertex_set(path, 5)) == 0
    path.write_text("9\n")
    with pytest.raises(InputError):
        read_vertex_set(path, 5)
