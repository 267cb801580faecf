#!/usr/bin/env python3
"""
End-to-end tests for the synclab command line
"""

import json

import pytest
from typer.testing import CliRunner

from synclab.formats import format_edge_list, parse_edge_list, read_phase_state
from synclab.graph import complete_graph, cycle_graph, is_connected, random_tree
from synclab.main import app

runner = CliRunner()


@pytest.fixture
def graph_file(tmp_path):
    def write(G, name="graph.edges"):
        path = tmp_path / name
        path.write_text(format_edge_list(G), encoding="utf-8")
        return str(path)
    return write


def test_certify_expander_passes(graph_file):
    result = runner.invoke(app, ["certify", graph_file(complete_graph(50))])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["overall"] is True
    assert payload["conditions"][0]["name"] == "expander"


def test_certify_failure_exit_code(graph_file, tmp_path):
    result = runner.invoke(app, ["certify", graph_file(cycle_graph(100)), "--alpha", "0.9",
                                 "--output-dir", str(tmp_path / "out")])
    assert result.exit_code == 1
    saved = json.loads((tmp_path / "out" / "certify" / "certificate.json").read_text(encoding="utf-8"))
    assert saved == json.loads(result.stdout)
    assert saved["overall"] is False


def test_certify_defective_with_partition_file(graph_file, tmp_path):
    partition = tmp_path / "B.txt"
    partition.write_text("# no defects\n", encoding="utf-8")
    result = runner.invoke(app, ["certify", graph_file(complete_graph(5)), "--mode", "defective",
                                 "--eps", "0.5", "--partition", str(partition)])
    assert result.exit_code == 1
    conditions = {c["name"]: c for c in json.loads(result.stdout)["conditions"]}
    assert conditions["condition_for_d"]["pass"] is False
    assert conditions["B1_small"]["pass"] is True


def test_certify_input_errors(graph_file, tmp_path):
    assert runner.invoke(app, ["certify", str(tmp_path / "missing.edges")]).exit_code == 2
    assert runner.invoke(app, ["certify", graph_file(complete_graph(4)), "--mode", "spectral"]).exit_code == 2
    assert runner.invoke(app, ["certify", graph_file(complete_graph(4)), "--mode", "defective"]).exit_code == 2
    bad = tmp_path / "bad.edges"
    bad.write_text("3 1\n0 0\n", encoding="utf-8")
    assert runner.invoke(app, ["certify", str(bad)]).exit_code == 2


def test_process_two_vertices():
    result = runner.invoke(app, ["process", "--n", "2", "--seed", "0"])
    assert result.exit_code == 0
    meta = json.loads(result.stdout)
    assert meta["tau_edges"] == 1 and meta["sigma"] is None


def test_process_is_reproducible():
    first = runner.invoke(app, ["process", "--n", "1000", "--seed", "7"])
    second = runner.invoke(app, ["process", "--n", "1000", "--seed", "7"])
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    meta = json.loads(first.stdout)
    assert meta["n"] == 1000 and meta["seed"] == 7


def test_simulate_is_reproducible(graph_file, tmp_path):
    graph = graph_file(cycle_graph(12))
    runs = []
    for name in ("first", "second"):
        result = runner.invoke(app, ["simulate", graph, "--random-starts", "8", "--seed", "5",
                                     "--threads", "2", "--output-dir", str(tmp_path / name)])
        assert result.exit_code == 0
        runs.append((result.stdout, (tmp_path / name / "simulate" / "records.csv").read_bytes()))
    assert runs[0] == runs[1]
    assert runs[0][1].decode("utf-8") == runs[0][0]


def test_experiment_files_are_reproducible(tmp_path):
    for name, threads in (("first", "1"), ("second", "3")):
        result = runner.invoke(app, ["experiment", "--n", "20", "--seeds", "2", "--starts", "3", "--seed", "4",
                                     "--threads", threads, "--output-dir", str(tmp_path / name)])
        assert result.exit_code == 0
    for filename in ("records.csv", "summary.json"):
        first = (tmp_path / "first" / "experiment" / filename).read_bytes()
        assert first == (tmp_path / "second" / "experiment" / filename).read_bytes()


def test_process_rejects_tiny_n():
    assert runner.invoke(app, ["process", "--n", "1"]).exit_code == 2


def test_process_snapshot_at_tau(tmp_path):
    result = runner.invoke(app, ["process", "--n", "50", "--seed", "3", "--at", "tau",
                                 "--output-dir", str(tmp_path)])
    assert result.exit_code == 0
    G = parse_edge_list(result.stdout)
    assert G.n == 50 and is_connected(G)
    assert (tmp_path / "process" / "snapshot.edges").read_text(encoding="utf-8") == result.stdout
    assert json.loads((tmp_path / "process" / "trace.json").read_text(encoding="utf-8"))["tau_edges"] == G.m


def test_process_disconnected_snapshot_needs_flag():
    assert runner.invoke(app, ["process", "--n", "50", "--seed", "3", "--at", "tau-1"]).exit_code == 2
    result = runner.invoke(app, ["process", "--n", "50", "--seed", "3", "--at", "tau-1",
                                 "--allow-disconnected", "--json"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["snapshot"]["connected"] is False
    assert runner.invoke(app, ["process", "--n", "50", "--at", "later"]).exit_code == 2


def test_simulate_random_starts_on_tree(graph_file):
    result = runner.invoke(app, ["simulate", graph_file(random_tree(12, seed=2)), "--random-starts", "5",
                                 "--seed", "1"])
    assert result.exit_code == 0
    lines = result.stdout.strip().splitlines()
    assert len(lines) == 6
    assert lines[0].startswith("n,seed,m,tau,start")
    assert all("fully_synchronized" in line for line in lines[1:])


def test_simulate_state_file_and_single_vertex(graph_file, tmp_path):
    state = tmp_path / "state.txt"
    state.write_text("\n".join(str(2 * 3.141592653589793 * j / 6) for j in range(6)) + "\n", encoding="utf-8")
    result = runner.invoke(app, ["simulate", graph_file(cycle_graph(6)), "--state", str(state), "--json"])
    assert result.exit_code == 0
    records = json.loads(result.stdout)
    assert records[0]["classification"] == "nontrivial_stable"

    single = tmp_path / "single.edges"
    single.write_text("1 0\n", encoding="utf-8")
    assert runner.invoke(app, ["simulate", str(single)]).exit_code == 0


def test_experiment_with_no_seeds(tmp_path):
    result = runner.invoke(app, ["experiment", "--seeds", "0", "--output-dir", str(tmp_path)])
    assert result.exit_code == 0
    lines = (tmp_path / "experiment" / "records.csv").read_text(encoding="utf-8").splitlines()
    assert lines == ["n,seed,m,tau,start,converged,final_energy,final_grad_norm,classification,wall_ms"]
    summary = json.loads((tmp_path / "experiment" / "summary.json").read_text(encoding="utf-8"))
    assert summary["cells"] == []
    assert (tmp_path / "experiment" / "run_meta.json").exists()


def test_experiment_tree_family(tmp_path):
    result = runner.invoke(app, ["experiment", "--family", "tree", "--n", "20", "--seeds", "2",
                                 "--starts", "3", "--output-dir", str(tmp_path), "--json"])
    assert result.exit_code == 0
    summary = json.loads(result.stdout)
    assert [(c["probe"], c["trials"], c["fraction"]) for c in summary["cells"]] == [("tau", 6, 1.0)]


def test_experiment_bad_family(tmp_path):
    result = runner.invoke(app, ["experiment", "--family", "lattice", "--output-dir", str(tmp_path)])
    assert result.exit_code == 2


def test_stable_search_command(graph_file):
    result = runner.invoke(app, ["stable-search", graph_file(random_tree(6, seed=0)), "--starts", "10"])
    assert result.exit_code == 0
    catalog = json.loads(result.stdout)
    assert catalog["starts"] == 10 and len(catalog["states"]) == 1


def test_stable_search_writes_catalogued_states(graph_file, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(app, ["stable-search", graph_file(cycle_graph(6)), "--starts", "40",
                                 "--output-dir", str(out)])
    assert result.exit_code == 0
    catalog = json.loads(result.stdout)
    written = sorted((out / "stable-search" / "states").glob("state_*.txt"))
    assert len(written) == len(catalog["states"]) >= 1
    for path, entry in zip(written, catalog["states"]):
        assert read_phase_state(path).tolist() == entry["angles"]


def test_info():
    result = runner.invoke(app, ["info"])
    assert result.exit_code == 0
    assert "synclab" in result.output
