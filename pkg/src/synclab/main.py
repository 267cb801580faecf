import math
import re
import sys
from contextlib import contextmanager
from dataclasses import asdict
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import typer
from rich.console import Console
from rich.table import Table

from .certificates import ExpanderParams, check_expander, check_expander_full, check_thm_tech
from .config_loader import default_threads, get_config_loader
from .defective import DefectiveInput, check_defective
from .errors import InputError, NumericalError
from .experiments import (ExperimentConfig, records_frame, run_hitting_sync, run_simulate,
                          stable_search)
from .flow import FlowOptions
from .formats import format_edge_list, read_edge_list, read_phase_state, read_vertex_set, write_phase_state
from .graph import Graph, VertexSet, is_connected
from .logger import get_logger, log_config_info, set_debug_mode, setup_logger
from .output_manager import OutputManager, dumps_json
from .process import (check_defect_structure, check_regime, graph_at_m, graph_at_p, hitting_times,
                      sample_trace, trace_metadata, window)
from .reports import CertificateReport
from .spectral import laplacian_expander_bounds, spectral_norm_deviation
from .stability import ClassifyTolerances

app = typer.Typer(help="Synchronization experiments and certificates for Kuramoto oscillators on graphs",
                  no_args_is_help=True)
console = Console(stderr=True)
logger = get_logger("cli")

EXIT_CERT_FAIL = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
MODES = ("expander", "full", "tech", "defective")


@app.callback()
def main(
    verbose: bool = typer.Option(False, "-v", "--verbose", help="Debug logging on stderr"),
    log_file: bool = typer.Option(False, "--log-file", help="Also log to logs/synclab_YYYYMMDD.log"),
):
    """Kuramoto gradient flows, expander certificates and random-graph-process experiments."""
    setup_logger(level="DEBUG" if verbose else "WARNING", log_to_file=log_file)
    if verbose:
        set_debug_mode()


@contextmanager
def _exit_codes():
    """Map library errors to exit codes 2 (input) and 3 (numerical)."""
    try:
        yield
    except InputError as e:
        console.print(f"[red]Input error: {e}[/red]")
        raise typer.Exit(EXIT_INPUT)
    except NumericalError as e:
        console.print(f"[red]Numerical error: {e}[/red]")
        raise typer.Exit(EXIT_NUMERICAL)
    except OSError as e:
        console.print(f"[red]I/O error: {e}[/red]")
        raise typer.Exit(EXIT_INPUT)


def _command_config(command: str, config_file: Optional[Path]) -> Dict[str, Any]:
    config = get_config_loader().load_command_config(command, config_file)
    log_config_info(logger, config, command)
    return config


def _pick(flag, config: Dict[str, Any], key: str, default):
    """CLI flag beats configuration beats default."""
    if flag is not None:
        return flag
    return config.get(key, default)


def _flow_options(config: Dict[str, Any], grad_tol: Optional[float], max_time: Optional[float]) -> FlowOptions:
    section = dict(config.get("integrator", {}) or {})
    if grad_tol is not None:
        section["grad_tol"] = grad_tol
    if max_time is not None:
        section["max_time"] = max_time
    return FlowOptions.from_config(section)


def _threads(flag: Optional[int]) -> int:
    threads = flag if flag is not None else default_threads()
    if threads < 1:
        raise InputError(f"--threads must be positive, got {threads}")
    return threads


def _write_stdout(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


@app.command()
def simulate(
    graph_file: Path = typer.Argument(..., help="Graph in edge-list format"),
    state_file: Optional[Path] = typer.Option(None, "--state", help="Initial phases, one per line"),
    random_starts: Optional[int] = typer.Option(None, "--random-starts", help="Number of uniform random starts"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for random starts"),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads (default: $SYNCLAB_THREADS or 1)"),
    grad_tol: Optional[float] = typer.Option(None, "--grad-tol", help="Stop when ||grad E||_inf < grad-tol"),
    max_time: Optional[float] = typer.Option(None, "--max-time", help="Integration time budget"),
    as_json: bool = typer.Option(False, "--json", help="Print records as JSON instead of CSV"),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", help="Also write records.csv and run_meta.json here"),
    timings: bool = typer.Option(False, "--timings", help="Fill the wall_ms column"),
    config_file: Optional[Path] = typer.Option(None, "--config", help="YAML configuration file"),
):
    """Run the gradient flow from given or uniformly random initial states."""
    started = datetime.now()
    with _exit_codes():
        config = _command_config("simulate", config_file)
        G = read_edge_list(graph_file)
        opts = _flow_options(config, grad_tol, max_time)
        tols = ClassifyTolerances.from_config(config.get("tolerances", {}) or {})
        seed = int(_pick(seed, config, "seed", 0))
        n_threads = _threads(threads)

        states = None
        if state_file is not None:
            states = [read_phase_state(state_file)]
        else:
            random_starts = int(_pick(random_starts, config, "random_starts", 1))
        records = run_simulate(G, seed, starts=random_starts or 1, states=states, opts=opts,
                               tols=tols, threads=n_threads, timings=timings)

        frame = records_frame(records)
        if as_json:
            _write_stdout(dumps_json([asdict(r) for r in records]))
        else:
            _write_stdout(frame.to_csv(index=False, float_format="%.17g", lineterminator="\n"))
        if output_dir is not None:
            manager = OutputManager(str(output_dir))
            manager.write_csv("simulate", "records.csv", frame)
            manager.write_run_metadata("simulate", started, {"threads": n_threads, "graph": str(graph_file)})


def _certify_report(G: Graph, mode: str, d: Optional[float], alpha: Optional[float],
                    c_minus: Optional[float], c_plus: Optional[float], eps: Optional[float],
                    partition: Optional[Path], auto_partition: bool) -> CertificateReport:
    if d is None:
        if G.m == 0:
            raise InputError("graph has no edges; pass --d explicitly")
        d = G.average_degree

    if mode == "expander":
        return check_expander(G, d, 0.2 if alpha is None else alpha)

    if mode == "full":
        if c_minus is None or c_plus is None:
            raise InputError("--mode full needs --c-minus and --c-plus")
        return check_expander_full(G, ExpanderParams(G.n, d, 0.2 if alpha is None else alpha, c_minus, c_plus))

    if mode == "tech":
        if alpha is None:
            alpha = spectral_norm_deviation(G, d) / d
        if c_minus is None or c_plus is None:
            lo, hi = laplacian_expander_bounds(G, d)
            c_minus = lo if c_minus is None else c_minus
            c_plus = hi if c_plus is None else c_plus
        params = ExpanderParams(G.n, d, alpha, c_minus, c_plus)
        return check_expander_full(G, params).extend(check_thm_tech(params))

    if eps is None:
        raise InputError("--mode defective needs --eps")
    if partition is not None:
        B = read_vertex_set(partition, G.n)
    elif auto_partition:
        B = VertexSet(G.degrees <= 11.0 * eps * math.log(G.n))
    else:
        raise InputError("--mode defective needs --partition FILE or --auto-partition")
    if alpha is None:
        alpha = max(spectral_norm_deviation(G, d) / d, 1.0 / d)
    return check_defective(DefectiveInput.from_defects(G, B, eps, alpha, d))


@app.command()
def certify(
    graph_file: Path = typer.Argument(..., help="Graph in edge-list format"),
    mode: str = typer.Option("expander", "--mode", help="expander | full | tech | defective"),
    d: Optional[float] = typer.Option(None, "--d", help="Degree parameter (default: average degree)"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Expansion parameter"),
    c_minus: Optional[float] = typer.Option(None, "--c-minus", help="Lower Laplacian constant"),
    c_plus: Optional[float] = typer.Option(None, "--c-plus", help="Upper Laplacian constant"),
    eps: Optional[float] = typer.Option(None, "--eps", help="Defect threshold parameter"),
    partition: Optional[Path] = typer.Option(None, "--partition", help="File listing the defect set B"),
    auto_partition: bool = typer.Option(False, "--auto-partition", help="B = {v : deg v <= 11 eps log n}"),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", help="Also write certificate.json here"),
):
    """Check expander and defective-expander hypotheses; exit 1 when a condition fails."""
    if mode not in MODES:
        console.print(f"[red]Unknown mode '{mode}'; choose from {', '.join(MODES)}[/red]")
        raise typer.Exit(EXIT_INPUT)
    with _exit_codes():
        G = read_edge_list(graph_file)
        report = _certify_report(G, mode, d, alpha, c_minus, c_plus, eps, partition, auto_partition)
        payload = report.to_dict()
        _write_stdout(dumps_json(payload))
        if output_dir is not None:
            OutputManager(str(output_dir)).write_json("certify", "certificate.json", payload)
        logger.info(f"certify {mode}: {'pass' if report.overall else 'fail'}")
    if not report.overall:
        raise typer.Exit(EXIT_CERT_FAIL)


_AT_PATTERN = re.compile(r"^(tau)([+-]\d+)?$|^(m|p)=(.+)$|^(sigma|omega)$")


def _snapshot(t, at: str):
    """Resolve an --at expression to (graph, description)."""
    match = _AT_PATTERN.match(at.strip())
    if not match:
        raise InputError(f"cannot parse --at {at!r}; use tau, tau+K, tau-K, m=M, p=P, sigma or omega")
    if match.group(1):
        m = hitting_times(t).tau_edges + int(match.group(2) or 0)
        return graph_at_m(t, m), f"m={m}"
    if match.group(3) == "m":
        return graph_at_m(t, int(match.group(4))), f"m={match.group(4)}"
    if match.group(3) == "p":
        p = float(match.group(4))
        return graph_at_p(t, p), f"p={p:.17g}"
    sigma, omega = window(t.n)
    p = sigma if match.group(5) == "sigma" else min(1.0, omega)
    return graph_at_p(t, p), f"p={p:.17g}"


@app.command()
def process(
    n: int = typer.Option(..., "--n", help="Number of vertices"),
    seed: int = typer.Option(0, "--seed", help="Trace seed (64-bit unsigned)"),
    eps: float = typer.Option(0.01, "--eps", help="Defect threshold parameter"),
    at: Optional[str] = typer.Option(None, "--at", help="Dump a snapshot: tau, tau+K, tau-K, m=M, p=P, sigma, omega"),
    allow_disconnected: bool = typer.Option(False, "--allow-disconnected", help="Permit snapshots below tau"),
    checks: bool = typer.Option(False, "--checks", help="Add defect-structure and regime reports"),
    as_json: bool = typer.Option(False, "--json", help="With --at, print metadata JSON instead of the edge list"),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", help="Also write trace.json (and snapshot.edges)"),
):
    """Sample the coupled random graph process and report its hitting times."""
    with _exit_codes():
        t = sample_trace(n, seed)
        meta: Dict[str, Any] = trace_metadata(t, eps)
        if checks and n >= 3:
            meta["defect_structure"] = check_defect_structure(t, eps).to_dict()
            meta["regime"] = check_regime(t, eps).to_dict()

        snapshot_text = None
        if at is not None:
            G, where = _snapshot(t, at)
            connected = is_connected(G)
            if not connected and not allow_disconnected:
                raise InputError(f"snapshot at {at} ({where}) is disconnected; pass --allow-disconnected")
            meta["snapshot"] = {"at": at, "where": where, "m": G.m, "connected": connected}
            snapshot_text = format_edge_list(G)

        if snapshot_text is not None and not as_json:
            _write_stdout(snapshot_text)
        else:
            _write_stdout(dumps_json(meta))
        if output_dir is not None:
            manager = OutputManager(str(output_dir))
            manager.write_json("process", "trace.json", meta)
            if snapshot_text is not None:
                manager.get_output_path("process", "snapshot.edges").write_text(snapshot_text, encoding="utf-8")


def _cells_table(cells: List[Dict[str, Any]]) -> Table:
    table = Table(title="Synchronization fractions")
    table.add_column("n", style="cyan", justify="right")
    table.add_column("m probe", style="cyan")
    table.add_column("trials", justify="right")
    table.add_column("sync", justify="right")
    table.add_column("fraction", style="magenta", justify="right")
    table.add_column("Wilson 95%", justify="right")
    for c in cells:
        table.add_row(str(c["n"]), c["probe"], str(c["trials"]), str(c["synchronized"]),
                      f"{c['fraction']:.4f}", f"[{c['wilson_low']:.4f}, {c['wilson_high']:.4f}]")
    return table


@app.command()
def experiment(
    config_file: Optional[Path] = typer.Option(None, "--config", help="YAML file with an `experiment` section"),
    n_values: Optional[List[int]] = typer.Option(None, "--n", help="Vertex counts (repeatable)"),
    seeds: Optional[int] = typer.Option(None, "--seeds", help="Use trace seeds 0..SEEDS-1"),
    starts: Optional[int] = typer.Option(None, "--starts", help="Random starts per graph"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Experiment seed for the starts"),
    family: Optional[str] = typer.Option(None, "--family", help="process | tree"),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads (default: $SYNCLAB_THREADS or 1)"),
    output_dir: Path = typer.Option(Path("output"), "--output-dir", help="Directory for records.csv and summary.json"),
    as_json: bool = typer.Option(False, "--json", help="Print the summary JSON on stdout"),
    as_csv: bool = typer.Option(False, "--csv", help="Print the records CSV on stdout"),
    timings: bool = typer.Option(False, "--timings", help="Fill the wall_ms column"),
):
    """Hitting-time synchronization experiment over G(n, m) at m = tau and later."""
    started = datetime.now()
    with _exit_codes():
        section = dict(_command_config("experiment", config_file))
        for key, value in (("n_list", n_values or None), ("starts", starts), ("seed", seed), ("family", family)):
            if value is not None:
                section[key] = value
        if seeds is not None:
            section["seeds"] = seeds
        config = ExperimentConfig.from_config(section)
        n_threads = _threads(threads)

        records, summary = run_hitting_sync(config, threads=n_threads, timings=timings)
        frame = records_frame(records)
        manager = OutputManager(str(output_dir))
        manager.write_csv("experiment", "records.csv", frame)
        manager.write_json("experiment", "summary.json", summary)
        manager.write_run_metadata("experiment", started, {"threads": n_threads, "rows": len(records)})

        if as_csv:
            _write_stdout(frame.to_csv(index=False, float_format="%.17g", lineterminator="\n"))
        elif as_json:
            _write_stdout(dumps_json(summary))
        if summary["cells"]:
            console.print(_cells_table(summary["cells"]))


@app.command("stable-search")
def stable_search_command(
    graph_file: Path = typer.Argument(..., help="Graph in edge-list format"),
    starts: int = typer.Option(200, "--starts", help="Random starts"),
    seed: int = typer.Option(0, "--seed", help="Seed for the starts"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="alpha for the contradiction bound (default: measured)"),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads (default: $SYNCLAB_THREADS or 1)"),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", help="Also write catalog.json and states/state_NNN.txt here"),
    config_file: Optional[Path] = typer.Option(None, "--config", help="YAML configuration file"),
):
    """Catalog the distinct critical states reached by multistart gradient flow."""
    started = datetime.now()
    with _exit_codes():
        config = _command_config("stable-search", config_file)
        G = read_edge_list(graph_file)
        opts = _flow_options(config, None, None)
        tols = ClassifyTolerances.from_config(config.get("tolerances", {}) or {})
        n_threads = _threads(threads)
        catalog = stable_search(G, starts, seed, opts, tols, threads=n_threads, alpha=alpha)
        _write_stdout(dumps_json(catalog))
        if output_dir is not None:
            manager = OutputManager(str(output_dir))
            manager.write_json("stable-search", "catalog.json", catalog)
            for i, entry in enumerate(catalog["states"]):
                path = manager.get_output_path("stable-search", f"state_{i:03d}.txt", subfolder="states")
                write_phase_state(np.asarray(entry["angles"]), path)
            manager.write_run_metadata("stable-search", started, {"threads": n_threads})


@app.command()
def info():
    """Show information about the CLI tool"""
    console.print("[bold blue]synclab - Kuramoto synchronization lab[/bold blue]")
    console.print("\nGradient flows, stability classification, expander certificates and")
    console.print("hitting-time experiments on the random graph process.")
    console.print("\nCommands:")
    console.print("  • [cyan]synclab simulate GRAPH[/cyan] - Run flows from given or random states")
    console.print("  • [cyan]synclab certify GRAPH --mode MODE[/cyan] - Check expander hypotheses")
    console.print("  • [cyan]synclab process --n N --seed S[/cyan] - Hitting times of one process trace")
    console.print("  • [cyan]synclab experiment[/cyan] - Synchronization fractions at and after tau")
    console.print("  • [cyan]synclab stable-search GRAPH[/cyan] - Catalog of critical states")
    console.print("  • [cyan]synclab info[/cyan] - Show this information")
    console.print("\nExit codes: 0 pass, 1 certificate fail, 2 input error, 3 numerical error")


if __name__ == "__main__":
    app()
