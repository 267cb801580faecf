"""
Text formats used at the I/O boundary.

Edge list: first line "n m", then m lines "u v" with 0 <= u < v < n. Blank
lines and "#" comments are ignored.
Phase state: one angle per line, radians, 17 significant digits.
Vertex set: one vertex id per line (comments allowed), used for B-partitions.
"""

import sys
from pathlib import Path
from typing import IO, Iterator, List, Optional, Union

import numpy as np

from .errors import InputError
from .graph import Graph, VertexSet

PathOrStream = Union[str, Path, IO[str]]


def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _read_text(source: PathOrStream) -> str:
    if hasattr(source, "read"):
        return source.read()
    try:
        return Path(source).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read {source}: {e}") from e


def _write_text(target: Optional[PathOrStream], text: str) -> None:
    if target is None:
        sys.stdout.write(text)
    elif hasattr(target, "write"):
        target.write(text)
    else:
        try:
            Path(target).write_text(text, encoding="utf-8")
        except OSError as e:
            raise InputError(f"Cannot write {target}: {e}") from e


def parse_edge_list(text: str) -> Graph:
    lines = list(_content_lines(text))
    if not lines:
        raise InputError("edge list is empty: expected a header line 'n m'")
    header_no, header = lines[0]
    parts = header.split()
    try:
        n, m = (int(x) for x in parts)
    except ValueError:
        raise InputError(f"line {header_no}: header must be 'n m', got {header!r}") from None
    if n < 1 or m < 0:
        raise InputError(f"line {header_no}: need n >= 1 and m >= 0, got n={n}, m={m}")

    body = lines[1:]
    if len(body) != m:
        raise InputError(f"header announces {m} edges but {len(body)} edge lines follow")
    edges: List[tuple[int, int]] = []
    for lineno, line in body:
        try:
            u, v = (int(x) for x in line.split())
        except ValueError:
            raise InputError(f"line {lineno}: expected 'u v', got {line!r}") from None
        if not 0 <= u < v < n:
            raise InputError(f"line {lineno}: need 0 <= u < v < {n}, got {u} {v}")
        edges.append((u, v))
    if len(set(edges)) != len(edges):
        raise InputError("edge list contains duplicate edges")
    return Graph.from_edges(n, edges)


def read_edge_list(source: PathOrStream) -> Graph:
    return parse_edge_list(_read_text(source))


def format_edge_list(G: Graph) -> str:
    rows = [f"{G.n} {G.m}"]
    rows.extend(f"{int(u)} {int(v)}" for u, v in G.edges)
    return "\n".join(rows) + "\n"


def write_edge_list(G: Graph, target: Optional[PathOrStream] = None) -> None:
    _write_text(target, format_edge_list(G))


def read_phase_state(source: PathOrStream) -> np.ndarray:
    values = []
    for lineno, line in _content_lines(_read_text(source)):
        try:
            values.append(float(line))
        except ValueError:
            raise InputError(f"line {lineno}: expected an angle in radians, got {line!r}") from None
    if not values:
        raise InputError("phase state file holds no angles")
    theta = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(theta)):
        raise InputError("phase state contains non-finite angles")
    return theta


def format_phase_state(theta: np.ndarray) -> str:
    return "".join(f"{float(x):.17g}\n" for x in theta)


def write_phase_state(theta: np.ndarray, target: Optional[PathOrStream] = None) -> None:
    _write_text(target, format_phase_state(theta))


def read_vertex_set(source: PathOrStream, n: int) -> VertexSet:
    ids = []
    for lineno, line in _content_lines(_read_text(source)):
        try:
            ids.append(int(line))
        except ValueError:
            raise InputError(f"line {lineno}: expected a vertex id, got {line!r}") from None
    return VertexSet.of(n, ids)
