"""
Coupled random graph process.

Every pair e of K_n carries a weight xi_e ~ Unif[0, 1]. G_p keeps the pairs
with xi_e <= p and G(n, m) keeps the m lightest pairs, so all snapshots of one
trace are nested. Ties are broken by lexicographic pair order.

Weights are a pure function of (seed, pair index): pair k lives in chunk
k // CHUNK, whose values come from a Philox stream keyed by
SeedSequence([seed, chunk]). Large traces therefore never hold all n(n-1)/2
weights at once; they are scanned chunk by chunk below a cutoff.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np

from .errors import InputError
from .graph import Graph, VertexSet, degree_profile, induced_subgraph
from .logger import get_logger
from .reports import CertificateReport, Condition, compare
from .spectral import spectral_norm_deviation
from .union_find import DisjointSet

logger = get_logger("process")

CHUNK = 1 << 20
RNG_ID = "numpy.Philox4x64-10/SeedSequence([seed, chunk])/chunk=2^20"
MAX_SEED = (1 << 64) - 1

GChoice = Union[None, float, Callable[[int], float]]


def pair_total(n: int) -> int:
    return n * (n - 1) // 2


def pairs_from_index(n: int, k: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Invert the lexicographic enumeration of pairs (u, v), u < v."""
    k = np.asarray(k, dtype=np.int64)
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(np.maximum(b * b - 8.0 * k, 0.0))) / 2.0).astype(np.int64)

    def row_start(r):
        return r * (2 * n - r - 1) // 2

    # floating-point guard: move u by one where the estimate is off
    u = np.where(row_start(u) > k, u - 1, u)
    u = np.where(row_start(u + 1) <= k, u + 1, u)
    v = k - row_start(u) + u + 1
    return u, v


def _chunk_weights(seed: int, chunk: int, length: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))
    return gen.random(length)


@dataclass(frozen=True)
class ProcessTrace:
    n: int
    seed: int
    # holds only the widest scan so far: (cutoff, weights, indices)
    _scan: Dict[str, Tuple[float, np.ndarray, np.ndarray]] = field(
        default_factory=dict, repr=False, compare=False)

    @property
    def pairs(self) -> int:
        return pair_total(self.n)

    @property
    def rng_id(self) -> str:
        return RNG_ID

    def weights(self) -> np.ndarray:
        """All weights in pair-index order; memory grows as n^2."""
        N = self.pairs
        parts = [_chunk_weights(self.seed, c, min(CHUNK, N - c * CHUNK))
                 for c in range(math.ceil(N / CHUNK))]
        return np.concatenate(parts) if parts else np.zeros(0)

    def below(self, cutoff: float) -> Tuple[np.ndarray, np.ndarray]:
        """(weights, pair indices) with xi <= cutoff, sorted by (xi, index)."""
        cutoff = float(cutoff)
        widest = self._scan.get("widest")
        if widest is not None and cutoff <= widest[0]:
            _, w, k = widest
            end = int(np.searchsorted(w, cutoff, side="right"))
            return w[:end], k[:end]
        N = self.pairs
        ws, ks = [], []
        for c in range(math.ceil(N / CHUNK)):
            start = c * CHUNK
            w = _chunk_weights(self.seed, c, min(CHUNK, N - start))
            hit = np.flatnonzero(w <= cutoff)
            ws.append(w[hit])
            ks.append(hit.astype(np.int64) + start)
        w = np.concatenate(ws) if ws else np.zeros(0)
        k = np.concatenate(ks) if ks else np.zeros(0, dtype=np.int64)
        order = np.lexsort((k, w))
        result = (w[order], k[order])
        for arr in result:
            arr.setflags(write=False)
        self._scan["widest"] = (cutoff, *result)
        logger.debug(f"trace n={self.n} seed={self.seed}: {w.size} pairs below {cutoff:.6g}")
        return result

    def lightest(self, m: int) -> Tuple[np.ndarray, np.ndarray]:
        """The m lightest pairs in process order."""
        N = self.pairs
        if not 0 <= m <= N:
            raise InputError(f"m must lie in [0, {N}], got {m}")
        if m == 0:
            return np.zeros(0), np.zeros(0, dtype=np.int64)
        cutoff = min(1.0, 1.5 * m / N + 8.0 / N)
        while True:
            w, k = self.below(cutoff)
            if w.size >= m or cutoff >= 1.0:
                return w[:m], k[:m]
            cutoff = min(1.0, 2.0 * cutoff)

    def graph_from_indices(self, k: np.ndarray) -> Graph:
        u, v = pairs_from_index(self.n, k)
        return Graph.from_edges(self.n, np.stack([u, v], axis=1))


@dataclass(frozen=True)
class Thresholds:
    sigma: Optional[float]
    omega_time: Optional[float]
    lambda_hit: float
    tau_edges: int


def sample_trace(n: int, seed: int) -> ProcessTrace:
    if n < 2:
        raise InputError(f"the process needs n >= 2, got {n}")
    if not 0 <= seed <= MAX_SEED:
        raise InputError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return ProcessTrace(int(n), int(seed))


def graph_at_p(t: ProcessTrace, p: float) -> Graph:
    """G_p = pairs with xi_e <= p."""
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p}")
    _, k = t.below(p)
    return t.graph_from_indices(k)


def graph_at_m(t: ProcessTrace, m: int) -> Graph:
    """G(n, m) = the first m pairs in weight order."""
    _, k = t.lightest(m)
    return t.graph_from_indices(k)


def _default_g(n: int) -> float:
    return math.log(math.log(n))


def window(n: int, g: GChoice = None) -> Tuple[float, float]:
    """(sigma, omega) = ((log n - g(n)) / (n - 1), 5 log n / (n - 1)), natural logs."""
    if n < 3:
        raise InputError(f"the sigma/omega window needs n >= 3, got {n}")
    if g is None:
        g_value = _default_g(n)
    elif callable(g):
        g_value = float(g(n))
    else:
        g_value = float(g)
    if not g_value > 0:
        raise InputError(f"g(n) must be positive, got {g_value}")
    sigma = (math.log(n) - g_value) / (n - 1)
    if not sigma > 0:
        raise InputError(f"n={n} is too small for a positive sigma with g(n)={g_value:.4g}")
    omega = 5.0 * math.log(n) / (n - 1)
    return sigma, omega


def hitting_times(t: ProcessTrace, g: GChoice = None) -> Thresholds:
    """tau = first m with G(n, m) connected, lambda = its weight."""
    n = t.n
    sigma = omega = None
    if n >= 3:
        sigma, omega = window(n, g)

    ds = DisjointSet(n)
    cutoff = min(1.0, omega) if omega is not None else 1.0
    done = 0
    while True:
        w, k = t.below(cutoff)
        u, v = pairs_from_index(n, k[done:])
        for i, (a, b) in enumerate(zip(u.tolist(), v.tolist())):
            if ds.union(a, b) and ds.components == 1:
                tau = done + i + 1
                logger.info(f"trace n={n} seed={t.seed}: connected at tau={tau}, lambda={w[tau - 1]:.6g}")
                return Thresholds(sigma, omega, float(w[tau - 1]), tau)
        done = w.size
        if cutoff >= 1.0:
            raise AssertionError("K_n must be connected")
        cutoff = min(1.0, 2.0 * cutoff)


def partition_bw(t: ProcessTrace, eps: float, g: GChoice = None) -> Tuple[VertexSet, VertexSet]:
    """B = {v : deg_{G_sigma}(v) <= 11 eps log n}, W = V minus B."""
    if not 0.0 < eps < 1.0:
        raise InputError(f"eps must lie in (0, 1), got {eps}")
    sigma, _ = window(t.n, g)
    degrees = graph_at_p(t, sigma).degrees
    B = VertexSet(degrees <= 11.0 * eps * math.log(t.n))
    return B, B.complement()


def defect_size_bound(n: int, eps: float) -> float:
    """n^{22 eps log(e / (11 eps))}."""
    return n ** (22.0 * eps * math.log(math.e / (11.0 * eps)))


def check_defect_structure(t: ProcessTrace, eps: float, g: GChoice = None) -> CertificateReport:
    """The four high-probability conclusions about B, evaluated on one trace."""
    n = t.n
    sigma, omega = window(n, g)
    th = hitting_times(t, g)
    B, _ = partition_bw(t, eps, g)
    G_omega = graph_at_p(t, min(1.0, omega))
    report = CertificateReport()

    report.add(Condition("lambda_in_window", th.lambda_hit, [sigma, omega],
                         sigma < th.lambda_hit < omega, "sigma < lambda < omega"))
    report.add(compare("defect_size", len(B), defect_size_bound(n, eps), "<",
                       "|B| < n^{22 eps log(e/(11 eps))}"))
    inside = int(np.count_nonzero(B.mask[G_omega.edges[:, 0]] & B.mask[G_omega.edges[:, 1]]))
    report.add(compare("no_edge_inside_B", inside, 0, "<=", "edges of G_omega with both ends in B"))
    b_neighbors = degree_profile(G_omega, B.complement()).outside_neighbors
    worst = int(b_neighbors.max()) if b_neighbors.size else 0
    report.add(compare("at_most_one_B_neighbor", worst, 1, "<=", "max_v |N(v) ∩ B| in G_omega"))
    return report


def regime_alpha(n: int) -> float:
    return 20.0 / math.sqrt(math.log(n))


def check_regime(t: ProcessTrace, eps: float, probes: int = 3, g: GChoice = None) -> CertificateReport:
    """Degree and expansion quantities required between sigma and omega.

    With alpha = 20 (log n)^{-1/2} these only pass for astronomically large n;
    at desk scale the report documents by how much they miss.
    """
    n = t.n
    sigma, omega = window(n, g)
    alpha = regime_alpha(n)
    log_n = math.log(n)
    _, W = partition_bw(t, eps, g)
    report = CertificateReport()

    G_omega = graph_at_p(t, min(1.0, omega))
    report.add(compare("max_degree_G_omega", G_omega.max_degree, 20.0 * log_n, "<=",
                       "max degree of G_omega <= 20 log n"))
    if len(W):
        core = induced_subgraph(graph_at_p(t, sigma), W).graph
        core_min = core.min_degree
    else:
        core_min = 0
    report.add(compare("min_degree_core_G_sigma", core_min, 10.0 * (eps + alpha) * log_n, ">=",
                       "min degree of G_sigma[W] >= 10 (eps + alpha) log n"))
    for p in np.linspace(sigma, min(1.0, omega), probes + 2)[1:-1]:
        d = p * n
        G_p = graph_at_p(t, float(p))
        dev = spectral_norm_deviation(G_p, d)
        report.add(compare(f"expander_at_p={p:.6g}", dev, alpha * d, "<=",
                           f"||A - (d/n)J|| <= alpha d with d = pn, alpha = {alpha:.4g}"))
    return report


def trace_metadata(t: ProcessTrace, eps: float, g: GChoice = None) -> Dict[str, object]:
    th = hitting_times(t, g)
    b_size = None
    if t.n >= 3:
        B, _ = partition_bw(t, eps, g)
        b_size = len(B)
    return {
        "n": t.n,
        "seed": t.seed,
        "rng_id": t.rng_id,
        "tau_edges": th.tau_edges,
        "lambda_hit": th.lambda_hit,
        "sigma": th.sigma,
        "omega_time": th.omega_time,
        "b_size": b_size,
        "eps": eps,
        "g": "log log n" if g is None else (g if isinstance(g, (int, float)) else getattr(g, "__name__", "custom")),
    }
