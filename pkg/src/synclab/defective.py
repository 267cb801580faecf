"""
Defective expanders: an (n, d, alpha)-expander G with a vertex partition
V = W + B where the core G[W] has minimum degree >= 2 (eps + alpha) d and the
defects B are few, independent, of bounded degree and never share a neighbour.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Optional

import numpy as np

from .certificates import expander_condition
from .errors import InputError
from .graph import Graph, VertexSet, degree_profile
from .logger import get_logger
from .reports import CertificateReport, Condition, compare

logger = get_logger("defective")

# everything except the condition_for_k_star and condition_for_d inequalities
STRUCTURAL_CONDITIONS = (
    "no_isolated_vertices", "expander", "core_min_degree", "delta_defined",
    "B1_small", "B2_independent", "B3_bounded_degree", "B4_one_B_neighbor",
    "alpha_range", "alpha_d_at_least_one", "eps_range",
)


@dataclass(frozen=True)
class DefectiveInput:
    G: Graph
    W: VertexSet
    B: VertexSet
    eps: float
    alpha: float
    d: float

    def __post_init__(self):
        n = self.G.n
        if self.W.n != n or self.B.n != n:
            raise InputError(f"partition universe does not match graph order {n}")
        if np.any(self.W.mask & self.B.mask):
            raise InputError("W and B must be disjoint")
        if not np.all(self.W.mask | self.B.mask):
            raise InputError("W and B must cover every vertex")
        if not self.d > 0:
            raise InputError(f"d must be positive, got {self.d}")

    @classmethod
    def from_defects(cls, G: Graph, B: VertexSet, eps: float, alpha: float, d: float) -> "DefectiveInput":
        return cls(G, B.complement(), B, eps, alpha, d)

    @cached_property
    def _profile(self):
        return degree_profile(self.G, self.W)

    @property
    def d_max(self) -> int:
        """Maximum degree of G[W]."""
        return self._profile.max_degree

    @property
    def core_min_degree(self) -> int:
        return self._profile.min_degree

    @property
    def ell(self) -> float:
        return 2.0 * (self.eps + self.alpha) * self.d

    @property
    def delta(self) -> Optional[float]:
        """eps d / (d_max - 2 eps d); None unless d_max > 2 eps d."""
        gap = self.d_max - 2.0 * self.eps * self.d
        if gap <= 0:
            return None
        return self.eps * self.d / gap

    @property
    def k_star(self) -> int:
        return math.floor(self.eps / (40.0 * self.alpha))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.G.n, "eps": self.eps, "alpha": self.alpha, "d": self.d,
            "b_size": len(self.B), "d_max": self.d_max, "ell": self.ell,
            "delta": self.delta, "k_star": self.k_star,
        }


def k_star_lhs(delta: float, d_max: float, exponent: float) -> float:
    """8 (1 + delta)(d_max + 1) / (delta^2 exp(exponent))."""
    try:
        return 8.0 * (1.0 + delta) * (d_max + 1.0) / (delta ** 2 * math.exp(exponent))
    except OverflowError:
        return 0.0


def check_defective(inp: DefectiveInput) -> CertificateReport:
    G, B = inp.G, inp.B
    n = G.n
    report = CertificateReport()

    isolated = int(np.count_nonzero(G.degrees == 0))
    report.add(compare("no_isolated_vertices", isolated, 0, "<=", "vertices of degree 0"))
    report.add(expander_condition(G, inp.d, inp.alpha))

    if len(inp.W):
        report.add(compare("core_min_degree", inp.core_min_degree, inp.ell, ">=",
                           "min degree of G[W] >= 2 (eps + alpha) d"))
    else:
        report.add(Condition("core_min_degree", None, inp.ell, False, "empty core"))

    delta = inp.delta
    report.add(Condition("delta_defined", inp.d_max, 2.0 * inp.eps * inp.d, delta is not None,
                         "d_max > 2 eps d" if delta is not None else "d_max <= 2 eps d; delta undefined"))

    # the proof consumes floor(eps / (40 alpha)) steps, so the floored exponent is the binding one
    if delta is None:
        report.add(Condition("condition_for_k_star", None, 1.0, False, "undefined without delta"))
        report.add(Condition("condition_for_k_star_displayed", None, 1.0, False, "undefined without delta"))
    else:
        log_step = math.log1p(delta)
        floored = k_star_lhs(delta, inp.d_max, inp.k_star * log_step)
        displayed = k_star_lhs(delta, inp.d_max, inp.eps / (40.0 * inp.alpha) * log_step)
        report.add(compare("condition_for_k_star", floored, 1.0, "<=",
                           f"8(1+delta)(d_max+1) / (delta^2 (1+delta)^k*) <= 1 with k*={inp.k_star}"))
        # floored exponent <= displayed exponent, so the floored form implies this one
        report.add(compare("condition_for_k_star_displayed", displayed, 1.0, "<=",
                           "exponent eps/(40 alpha) log(1+delta)"))

    denom = inp.d_max - 4.0 * inp.eps * inp.d
    if denom <= 0:
        report.add(Condition("condition_for_d", None, 1.0, False, "d_max - 4 eps d <= 0"))
    else:
        report.add(compare("condition_for_d", 8.0 / denom, 1.0, "<=", "8 / (d_max - 4 eps d) <= 1"))

    report.add(compare("B1_small", len(B), inp.alpha * n, "<=", "|B| <= alpha n"))
    if G.m:
        inside = int(np.count_nonzero(B.mask[G.edges[:, 0]] & B.mask[G.edges[:, 1]]))
    else:
        inside = 0
    report.add(compare("B2_independent", inside, 0, "<=", "edges with both ends in B"))
    b_degree = int(G.degrees[B.mask].max()) if len(B) else 0
    report.add(compare("B3_bounded_degree", b_degree, inp.d_max + 1, "<=", "max_{v in B} deg v <= d_max + 1"))
    worst = int(inp._profile.outside_neighbors.max()) if n else 0
    report.add(compare("B4_one_B_neighbor", worst, 1, "<=", "max_v |N(v) ∩ B| <= 1"))

    report.add(Condition("alpha_range", inp.alpha, [0.0, 0.2], 0.0 < inp.alpha < 0.2, "alpha in (0, 1/5)"))
    report.add(compare("alpha_d_at_least_one", inp.alpha * inp.d, 1.0, ">=", "alpha d >= 1"))
    report.add(Condition("eps_range", inp.eps, [0.0, 1.0], 0.0 < inp.eps < 1.0, "eps in (0, 1)"))

    logger.info(f"defective check n={n} |B|={len(B)}: {'pass' if report.overall else 'fail'} "
                f"(failed: {', '.join(report.failed()) or 'none'})")
    return report


def structure_holds(report: CertificateReport) -> bool:
    """True when every structural condition of a check_defective report passed."""
    return all(c.passed for c in report.conditions if c.name in STRUCTURAL_CONDITIONS)
