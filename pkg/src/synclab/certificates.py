"""
Spectral expander certificates.

    (n, d, alpha)-expander:           ||A - (d/n) J|| <= alpha d
    (n, d, alpha, c-, c+)-expander:   c- d I <= D - A - d I + (d/n) J <= c+ d I

check_thm_tech evaluates the sufficient condition for global synchronization
of (n, d, alpha, c-, c+)-expanders.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

from .errors import InputError
from .graph import Graph, VertexSet, induced_subgraph
from .logger import get_logger
from .reports import CertificateReport, Condition, compare
from .spectral import laplacian_expander_bounds, spectral_norm_deviation

logger = get_logger("certificates")

SPECTRAL_GUARD = 1e-8


@dataclass
class ExpanderParams:
    n: int
    d: float
    alpha: float
    c_minus: Optional[float] = None
    c_plus: Optional[float] = None

    def __post_init__(self):
        if not self.d > 0:
            raise InputError(f"d must be positive, got {self.d}")
        if not self.alpha > 0:
            raise InputError(f"alpha must be positive, got {self.alpha}")
        if self.c_minus is not None and self.c_plus is not None and self.c_minus > self.c_plus:
            raise InputError(f"c_minus={self.c_minus} exceeds c_plus={self.c_plus}")

    @property
    def has_bounds(self) -> bool:
        return self.c_minus is not None and self.c_plus is not None

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "d": self.d, "alpha": self.alpha,
                "c_minus": self.c_minus, "c_plus": self.c_plus}


def expander_condition(G: Graph, d: float, alpha: float, name: str = "expander") -> Condition:
    deviation = spectral_norm_deviation(G, d)
    return compare(name, deviation, alpha * d, "<=",
                   f"||A - (d/n)J|| <= alpha d (d={d:g}, alpha={alpha:g})", guard=SPECTRAL_GUARD)


def check_expander(G: Graph, d: float, alpha: float) -> CertificateReport:
    if not d > 0 or not alpha > 0:
        raise InputError(f"d and alpha must be positive, got d={d}, alpha={alpha}")
    report = CertificateReport([expander_condition(G, d, alpha)])
    logger.info(f"expander check on n={G.n}: {'pass' if report.overall else 'fail'}")
    return report


def check_expander_full(G: Graph, p: ExpanderParams) -> CertificateReport:
    if not p.has_bounds:
        raise InputError("full expander check needs c_minus and c_plus")
    if p.n != G.n:
        raise InputError(f"parameters are for n={p.n} but the graph has {G.n} vertices")
    report = check_expander(G, p.d, p.alpha)
    lo, hi = laplacian_expander_bounds(G, p.d)
    report.add(compare("laplacian_lower", lo * p.d, p.c_minus * p.d, ">=",
                       "lambda_min(D - A - dI + (d/n)J) >= c_minus d", guard=SPECTRAL_GUARD))
    report.add(compare("laplacian_upper", hi * p.d, p.c_plus * p.d, "<=",
                       "lambda_max(D - A - dI + (d/n)J) <= c_plus d", guard=SPECTRAL_GUARD))
    report.add(compare("min_degree_consequence", G.min_degree, (1.0 + p.c_minus) * p.d, ">=",
                       "min degree >= (1 + c_minus) d; the diagonal of D - A - dI + (d/n)J "
                       "only forces (1 + c_minus) d - d/n"))
    return report


def tech_branches(alpha: float, c_minus: float, c_plus: float) -> tuple[Optional[float], Optional[float]]:
    """Both terms of the max; None where a denominator vanishes."""
    den1 = (1.0 + c_minus) ** 2
    den2 = (1.0 + c_minus) * (1.0 + 5.0 * c_plus - 4.0 * c_minus)
    branch1 = 64.0 * alpha * (1.0 + 2.0 * c_plus - c_minus) / den1 if den1 != 0 else None
    log_arg = (1.0 + c_plus + alpha) / (2.0 * alpha)
    if den2 == 0 or log_arg <= 0:
        branch2 = None
    else:
        branch2 = 64.0 * alpha * (1.0 + c_plus) * math.log(log_arg) / den2
    return branch1, branch2


def check_thm_tech(p: ExpanderParams) -> CertificateReport:
    if not p.has_bounds:
        raise InputError("the synchronization condition needs c_minus and c_plus")
    report = CertificateReport()
    report.add(compare("c_minus_above_minus_one", p.c_minus, -1.0, ">", "c_minus > -1", guard=0.0))
    report.add(compare("alpha_at_most_one_fifth", p.alpha, 0.2, "<=", "alpha <= 1/5", guard=0.0))

    branch1, branch2 = tech_branches(p.alpha, p.c_minus, p.c_plus)
    for name, value in (("tech_branch_1", branch1), ("tech_branch_2", branch2)):
        if value is None:
            report.add(Condition(name, None, 1.0, False, "denominator-zero"))
        else:
            report.add(compare(name, value, 1.0, "<", "branch < 1", guard=0.0))
    if branch1 is None or branch2 is None:
        report.add(Condition("tech_max", None, 1.0, False, "denominator-zero"))
    else:
        report.add(compare("tech_max", max(branch1, branch2), 1.0, "<", "max of both branches < 1", guard=0.0))
    return report


def check_core_expander(G: Graph, W: VertexSet, d: float, alpha: float) -> CertificateReport:
    """G[W] is a (|W|, d, 2 alpha)-expander whenever G is an (n, d, alpha)-expander and |B| <= alpha n."""
    if len(W) == 0:
        return CertificateReport([Condition("core_expander", None, 2.0 * alpha * d, False, "empty core")])
    core = induced_subgraph(G, W).graph
    return CertificateReport([expander_condition(core, d, 2.0 * alpha, name="core_expander")])
