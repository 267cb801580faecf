"""
Numerical audits of the combinatorial and angular inequalities behind the
defective-expander synchronization argument.

Each inequality is a theorem under its hypotheses, so a recorded violation on
an input whose hypotheses were verified points at an implementation defect.
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from .defective import DefectiveInput, check_defective, structure_holds
from .errors import InputError
from .graph import Graph, VertexSet, induced_subgraph, pair_count
from .kuramoto import StateLike, as_state, c_beta, is_normalized
from .logger import get_logger
from .reports import GUARD, InequalityAudit
from .spectral import spectral_norm_deviation
from .stability import Classification, ClassifyTolerances, classify

logger = get_logger("lemmas")

KERNEL_SLACK = 1e-12
AUDIT_SEED = 0xA0D17
STABLE = (Classification.FULLY_SYNCHRONIZED, Classification.NONTRIVIAL_STABLE)


# Expansion inequalities ---------------------------------------------------

def _random_subset(rng: np.random.Generator, pool: np.ndarray, size: int, n: int) -> VertexSet:
    mask = np.zeros(n, dtype=bool)
    if size:
        mask[rng.choice(pool, size=size, replace=False)] = True
    return VertexSet(mask)


def _sample_nested(rng: np.random.Generator, n: int, x_max: int, delta: float):
    """X subset of Y with |X| <= x_max, |Y| <= n/2 and |Y| <= (1 + delta)|X|."""
    x = int(rng.integers(1, x_max + 1))
    y_cap = min(n // 2, math.floor((1.0 + delta) * x))
    y = int(rng.integers(x, max(x, y_cap) + 1))
    everyone = np.arange(n)
    X = _random_subset(rng, everyone, x, n)
    Y = X.union(_random_subset(rng, np.flatnonzero(~X.mask), y - x, n))
    return X, Y


def expansion_values(inp: DefectiveInput, X: VertexSet, Y: VertexSet) -> Dict[str, bool]:
    """Evaluate the three whole-graph expansion inequalities at one (X, Y) pair.

    X = empty makes every count zero; the strict inequality is counted as
    holding there.
    """
    G, d, eps, alpha = inp.G, inp.d, inp.eps, inp.alpha
    n = G.n
    xx = pair_count(G, X, X)
    xyc = pair_count(G, X, Y.complement())
    return {
        "xx_bound": xx <= d / n * len(X) ** 2 + alpha * d * len(X) + GUARD,
        "xv_bound": pair_count(G, X, VertexSet.full(n)) <= (inp.d_max + 1) * len(X),
        "xyc_to_xx": len(X) == 0 or xyc > eps / (20.0 * alpha) * xx,
    }


def core_expansion_holds(core: Graph, eps: float, d: float, X: VertexSet, Y: VertexSet) -> bool:
    """eps (d/|W|) |X||Y^c| <= e(X, Y^c) inside the core graph."""
    yc = Y.complement()
    return eps * d / core.n * len(X) * len(yc) <= pair_count(core, X, yc) + GUARD


def verify_expansion_inequalities(inp: DefectiveInput, trials: int = 1000,
                                  rng: Optional[np.random.Generator] = None) -> Dict[str, InequalityAudit]:
    """Sample admissible (X, Y) pairs and audit every expansion inequality.

    xx_bound      e(X,X) <= (d/n)|X|^2 + alpha d |X|         on an (n, d, alpha)-expander
    xy_expansion  eps (d/|W|) |X||Y^c| <= e(X, Y^c)           inside the core G[W]
    xv_bound      e(X,V) <= (d_max + 1)|X|                    on a defective expander
    xyc_to_xx     e(X, Y^c) > eps / (20 alpha) e(X, X)        on a defective expander
    """
    if trials < 0:
        raise InputError(f"trials must be non-negative, got {trials}")
    rng = rng or np.random.Generator(np.random.Philox(AUDIT_SEED))
    G, d, eps, alpha = inp.G, inp.d, inp.eps, inp.alpha
    n = G.n
    report = check_defective(inp)
    structure = structure_holds(report)
    expander_ok = report.get("expander").passed
    delta = inp.delta

    audits = {name: InequalityAudit(name) for name in ("xx_bound", "xy_expansion", "xv_bound", "xyc_to_xx")}
    audits["xx_bound"].hypotheses_ok = expander_ok
    core = induced_subgraph(G, inp.W).graph if len(inp.W) else None
    if core is not None:
        core_alpha_ok = spectral_norm_deviation(core, d) <= alpha * d + 1e-8
        audits["xy_expansion"].hypotheses_ok = (
            core_alpha_ok and core.min_degree >= inp.ell and delta is not None)
    else:
        audits["xy_expansion"].hypotheses_ok = False
    audits["xv_bound"].hypotheses_ok = all(
        report.get(name).passed for name in ("B3_bounded_degree", "B4_one_B_neighbor"))
    audits["xyc_to_xx"].hypotheses_ok = structure

    x_cap = {
        "xx_bound": n,
        "xy_expansion": core.n // 2 if core is not None else 0,
        "xv_bound": n,
        "xyc_to_xx": min(n // 2, math.floor(alpha * n)),
    }
    for name, audit in audits.items():
        if not audit.hypotheses_ok:
            audit.vacuous = True
            audit.detail = "hypotheses not met"
            continue
        if x_cap[name] < 1:
            audit.vacuous = True
            audit.detail = "no admissible sets"
            continue
        for _ in range(trials):
            if name == "xy_expansion":
                X, Y = _sample_nested(rng, core.n, x_cap[name], delta)
                holds = core_expansion_holds(core, eps, d, X, Y)
            else:
                if name == "xyc_to_xx":
                    X, Y = _sample_nested(rng, n, x_cap[name], delta)
                else:
                    X = _random_subset(rng, np.arange(n), int(rng.integers(1, n + 1)), n)
                    Y = X
                holds = expansion_values(inp, X, Y)[name]
            audit.record(holds, {"X": X.members.tolist(), "Y": Y.members.tolist()})
        if audit.violations:
            logger.warning(f"{name}: {audit.violations} violations in {audit.trials} trials")
    return audits


# Kernel -------------------------------------------------------------------

def kernel_function(a, b):
    """K(a, b) = sin(|a| - min(|b|, pi/2))."""
    return np.sin(np.abs(a) - np.minimum(np.abs(b), np.pi / 2))


def pointwise_kernel_check(trials: int = 100_000, rng: Optional[np.random.Generator] = None) -> InequalityAudit:
    """K(a,b) + K(b,a) <= 1{|a| >= pi/2} + 1{|b| >= pi/2} on random angle pairs."""
    rng = rng or np.random.Generator(np.random.Philox(AUDIT_SEED))
    a = np.pi - rng.uniform(0.0, 2 * np.pi, size=trials)
    b = np.pi - rng.uniform(0.0, 2 * np.pi, size=trials)
    lhs = kernel_function(a, b) + kernel_function(b, a)
    rhs = (np.abs(a) >= np.pi / 2).astype(float) + (np.abs(b) >= np.pi / 2).astype(float)
    bad = np.flatnonzero(lhs > rhs + KERNEL_SLACK)
    audit = InequalityAudit("kernel_pointwise", trials=int(trials), violations=int(bad.size))
    if bad.size:
        i = int(bad[0])
        audit.counterexample = {"a": float(a[i]), "b": float(b[i]), "lhs": float(lhs[i]), "rhs": float(rhs[i])}
    return audit


# State-level checks -------------------------------------------------------

def _stable_normalized(G: Graph, s: StateLike, tols: Optional[ClassifyTolerances]):
    state = as_state(s)
    if not is_normalized(state):
        raise InputError("state must be rotation-normalized (rho_1 real and >= 0)")
    label = classify(G, state, tols).classification
    if label not in STABLE:
        raise InputError(f"state must be stable, got {label.value}")
    return state


@dataclass
class StabilityChain:
    e_beta_beta: int
    e_half_beta: int
    e_beta_gamma_complement: int
    sin_gap: float
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def stability_inequality_check(G: Graph, s: StateLike, beta: float, gamma: float,
                               tols: Optional[ClassifyTolerances] = None) -> StabilityChain:
    """e(C_b, C_b) >= e(C_{pi/2}, C_b) >= sin(b - g) e(C_b, C_g^c) at a stable state."""
    if not 0.0 < gamma < beta <= np.pi / 2:
        raise InputError(f"need 0 < gamma < beta <= pi/2, got beta={beta}, gamma={gamma}")
    state = _stable_normalized(G, s, tols)
    C_b = c_beta(state, beta)
    C_h = c_beta(state, np.pi / 2)
    C_g = c_beta(state, gamma)
    first = pair_count(G, C_b, C_b)
    second = pair_count(G, C_h, C_b)
    third = pair_count(G, C_b, C_g.complement())
    gap = math.sin(beta - gamma)
    holds = first >= second - GUARD and second >= gap * third - GUARD
    return StabilityChain(first, second, third, gap, holds)


@dataclass
class ContradictionBound:
    lhs: float
    rhs: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "pass": self.passed}


def contradiction_bound_check(s: StateLike, beta: float, alpha: float,
                              n: Optional[int] = None) -> ContradictionBound:
    """|C_beta| sin^2(beta) <= 5 alpha^2 n / 2."""
    state = as_state(s)
    n = len(state) if n is None else n
    lhs = len(c_beta(state, beta)) * math.sin(beta) ** 2
    rhs = 5.0 * alpha ** 2 * n / 2.0
    return ContradictionBound(lhs, rhs, lhs <= rhs)


@dataclass
class RatioCheck:
    applicable: bool
    hypothesis_lhs: float
    hypothesis_rhs: Optional[float]
    conclusion_lhs: int
    conclusion_rhs: float
    holds: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _ratio_check(G: Graph, s: StateLike, inp: DefectiveInput, beta: float, gamma: float,
                 hypothesis_rhs, cap: float, tols: Optional[ClassifyTolerances]) -> RatioCheck:
    if not 0.0 < gamma < beta <= np.pi / 2:
        raise InputError(f"need 0 < gamma < beta <= pi/2, got beta={beta}, gamma={gamma}")
    if inp.G is not G and inp.G != G:
        raise InputError("defective input was built for a different graph")
    state = _stable_normalized(G, s, tols)
    delta = inp.delta
    C_b = len(c_beta(state, beta))
    C_g = len(c_beta(state, gamma))
    gap = math.sin(beta - gamma)
    reasons = []
    if delta is None:
        reasons.append("delta undefined")
    if C_b == 0:
        reasons.append("C_beta empty")
    if not structure_holds(check_defective(inp)):
        reasons.append("graph is not a defective expander")
    rhs = hypothesis_rhs(delta, C_b, state) if not reasons else None
    if rhs is not None and gap < rhs:
        reasons.append("angular gap too small")
    conclusion_rhs = min((1.0 + delta) * C_b, cap) if delta is not None else cap
    applicable = not reasons
    holds = (not applicable) or C_g > conclusion_rhs
    return RatioCheck(applicable, gap, rhs, C_g, conclusion_rhs, holds, "; ".join(reasons))


def ratio_small_check(G: Graph, s: StateLike, inp: DefectiveInput, beta: float, gamma: float,
                      tols: Optional[ClassifyTolerances] = None) -> RatioCheck:
    """sin(b - g) >= 20 alpha / eps implies |C_g| > min((1 + delta)|C_b|, alpha n)."""
    return _ratio_check(G, s, inp, beta, gamma,
                        lambda delta, size, state: 20.0 * inp.alpha / inp.eps,
                        inp.alpha * G.n, tols)


def ratio_large_check(G: Graph, s: StateLike, inp: DefectiveInput, beta: float, gamma: float,
                      tols: Optional[ClassifyTolerances] = None) -> RatioCheck:
    """sin(b - g) >= (d_max + 1)/delta |C_{pi/2}|/|C_b| implies |C_g| > min((1 + delta)|C_b|, n/2)."""
    def rhs(delta, size, state):
        return (inp.d_max + 1) / delta * len(c_beta(state, np.pi / 2)) / size

    return _ratio_check(G, s, inp, beta, gamma, rhs, G.n / 2.0, tols)
