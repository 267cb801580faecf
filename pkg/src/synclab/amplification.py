"""
Angle sequence of the amplification argument.

Phase 1 starts at beta_0 = pi/2 and takes k* = floor(eps / (40 alpha)) steps
of arcsin(20 alpha / eps). Phase 2 takes steps of
arcsin((d_max + 1)/delta * r_k) where r_k = |C_{pi/2}| / |C_{beta_k}|; in the
worst case r_k = (1 + delta)^{-k}. The argument closes when
pi/2 - beta* <= pi/4, the phase-2 drop is <= pi/16 and beta_M >= 3 pi/16.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from .errors import InputError
from .kuramoto import PhaseState, as_state, c_beta
from .logger import get_logger
from .reports import CertificateReport, Condition, compare

logger = get_logger("amplification")

EXACT_TOL = 1e-12
# worst-case phase 2 without n stops once steps are below this
NEGLIGIBLE_STEP = 1e-18
MAX_PHASE2_STEPS = 1_000_000

RatioSchedule = Union[None, Sequence[float], PhaseState]


@dataclass
class AmplificationTrace:
    eps: float
    alpha: float
    delta: float
    k_star: int
    betas_phase1: List[float]
    betas_phase2: List[float] = field(default_factory=list)
    drops: List[float] = field(default_factory=list)
    undefined_at: Optional[int] = None
    checks: CertificateReport = field(default_factory=CertificateReport)
    case1_contradiction: bool = False
    case2_contradiction: Optional[bool] = None

    @property
    def beta_star(self) -> float:
        return self.betas_phase1[-1]

    @property
    def beta_M(self) -> float:
        return self.betas_phase2[-1] if self.betas_phase2 else self.beta_star

    @property
    def phase1_drop(self) -> float:
        return math.pi / 2 - self.beta_star

    @property
    def phase2_drop(self) -> float:
        return float(sum(self.drops))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "alpha": self.alpha,
            "delta": self.delta,
            "k_star": self.k_star,
            "betas_phase1": self.betas_phase1,
            "beta_star": self.beta_star,
            "betas_phase2": self.betas_phase2,
            "beta_M": self.beta_M,
            "drops": self.drops,
            "phase1_drop": self.phase1_drop,
            "phase2_drop": self.phase2_drop,
            "undefined_at": self.undefined_at,
            "case1_contradiction": self.case1_contradiction,
            "case2_contradiction": self.case2_contradiction,
            "checks": self.checks.to_dict(),
        }


def condition_for_k_star_holds(delta: float, d_max: float, k_star: int) -> bool:
    return 8.0 * (1.0 + delta) * (d_max + 1.0) <= delta ** 2 * (1.0 + delta) ** k_star


def worst_case_steps(delta: float, k_star: int, n: Optional[int]) -> Optional[int]:
    """M - k*, with M the first k >= k* where (1 + delta)^k >= n/2; None without n."""
    if n is None:
        return None
    target = max(1.0, n / 2.0)
    M = max(k_star, math.ceil(math.log(target) / math.log1p(delta) - 1e-12))
    return M - k_star


def amplification_trace(eps: float, alpha: float, d: float, d_max: float,
                        ratio_schedule: RatioSchedule = None,
                        n: Optional[int] = None) -> AmplificationTrace:
    if not 0.0 < alpha < 0.2:
        raise InputError(f"alpha must lie in (0, 1/5), got {alpha}")
    if not 0.0 < eps < 1.0:
        raise InputError(f"eps must lie in (0, 1), got {eps}")
    if not d > 0 or not d_max > 2.0 * eps * d:
        raise InputError(f"delta needs d > 0 and d_max > 2 eps d, got d={d}, d_max={d_max}")
    delta = eps * d / (d_max - 2.0 * eps * d)
    k_star = math.floor(eps / (40.0 * alpha))
    trace = AmplificationTrace(eps, alpha, delta, k_star, [math.pi / 2])

    step1 = 20.0 * alpha / eps
    if k_star >= 1:
        # k* >= 1 forces 40 alpha <= eps
        phase1 = math.asin(step1)
        for _ in range(k_star):
            trace.betas_phase1.append(trace.betas_phase1[-1] - phase1)

    coeff = (d_max + 1.0) / delta
    beta = trace.beta_star
    if isinstance(ratio_schedule, PhaseState):
        _phase2_from_state(trace, as_state(ratio_schedule), coeff)
    else:
        if ratio_schedule is None:
            limit = worst_case_steps(delta, k_star, n)
            ratios = _worst_case_ratios(delta, k_star, coeff, limit)
        else:
            ratios = [float(r) for r in ratio_schedule]
        for i, r in enumerate(ratios):
            arg = coeff * r
            if arg > 1.0:
                trace.undefined_at = k_star + i + 1
                break
            step = math.asin(arg)
            beta -= step
            trace.drops.append(step)
            trace.betas_phase2.append(beta)

    _add_checks(trace, d_max)
    logger.debug(f"amplification eps={eps} alpha={alpha}: k*={k_star}, beta*={trace.beta_star:.6g}, "
                 f"beta_M={trace.beta_M:.6g}, undefined_at={trace.undefined_at}")
    return trace


def _worst_case_ratios(delta: float, k_star: int, coeff: float, limit: Optional[int]):
    k = k_star
    produced = 0
    while limit is None or produced < limit:
        r = (1.0 + delta) ** (-k)
        if limit is None and (coeff * r < NEGLIGIBLE_STEP or produced >= MAX_PHASE2_STEPS):
            return
        yield r
        k += 1
        produced += 1


def _phase2_from_state(trace: AmplificationTrace, state: PhaseState, coeff: float) -> None:
    """Phase 2 driven by the measured |C_{pi/2}| / |C_{beta_k}| of a normalized state."""
    n = len(state)
    half = len(c_beta(state, math.pi / 2))
    beta = trace.beta_star
    for i in range(MAX_PHASE2_STEPS):
        if beta <= 0:
            break
        size = len(c_beta(state, beta))
        if size >= n / 2 or half == 0 or size == 0:
            break
        arg = coeff * half / size
        if arg > 1.0:
            trace.undefined_at = trace.k_star + i + 1
            break
        step = math.asin(arg)
        beta -= step
        trace.drops.append(step)
        trace.betas_phase2.append(beta)


def _add_checks(trace: AmplificationTrace, d_max: float) -> None:
    checks = trace.checks
    checks.add(compare("phase1_drop", trace.phase1_drop, math.pi / 4, "<=",
                       "pi/2 - beta* <= pi/4", guard=EXACT_TOL))
    if trace.undefined_at is not None:
        detail = f"sequence undefined at k={trace.undefined_at}"
        checks.add(Condition("phase2_drop", None, math.pi / 16, False, detail))
        checks.add(Condition("beta_M", None, 3 * math.pi / 16, False, detail))
    else:
        holds = condition_for_k_star_holds(trace.delta, d_max, trace.k_star)
        checks.add(compare("phase2_drop", trace.phase2_drop, math.pi / 16, "<=",
                           "phase-2 total drop <= pi/16" + ("" if holds else " (condition for k* fails)"),
                           guard=EXACT_TOL))
        checks.add(compare("beta_M", trace.beta_M, 3 * math.pi / 16, ">=", "beta_M >= 3 pi/16", guard=EXACT_TOL))
    # case 1: |C_{pi/4}| sin^2(pi/4) >= alpha n / 2 > 5 alpha^2 n / 2
    trace.case1_contradiction = trace.alpha / 2.0 > 2.5 * trace.alpha ** 2
    if trace.undefined_at is None:
        # case 2: (n/2) sin^2(beta_M) > 5 alpha^2 n / 2
        trace.case2_contradiction = 0.5 * math.sin(trace.beta_M) ** 2 > 2.5 * trace.alpha ** 2


def sample_valid_pairs(count: int, rng: np.random.Generator) -> np.ndarray:
    """(eps, alpha) pairs with eps in (0, 1) and alpha in (0, 1/5)."""
    eps = rng.uniform(1e-6, 1.0, size=count)
    alpha = rng.uniform(1e-6, 0.2, size=count)
    return np.column_stack([eps, alpha])
