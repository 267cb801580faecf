"""
Second-order classification of Kuramoto states.

A state is stable when the gradient vanishes and the Hessian is positive
semidefinite on the complement of the rotation mode (the constant vector).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from .errors import InputError
from .graph import Graph, is_connected
from .kuramoto import StateLike, angles_of, as_state, c_beta, coupling_matrix, gradient_of_angles, is_normalized
from .logger import get_logger
from .spectral import DENSE_LIMIT, SymmetricOperator, extreme_eigenvalues

logger = get_logger("stability")


class Classification(str, Enum):
    FULLY_SYNCHRONIZED = "fully_synchronized"
    NONTRIVIAL_STABLE = "nontrivial_stable"
    SADDLE_OR_UNSTABLE = "saddle_or_unstable"
    NOT_CRITICAL = "not_critical"


@dataclass
class ClassifyTolerances:
    grad_tol: float = 1e-9
    eig_tol: float = 1e-8
    sync_tol: float = 1e-7

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'ClassifyTolerances':
        defaults = cls()
        return cls(
            grad_tol=float(config.get('grad_tol', defaults.grad_tol)),
            eig_tol=float(config.get('eig_tol', defaults.eig_tol)),
            sync_tol=float(config.get('sync_tol', defaults.sync_tol)),
        )


@dataclass
class StabilityReport:
    gradient_norm: float
    lambda2: float
    classification: Classification
    degenerate: bool = False
    zero_modes: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gradient_norm": self.gradient_norm,
            "lambda2": self.lambda2,
            "classification": self.classification.value,
            "degenerate": self.degenerate,
            "zero_modes": self.zero_modes,
        }


def covering_arc(theta: np.ndarray) -> float:
    """Length of the shortest arc of the circle containing all angles."""
    if theta.size <= 1:
        return 0.0
    ordered = np.sort(np.mod(theta, 2 * np.pi))
    gaps = np.diff(ordered)
    wrap_gap = 2 * np.pi - (ordered[-1] - ordered[0])
    return float(2 * np.pi - max(float(gaps.max()), wrap_gap))


def is_fully_synchronized(G: Graph, s: StateLike, sync_tol: float = 1e-7) -> bool:
    """Every connected component is synchronized to within sync_tol."""
    theta = angles_of(G, s)
    labels = G.components()
    return all(covering_arc(theta[labels == c]) < sync_tol for c in np.unique(labels))


def restricted_hessian(G: Graph, theta: np.ndarray) -> SymmetricOperator:
    """Hessian with the constant direction lifted above the spectrum.

    The rotation mode gets eigenvalue 2*d_max + 1, which exceeds every other
    eigenvalue, so lambda_min of this operator is lambda_min on 1^perp.
    """
    H = coupling_matrix(G, theta)
    n = G.n
    lift = 2.0 * G.max_degree + 1.0

    def apply(x: np.ndarray) -> np.ndarray:
        return H @ x + (lift / n) * x.sum()

    return SymmetricOperator(n, apply, lambda: H.toarray() + lift / n)


def classify(G: Graph, s: StateLike, tols: ClassifyTolerances | None = None) -> StabilityReport:
    tols = tols or ClassifyTolerances()
    theta = angles_of(G, s)
    grad = gradient_of_angles(G, theta)
    grad_norm = float(np.max(np.abs(grad))) if grad.size else 0.0

    zero_modes: Optional[int] = None
    if G.n <= 1:
        lambda2 = 0.0
    elif G.n <= DENSE_LIMIT:
        spectrum = np.linalg.eigvalsh(restricted_hessian(G, theta).to_dense())
        # the lifted rotation mode is the top eigenvalue
        restricted = spectrum[:-1]
        lambda2 = float(restricted[0])
        zero_modes = int(np.count_nonzero(np.abs(restricted) <= tols.eig_tol))
    else:
        lambda2, _ = extreme_eigenvalues(restricted_hessian(G, theta))

    degenerate = False
    if grad_norm > tols.grad_tol:
        label = Classification.NOT_CRITICAL
    elif is_fully_synchronized(G, theta, tols.sync_tol):
        label = Classification.FULLY_SYNCHRONIZED
    elif lambda2 < -tols.eig_tol:
        label = Classification.SADDLE_OR_UNSTABLE
    else:
        label = Classification.NONTRIVIAL_STABLE
        degenerate = lambda2 <= tols.eig_tol

    report = StabilityReport(grad_norm, lambda2, label, degenerate, zero_modes)
    logger.debug(f"classified state: {report}")
    return report


def half_circle_check(G: Graph, s: StateLike, tols: ClassifyTolerances | None = None) -> bool:
    """C_{pi/2} is nonempty for a normalized nontrivial stable state on a connected graph.

    A False return on such a state points at a numerical or logic defect.
    """
    state = as_state(s)
    if not is_connected(G):
        raise InputError("half-circle check needs a connected graph")
    if not is_normalized(state):
        raise InputError("half-circle check needs a rotation-normalized state")
    report = classify(G, state, tols)
    if report.classification is not Classification.NONTRIVIAL_STABLE:
        raise InputError(f"half-circle check needs a nontrivial stable state, got {report.classification.value}")
    return len(c_beta(state, np.pi / 2)) > 0
