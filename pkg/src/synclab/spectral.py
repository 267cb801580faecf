"""
Matrix-free symmetric eigenvalue routines.

Small operators (dimension <= DENSE_LIMIT) are materialized and solved with
LAPACK through numpy.linalg.eigvalsh; larger ones go through Lanczos with full
reorthogonalization from a fixed probe seed, so results are reproducible.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import InputError, NumericalError
from .graph import Graph
from .logger import get_logger

logger = get_logger("spectral")

DENSE_LIMIT = 512
PROBE_SEED = 0x5EED
RITZ_TOL = 1e-10


@dataclass(frozen=True)
class SymmetricOperator:
    """A real symmetric linear map given by its action on vectors."""

    dimension: int
    apply: Callable[[np.ndarray], np.ndarray]
    dense_factory: Optional[Callable[[], np.ndarray]] = None

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)

    def to_dense(self) -> np.ndarray:
        if self.dense_factory is not None:
            return np.asarray(self.dense_factory(), dtype=np.float64)
        eye = np.eye(self.dimension)
        return np.column_stack([self.apply(eye[:, j]) for j in range(self.dimension)])

    def asymmetry(self, probes: int = 5, seed: int = PROBE_SEED) -> float:
        """max |<Mx,y> - <x,My>| / (|x||y|) over random probes."""
        rng = np.random.Generator(np.random.Philox(seed))
        worst = 0.0
        for _ in range(probes):
            x = rng.standard_normal(self.dimension)
            y = rng.standard_normal(self.dimension)
            gap = abs(self.apply(x) @ y - x @ self.apply(y))
            worst = max(worst, gap / (np.linalg.norm(x) * np.linalg.norm(y)))
        return worst


def dense_extreme_eigenvalues(matrix: np.ndarray) -> Tuple[float, float]:
    """Oracle: extremes of a dense symmetric matrix via LAPACK."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.size == 0:
        raise InputError("eigenvalues of an empty matrix are undefined")
    w = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
    return float(w[0]), float(w[-1])


def lanczos_extreme_eigenvalues(M: SymmetricOperator, tol: float = RITZ_TOL,
                                seed: int = PROBE_SEED,
                                max_iter: Optional[int] = None) -> Tuple[float, float]:
    """Lanczos with full reorthogonalization; converged when both extreme
    Ritz residuals |beta_k * s_k| fall below tol * max(1, |T|)."""
    n = M.dimension
    budget = min(n, max_iter if max_iter is not None else 10 * n)
    rng = np.random.Generator(np.random.Philox(seed))
    Q = np.zeros((n, budget))
    alphas = np.zeros(budget)
    betas = np.zeros(budget)

    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    best = (np.nan, np.nan)
    residual = np.inf
    for k in range(budget):
        Q[:, k] = q
        u = M.apply(q)
        alphas[k] = q @ u
        r = u - alphas[k] * q
        if k > 0:
            r -= betas[k - 1] * Q[:, k - 1]
        # full reorthogonalization, twice for stability
        for _ in range(2):
            r -= Q[:, :k + 1] @ (Q[:, :k + 1].T @ r)
        beta = np.linalg.norm(r)
        betas[k] = beta

        size = k + 1
        if size % 10 == 0 or beta < 1e-14 or size == budget:
            T = np.diag(alphas[:size]) + np.diag(betas[:size - 1], 1) + np.diag(betas[:size - 1], -1)
            w, s = np.linalg.eigh(T)
            scale = max(1.0, float(np.abs(w).max()))
            residual = max(abs(beta * s[-1, 0]), abs(beta * s[-1, -1])) / scale
            best = (float(w[0]), float(w[-1]))
            logger.debug(f"lanczos step {size}: extremes={best}, residual={residual:.2e}")
            # an invariant subspace (beta ~ 0) gives exact Ritz values
            if residual <= tol or beta < 1e-14 * scale:
                return best
        q = r / beta

    if budget == n:
        # the Krylov space spans R^n, so the Ritz values are the eigenvalues
        return best
    raise NumericalError("Lanczos iteration did not converge", best_estimate=best, residual=residual)


def extreme_eigenvalues(M: SymmetricOperator, dense_limit: int = DENSE_LIMIT) -> Tuple[float, float]:
    """(lambda_min, lambda_max) of a symmetric operator."""
    if M.dimension < 1:
        raise InputError("operator dimension must be at least 1")
    if M.dimension <= dense_limit:
        lo, hi = dense_extreme_eigenvalues(M.to_dense())
    else:
        lo, hi = lanczos_extreme_eigenvalues(M)
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise NumericalError("non-finite eigenvalue estimate", best_estimate=(lo, hi))
    return lo, hi


def _check_d(G: Graph, d: float) -> None:
    if G.n < 1:
        raise InputError("graph must have at least one vertex")
    if not d > 0:
        raise InputError(f"d must be positive, got {d}")


def deviation_operator(G: Graph, d: float) -> SymmetricOperator:
    """A_G - (d/n) J."""
    _check_d(G, d)
    A, n = G.adjacency, G.n
    c = d / n

    def apply(x: np.ndarray) -> np.ndarray:
        return A @ x - c * x.sum()

    return SymmetricOperator(n, apply, lambda: A.toarray() - c)


def laplacian_shift_operator(G: Graph, d: float) -> SymmetricOperator:
    """D - A_G - d I + (d/n) J."""
    _check_d(G, d)
    A, n = G.adjacency, G.n
    diag = G.degrees.astype(np.float64) - d
    c = d / n

    def apply(x: np.ndarray) -> np.ndarray:
        return diag * x - A @ x + c * x.sum()

    def dense() -> np.ndarray:
        return np.diag(diag) - A.toarray() + c

    return SymmetricOperator(n, apply, dense)


def spectral_norm_deviation(G: Graph, d: float) -> float:
    """||A_G - (d/n) J||, the quantity bounded by alpha*d in an expander."""
    lo, hi = extreme_eigenvalues(deviation_operator(G, d))
    return max(abs(lo), abs(hi))


def laplacian_expander_bounds(G: Graph, d: float) -> Tuple[float, float]:
    """Tightest (c_minus, c_plus) with c_minus d I <= D - A - dI + (d/n)J <= c_plus d I."""
    lo, hi = extreme_eigenvalues(laplacian_shift_operator(G, d))
    return lo / d, hi / d
