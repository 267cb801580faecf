"""
Homogeneous Kuramoto model as a gradient system.

    E_G(theta) = 1/2 sum_{u,v} A_uv (1 - cos(theta_u - theta_v))
    (grad E)_v = sum_u A_uv sin(theta_v - theta_u)

Phases live in (-pi, pi]; every constructor wraps into that interval.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.sparse as sp

from .errors import InputError
from .graph import Graph, VertexSet
from .spectral import SymmetricOperator

ROTATION_EPS = 1e-12
NORMALIZED_TOL = 1e-9


def wrap(x) -> np.ndarray:
    """Map angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=np.float64), 2 * np.pi)


@dataclass(frozen=True, eq=False)
class PhaseState:
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64).ravel()
        if not np.all(np.isfinite(theta)):
            raise InputError("phase state contains non-finite angles")
        theta = wrap(theta)
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    def __len__(self) -> int:
        return int(self.theta.size)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PhaseState) and np.array_equal(self.theta, other.theta)

    def __hash__(self) -> int:
        return hash(self.theta.tobytes())


StateLike = Union[PhaseState, np.ndarray, list]


def as_state(s: StateLike) -> PhaseState:
    return s if isinstance(s, PhaseState) else PhaseState(np.asarray(s, dtype=np.float64))


def angles_of(G: Graph, s: StateLike) -> np.ndarray:
    theta = as_state(s).theta
    if theta.size != G.n:
        raise InputError(f"state has {theta.size} angles but graph has {G.n} vertices")
    return theta


def energy(G: Graph, s: StateLike) -> float:
    theta = angles_of(G, s)
    if not G.m:
        return 0.0
    u, v = G.edges[:, 0], G.edges[:, 1]
    return float(np.sum(1.0 - np.cos(theta[u] - theta[v])))


def gradient_of_angles(G: Graph, theta: np.ndarray) -> np.ndarray:
    """Gradient on raw angle vectors; the integrator's right-hand side."""
    A = G.adjacency
    c, s = np.cos(theta), np.sin(theta)
    # sin(t_v - t_u) = sin t_v cos t_u - cos t_v sin t_u
    return s * (A @ c) - c * (A @ s)


def gradient(G: Graph, s: StateLike) -> np.ndarray:
    return gradient_of_angles(G, angles_of(G, s))


def coupling_matrix(G: Graph, theta: np.ndarray) -> sp.csr_array:
    """Hessian as a sparse matrix: off-diagonal -cos(theta_u - theta_v) on edges."""
    u, v = G.edges[:, 0], G.edges[:, 1]
    w = np.cos(theta[u] - theta[v])
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    W = sp.csr_array((np.concatenate([w, w]), (rows, cols)), shape=(G.n, G.n))
    diag = np.asarray(W.sum(axis=1)).ravel()
    return (sp.diags_array(diag) - W).tocsr()


def hessian(G: Graph, s: StateLike) -> SymmetricOperator:
    theta = angles_of(G, s)
    H = coupling_matrix(G, theta)
    return SymmetricOperator(G.n, lambda x: H @ x, H.toarray)


def order_parameter(s: StateLike) -> complex:
    theta = as_state(s).theta
    if not theta.size:
        raise InputError("order parameter of an empty state is undefined")
    return complex(np.mean(np.exp(1j * theta)))


def rotate(s: StateLike, phi: float) -> PhaseState:
    return PhaseState(as_state(s).theta + phi)


def normalize_rotation(s: StateLike) -> PhaseState:
    """Rotate so that rho_1 is real and non-negative; states with |rho_1| < 1e-12 are kept."""
    state = as_state(s)
    rho = order_parameter(state)
    if abs(rho) < ROTATION_EPS:
        return state
    return rotate(state, -np.angle(rho))


def is_normalized(s: StateLike, tol: float = NORMALIZED_TOL) -> bool:
    rho = order_parameter(s)
    return abs(rho) < ROTATION_EPS or (abs(rho.imag) <= tol and rho.real >= -tol)


def c_beta(s: StateLike, beta: float) -> VertexSet:
    """C_beta = {v : |theta_v| >= beta} of a rotation-normalized state."""
    if not 0.0 < beta <= np.pi:
        raise InputError(f"beta must lie in (0, pi], got {beta}")
    state = as_state(s)
    if not is_normalized(state):
        raise InputError("c_beta needs a rotation-normalized state (rho_1 real and >= 0)")
    return VertexSet(np.abs(state.theta) >= beta)


def twisted_state(n: int, q: int) -> PhaseState:
    """theta_j = 2 pi q j / n, the q-twisted state of the n-cycle."""
    if n < 3:
        raise InputError(f"twisted states need n >= 3, got {n}")
    j = np.arange(n)
    return PhaseState(2.0 * np.pi * q * j / n)


def random_state(n: int, rng: np.random.Generator) -> PhaseState:
    """Uniform product measure on (-pi, pi]^n."""
    return PhaseState(rng.uniform(-np.pi, np.pi, size=n))


def canonical_form(s: StateLike) -> np.ndarray:
    """Rotation representative with vertex 0 at phase 0."""
    theta = as_state(s).theta
    return wrap(theta - theta[0]) if theta.size else theta


def circular_distance(a, b) -> np.ndarray:
    return np.abs(wrap(np.asarray(a) - np.asarray(b)))
