"""
Gradient flow d(theta)/dt = -grad E_G(theta).

Explicit RK4 with step-doubling error control: each step is taken once with
h and twice with h/2; the difference (divided by 2^4 - 1) estimates the local
error of the half-step solution, which is the one propagated.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from .errors import InputError, NumericalError
from .graph import Graph
from .kuramoto import PhaseState, StateLike, angles_of, energy, gradient_of_angles, wrap
from .logger import get_logger

logger = get_logger("flow")


@dataclass
class FlowOptions:
    grad_tol: float = 1e-9
    max_time: float = 1e4
    sample_stride: int = 50
    rtol: float = 1e-8
    initial_step: float = 0.01
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise InputError(f"grad_tol must be positive, got {self.grad_tol}")
        if not self.max_time > 0:
            raise InputError(f"max_time must be positive, got {self.max_time}")
        if self.sample_stride < 1:
            raise InputError(f"sample_stride must be >= 1, got {self.sample_stride}")
        if not self.rtol > 0 or not self.initial_step > 0:
            raise InputError("rtol and initial_step must be positive")

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'FlowOptions':
        """Create FlowOptions from an `integrator` configuration mapping"""
        defaults = cls()
        return cls(
            grad_tol=float(config.get('grad_tol', defaults.grad_tol)),
            max_time=float(config.get('max_time', defaults.max_time)),
            sample_stride=int(config.get('sample_stride', defaults.sample_stride)),
            rtol=float(config.get('rtol', defaults.rtol)),
            initial_step=float(config.get('initial_step', defaults.initial_step)),
            max_steps=int(config.get('max_steps', defaults.max_steps)),
        )


@dataclass
class FlowResult:
    final_state: PhaseState
    final_energy: float
    final_gradient_norm: float
    steps: int
    converged: bool
    time: float
    energy_trace: List[Tuple[float, float]] = field(default_factory=list)


def _rk4(G: Graph, theta: np.ndarray, h: float, k1: np.ndarray) -> np.ndarray:
    k2 = -gradient_of_angles(G, theta + 0.5 * h * k1)
    k3 = -gradient_of_angles(G, theta + 0.5 * h * k2)
    k4 = -gradient_of_angles(G, theta + h * k3)
    return theta + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def flow(G: Graph, s0: StateLike, opts: FlowOptions | None = None) -> FlowResult:
    """Integrate the gradient flow until ||grad E||_inf < grad_tol or the time budget runs out."""
    opts = opts or FlowOptions()
    theta = angles_of(G, s0).copy()

    t = 0.0
    h = opts.initial_step
    steps = 0
    accepted = 0
    trace = [(0.0, energy(G, theta))]

    grad = gradient_of_angles(G, theta)
    grad_norm = float(np.max(np.abs(grad))) if grad.size else 0.0
    while grad_norm >= opts.grad_tol and t < opts.max_time and steps < opts.max_steps:
        h = min(h, opts.max_time - t)
        k1 = -grad
        full = _rk4(G, theta, h, k1)
        half = _rk4(G, theta, 0.5 * h, k1)
        half = _rk4(G, half, 0.5 * h, -gradient_of_angles(G, half))
        steps += 1

        if not (np.all(np.isfinite(full)) and np.all(np.isfinite(half))):
            raise NumericalError(f"non-finite state at t={t:.6g}", best_estimate=theta)

        err = float(np.max(np.abs(half - full))) / 15.0
        tol = opts.rtol * max(1.0, float(np.max(np.abs(half))))
        if err <= tol:
            t += h
            theta = wrap(half)
            grad = gradient_of_angles(G, theta)
            grad_norm = float(np.max(np.abs(grad)))
            accepted += 1
            if accepted % opts.sample_stride == 0:
                trace.append((t, energy(G, theta)))
        else:
            logger.debug(f"rejected step h={h:.3e} at t={t:.6g} (err={err:.2e} > tol={tol:.2e})")

        factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * (tol / err) ** 0.2))
        h *= factor

    final_energy = energy(G, theta)
    if trace[-1][0] != t:
        trace.append((t, final_energy))
    converged = grad_norm < opts.grad_tol
    logger.debug(f"flow finished: t={t:.6g}, steps={steps}, energy={final_energy:.3e}, "
                 f"|grad|={grad_norm:.2e}, converged={converged}")
    return FlowResult(
        final_state=PhaseState(theta),
        final_energy=final_energy,
        final_gradient_norm=grad_norm,
        steps=steps,
        converged=converged,
        time=t,
        energy_trace=trace,
    )


def energy_is_monotone(result: FlowResult, slack: float = 1e-9) -> bool:
    energies = np.array([e for _, e in result.energy_trace])
    return bool(np.all(np.diff(energies) <= slack))
