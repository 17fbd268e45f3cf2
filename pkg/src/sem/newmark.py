import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import sparse

from ..models.errors import InvalidArgumentError
from ..utils.solvers import SpdSolver
from .operators import Material, WaveOperators


@dataclass(frozen=True, eq=False)
class WaveState:
    rho: np.ndarray
    rho_dot: np.ndarray
    rho_ddot: np.ndarray
    t: float = 0.0
    step: int = 0

    @classmethod
    def zeros(cls, n: int) -> "WaveState":
        return cls(np.zeros(n), np.zeros(n), np.zeros(n))

    def __len__(self) -> int:
        return len(self.rho)


def apply_source_ramp(t: float, t_end: float) -> float:
    """Smooth start-up factor 1/2 (1 - cos(pi t / t_end)), held at 1 after t_end."""
    if t_end <= 0.0:
        raise InvalidArgumentError(f"ramp end time must be positive, got {t_end}")
    if t < 0.0:
        raise InvalidArgumentError(f"time must be non-negative, got {t}")
    if t >= t_end:
        return 1.0
    return 0.5 * (1.0 - math.cos(math.pi * t / t_end))


class NewmarkIntegrator:
    """
    Implicit Newmark scheme in acceleration form for M a + C v + K u = F.

    The defaults (beta 1/4, gamma 1/2) give the average-acceleration rule.
    The effective matrix M + gamma dt C + beta dt^2 K is built once.
    """

    def __init__(
        self,
        ops: WaveOperators,
        dt: float,
        beta: float = 0.25,
        gamma: float = 0.5,
        solver: str = "cg",
        rtol: float = 1e-10,
    ):
        if dt <= 0.0:
            raise InvalidArgumentError(f"time step must be positive, got {dt}")
        self.ops = ops
        self.dt = dt
        self.beta = beta
        self.gamma = gamma
        effective = ops.mass_matrix + gamma * dt * ops.damping + beta * dt**2 * ops.stiffness
        self._effective = SpdSolver(effective, method=solver, rtol=rtol)
        self._mass = SpdSolver(ops.mass_matrix, method="direct")

    def _check(self, state: WaveState, *vectors: Optional[np.ndarray]) -> None:
        n = self.ops.n_nodes
        if len(state) != n or any(v is not None and len(v) != n for v in vectors):
            raise InvalidArgumentError(f"state and load vectors must have length {n}")

    def initial_acceleration(self, state: WaveState, rhs: np.ndarray) -> np.ndarray:
        ops = self.ops
        return self._mass.solve(rhs - ops.damping @ state.rho_dot - ops.stiffness @ state.rho)

    def step(self, state: WaveState, rhs_prev: np.ndarray, rhs_next: np.ndarray) -> WaveState:
        self._check(state, rhs_prev, rhs_next)
        dt, beta, gamma = self.dt, self.beta, self.gamma
        ops = self.ops
        acc = state.rho_ddot
        if state.step == 0:
            acc = self.initial_acceleration(state, rhs_prev)
        u_pred = state.rho + dt * state.rho_dot + dt**2 * (0.5 - beta) * acc
        v_pred = state.rho_dot + dt * (1.0 - gamma) * acc
        load = rhs_next - ops.damping @ v_pred - ops.stiffness @ u_pred
        acc_next = self._effective.solve(load, x0=acc)
        return replace(
            state,
            rho=u_pred + beta * dt**2 * acc_next,
            rho_dot=v_pred + gamma * dt * acc_next,
            rho_ddot=acc_next,
            t=state.t + dt,
            step=state.step + 1,
        )

    def residual(self, state: WaveState, rhs: np.ndarray) -> float:
        """Relative residual of M a + C v + K u = F at the state's time."""
        ops = self.ops
        lhs = ops.mass * state.rho_ddot + ops.damping @ state.rho_dot + ops.stiffness @ state.rho
        scale = max(float(np.linalg.norm(rhs)), float(np.linalg.norm(ops.mass * state.rho_ddot)), 1e-300)
        return float(np.linalg.norm(lhs - rhs)) / scale


def newmark_step(
    ops: WaveOperators,
    state: WaveState,
    rhs_prev: np.ndarray,
    rhs_next: np.ndarray,
    dt: float,
    solver: str = "cg",
) -> WaveState:
    """One step; build a NewmarkIntegrator once when stepping repeatedly."""
    return NewmarkIntegrator(ops, dt, solver=solver).step(state, rhs_prev, rhs_next)


def scalar_operators(mass: float, stiffness: float, damping: float = 0.0) -> WaveOperators:
    """One-degree-of-freedom operators, useful for checking the integrator."""
    return WaveOperators(
        np.array([float(mass)]),
        sparse.csr_matrix([[float(stiffness)]]),
        sparse.csr_matrix([[float(damping)]]),
        Material(),
    )
