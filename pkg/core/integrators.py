"""
Fixed-step one-step methods and the trajectory driver.

Works on flat numpy state vectors: 8 components for the collective system on
T*R^4, 6 for the heavy top equations on se(3)*.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Callable, List, Optional

import numpy as np
import numpy.typing as npt

from config.settings import settings
from core.algebra import PhasePoint, SE3Dual
from core.errors import (
    CollectiveTopError,
    InvalidParametersError,
    NewtonDivergedError,
    NonFiniteStateError,
)
from core.hamiltonians import (
    TopParams,
    canonical_field_vector,
    canonical_jacobian,
    heavytop_field_vector,
    heavytop_jacobian,
)
from core.maps import collective_M_vector

logger = logging.getLogger(__name__)

State = npt.NDArray[np.float64]
FieldFn = Callable[[State], State]
JacobianFn = Callable[[State], npt.NDArray[np.float64]]

ROUNDOFF_FACTOR = 4.0 * np.finfo(np.float64).eps


class Method(Enum):
    EXPLICIT_MIDPOINT = "explicit-midpoint"
    IMPLICIT_MIDPOINT = "implicit-midpoint"
    RK4 = "rk4"


class JacobianMode(Enum):
    ANALYTIC = "analytic"
    FORWARD_DIFFERENCE = "forward-difference"


class Formulation(Enum):
    COLLECTIVE = "collective"
    DIRECT = "direct"


@dataclass(frozen=True)
class NewtonOptions:
    """Newton settings for the implicit midpoint solve"""

    tol: float = field(default_factory=lambda: settings.NEWTON_TOL)
    max_iter: int = field(default_factory=lambda: settings.NEWTON_MAX_ITER)
    jacobian: JacobianMode = JacobianMode.ANALYTIC
    fd_step: float = field(default_factory=lambda: settings.FD_STEP)

    def __post_init__(self):
        if not (np.isfinite(self.tol) and self.tol > 0.0):
            raise InvalidParametersError(f"Newton tolerance must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidParametersError(f"Newton max_iter must be at least 1, got {self.max_iter}")
        if not self.fd_step > 0.0:
            raise InvalidParametersError(f"finite-difference step must be positive, got {self.fd_step}")


@dataclass(frozen=True)
class StepperConfig:
    method: Method = Method.IMPLICIT_MIDPOINT
    dt: float = field(default_factory=lambda: settings.DEFAULT_DT)
    newton: NewtonOptions = field(default_factory=NewtonOptions)

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise InvalidParametersError(f"time step must be positive, got {self.dt}")


@dataclass(frozen=True)
class System:
    """A vector field on flat states together with its derivative"""

    field: FieldFn
    jacobian: Optional[JacobianFn]
    formulation: Formulation
    params: TopParams

    @property
    def dimension(self) -> int:
        return 8 if self.formulation is Formulation.COLLECTIVE else 6


@dataclass(frozen=True)
class NewtonResult:
    state: State
    iterations: int
    residual: float


@dataclass
class Trajectory:
    """Sampled states of one integration run"""

    times: npt.NDArray[np.float64]
    states: npt.NDArray[np.float64]
    params: TopParams
    formulation: Formulation
    method: Method
    dt: float
    stride: int = 1
    newton_iterations: List[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final_state(self) -> State:
        return self.states[-1]

    def se3_states(self) -> npt.NDArray[np.float64]:
        """States as (Pi, Gamma) rows, mapped through M for collective runs"""
        if self.formulation is Formulation.COLLECTIVE:
            return collective_M_vector(self.states)
        return self.states

    def points(self) -> list:
        """States as PhasePoint or SE3Dual objects"""
        if self.formulation is Formulation.COLLECTIVE:
            return [PhasePoint.from_vector(row) for row in self.states]
        return [SE3Dual.from_vector(row) for row in self.states]


def _check_finite(y: State, what: str) -> State:
    if not np.all(np.isfinite(y)):
        raise NonFiniteStateError(f"{what} produced a non-finite state")
    return y


def _norm_inf(v) -> float:
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


# Steppers

def explicit_midpoint_step(field_fn: FieldFn, y, dt: float) -> State:
    y = np.asarray(y, dtype=np.float64)
    y_half = y + 0.5 * dt * field_fn(y)
    return _check_finite(y + dt * field_fn(y_half), "explicit midpoint step")


def rk4_step(field_fn: FieldFn, y, dt: float) -> State:
    y = np.asarray(y, dtype=np.float64)
    k1 = field_fn(y)
    k2 = field_fn(y + 0.5 * dt * k1)
    k3 = field_fn(y + 0.5 * dt * k2)
    k4 = field_fn(y + dt * k3)
    return _check_finite(y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), "RK4 step")


def forward_difference_jacobian(field_fn: FieldFn, y, step: Optional[float] = None) -> npt.NDArray[np.float64]:
    """Column-wise forward differences with a step scaled to each component"""
    y = np.asarray(y, dtype=np.float64)
    step = settings.FD_STEP if step is None else step
    f0 = field_fn(y)
    jac = np.empty((f0.size, y.size))
    for j in range(y.size):
        h = step * max(1.0, abs(y[j]))
        shifted = y.copy()
        shifted[j] += h
        jac[:, j] = (field_fn(shifted) - f0) / h
    return jac


def implicit_midpoint_solve(
    field_fn: FieldFn,
    jacobian_fn: Optional[JacobianFn],
    y,
    dt: float,
    newton: Optional[NewtonOptions] = None,
) -> NewtonResult:
    """
    Solve y_next = y + dt f((y + y_next)/2) by Newton iteration on the midpoint m:

        G(m) = m - y - (dt/2) f(m),  G'(m) = I - (dt/2) f'(m)

    The reported residual is the sup norm of y_next - y - dt f(m) = 2 G(m).
    """
    newton = newton or NewtonOptions()
    y = np.asarray(y, dtype=np.float64)
    if dt == 0.0:
        return NewtonResult(state=y.copy(), iterations=0, residual=0.0)

    half = 0.5 * dt
    scale = max(1.0, _norm_inf(y))
    threshold = newton.tol * scale
    floor = ROUNDOFF_FACTOR * scale
    identity = np.eye(y.size)

    if newton.jacobian is JacobianMode.ANALYTIC and jacobian_fn is not None:
        derivative = jacobian_fn
    else:
        derivative = partial(forward_difference_jacobian, field_fn, step=newton.fd_step)

    # explicit midpoint predictor for the midpoint state
    m = y + half * field_fn(y + half * field_fn(y))
    residual = np.inf
    for iteration in range(newton.max_iter + 1):
        g = m - y - half * field_fn(m)
        residual = 2.0 * _norm_inf(g)
        if not np.isfinite(residual):
            raise NonFiniteStateError("implicit midpoint Newton iteration produced a non-finite state")
        if residual <= threshold:
            return NewtonResult(state=2.0 * m - y, iterations=iteration, residual=residual)
        if iteration == newton.max_iter:
            break
        try:
            delta = np.linalg.solve(identity - half * derivative(m), g)
        except np.linalg.LinAlgError:
            raise NewtonDivergedError(iteration, residual)
        m = m - delta
        if _norm_inf(delta) <= floor:
            residual = 2.0 * _norm_inf(m - y - half * field_fn(m))
            logger.debug(f"Newton correction at round-off after {iteration + 1} iterations, residual {residual:.3e}")
            return NewtonResult(state=_check_finite(2.0 * m - y, "implicit midpoint step"),
                                iterations=iteration + 1, residual=residual)

    raise NewtonDivergedError(newton.max_iter, residual)


def implicit_midpoint_step(field_fn: FieldFn, jacobian_fn: Optional[JacobianFn], y, dt: float,
                           newton: Optional[NewtonOptions] = None) -> State:
    return implicit_midpoint_solve(field_fn, jacobian_fn, y, dt, newton).state


# Systems

def direct_system(params: TopParams) -> System:
    """Heavy top equations on (Pi, Gamma)"""
    return System(
        field=partial(heavytop_field_vector, params=params),
        jacobian=partial(heavytop_jacobian, params=params),
        formulation=Formulation.DIRECT,
        params=params,
    )


def collective_system(params: TopParams) -> System:
    """Canonical equations of H = h o M on T*R^4"""
    return System(
        field=partial(canonical_field_vector, params=params),
        jacobian=partial(canonical_jacobian, params=params),
        formulation=Formulation.COLLECTIVE,
        params=params,
    )


def system_for(formulation: Formulation, params: TopParams) -> System:
    if formulation is Formulation.COLLECTIVE:
        return collective_system(params)
    return direct_system(params)


# Driver

def integrate(system: System, y0, t_final: float, cfg: StepperConfig, stride: int = 1) -> Trajectory:
    """Take round(t_final / dt) steps from y0, keeping every stride-th state and the last one"""
    if not (np.isfinite(t_final) and t_final > 0.0):
        raise InvalidParametersError(f"t_final must be positive, got {t_final}")
    if stride < 1:
        raise InvalidParametersError(f"stride must be at least 1, got {stride}")

    y = _check_finite(np.array(y0, dtype=np.float64).reshape(-1), "initial condition")
    if y.size != system.dimension:
        raise InvalidParametersError(
            f"{system.formulation.value} system expects {system.dimension} components, got {y.size}"
        )
    dt = cfg.dt
    n_steps = int(round(t_final / dt))
    method = cfg.method

    indices = [0]
    states = [y.copy()]
    iterations: List[int] = []
    for k in range(n_steps):
        try:
            if method is Method.EXPLICIT_MIDPOINT:
                y = explicit_midpoint_step(system.field, y, dt)
            elif method is Method.RK4:
                y = rk4_step(system.field, y, dt)
            else:
                result = implicit_midpoint_solve(system.field, system.jacobian, y, dt, cfg.newton)
                y = result.state
                iterations.append(result.iterations)
        except CollectiveTopError as e:
            if e.step_index is None:
                e.step_index = k + 1
            logger.error(f"{method.value} integration failed: {e}")
            raise
        if (k + 1) % stride == 0 or k + 1 == n_steps:
            indices.append(k + 1)
            states.append(y.copy())

    if iterations:
        logger.debug(
            f"Newton iterations per step: mean {np.mean(iterations):.2f}, max {max(iterations)}"
        )
    logger.info(
        f"Integrated {system.formulation.value} system with {method.value}: "
        f"{n_steps} steps of dt={dt:g}, {len(states)} samples"
    )
    return Trajectory(
        times=np.asarray(indices, dtype=np.float64) * dt,
        states=np.vstack(states),
        params=system.params,
        formulation=system.formulation,
        method=method,
        dt=dt,
        stride=stride,
        newton_iterations=iterations,
    )
