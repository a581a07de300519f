"""
Invariant time series, drift metrics, convergence orders and Poisson bracket checks.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
import pandas as pd

from core.algebra import hat, phase_vector, se3_vector
from core.errors import InsufficientDataError, NonPositiveValueError, SeriesTooShortError
from core.hamiltonians import SYMPLECTIC_J, TopParams, phase_invariant_columns, se3_invariant_columns
from core.integrators import Formulation, Trajectory
from core.maps import collective_M_vector, jacobian_M

logger = logging.getLogger(__name__)

STATE_COLUMNS = ["Pi1", "Pi2", "Pi3", "Gamma1", "Gamma2", "Gamma3"]
SE3_INVARIANTS = ["h", "f1", "f2", "f3", "K"]
PHASE_INVARIANTS = ["F1", "F2", "F3", "J1", "J2", "J3"]


@dataclass
class InvariantSeries:
    """Per-sample state and invariant values of a trajectory"""

    frame: pd.DataFrame
    params: TopParams
    formulation: Formulation

    def __len__(self) -> int:
        return len(self.frame)

    @property
    def times(self) -> npt.NDArray[np.float64]:
        return self.frame["t"].to_numpy()

    @property
    def invariant_names(self) -> List[str]:
        return [name for name in SE3_INVARIANTS + PHASE_INVARIANTS if name in self.frame.columns]

    def __getitem__(self, name: str) -> npt.NDArray[np.float64]:
        return self.frame[name].to_numpy()


@dataclass(frozen=True)
class InvariantDrift:
    initial: float
    max_abs_dev: float
    lsq_slope: float
    final_dev: float


@dataclass
class DriftReport:
    entries: Dict[str, InvariantDrift] = field(default_factory=dict)
    t_final: float = 0.0
    samples: int = 0

    def __getitem__(self, name: str) -> InvariantDrift:
        return self.entries[name]

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame.from_dict(
            {name: vars(drift) for name, drift in self.entries.items()}, orient="index"
        )
        frame.index.name = "invariant"
        return frame

    def to_text(self) -> str:
        lines = [f"# drift report: {self.samples} samples, t_final={self.t_final:.17g}"]
        lines.append(f"{'invariant':<10}{'initial':>26}{'max_abs_dev':>26}{'lsq_slope':>26}{'final_dev':>26}")
        for name, d in self.entries.items():
            lines.append(
                f"{name:<10}{d.initial:>26.17g}{d.max_abs_dev:>26.17g}{d.lsq_slope:>26.17g}{d.final_dev:>26.17g}"
            )
        return "\n".join(lines) + "\n"


def invariant_series(traj: Trajectory) -> InvariantSeries:
    """Evaluate h, f1, f2, f3, K (and F1..J3 for collective runs) at every sample"""
    se3 = traj.se3_states()
    columns = {"t": traj.times}
    columns.update(dict(zip(STATE_COLUMNS, se3.T)))
    columns.update(se3_invariant_columns(se3, traj.params))
    if traj.formulation is Formulation.COLLECTIVE:
        phase_cols = phase_invariant_columns(traj.states)
        columns.update({name: phase_cols[name] for name in PHASE_INVARIANTS})
    return InvariantSeries(frame=pd.DataFrame(columns), params=traj.params, formulation=traj.formulation)


def drift_report(series: InvariantSeries, names: Optional[Iterable[str]] = None) -> DriftReport:
    """
    Deviation statistics of each invariant relative to its initial value.
    The slope is the ordinary least-squares slope of v(t) - v(0) against t.
    """
    if len(series) < 2:
        raise SeriesTooShortError(f"drift report needs at least 2 samples, got {len(series)}")
    t = series.times
    tc = t - t.mean()
    denom = float(np.dot(tc, tc))
    report = DriftReport(t_final=float(t[-1]), samples=len(series))
    for name in names or series.invariant_names:
        values = series[name]
        dev = values - values[0]
        report.entries[name] = InvariantDrift(
            initial=float(values[0]),
            max_abs_dev=float(np.max(np.abs(dev))),
            lsq_slope=float(np.dot(tc, dev) / denom),
            final_dev=float(dev[-1]),
        )
    return report


def convergence_order(errors: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of log(err) against log(dt)"""
    pairs = np.asarray(list(errors), dtype=np.float64).reshape(-1, 2)
    if len(pairs) < 3:
        raise InsufficientDataError(f"convergence order needs at least 3 (dt, error) pairs, got {len(pairs)}")
    if np.any(pairs <= 0.0):
        raise NonPositiveValueError("step sizes and errors must be positive for a log-log fit")
    slope, _ = np.polyfit(np.log(pairs[:, 0]), np.log(pairs[:, 1]), 1)
    return float(slope)


def global_error(traj: Trajectory, reference: Trajectory) -> float:
    """Sup-norm distance between the final states of two runs of the same system"""
    if traj.formulation is not reference.formulation:
        raise ValueError("global error compares trajectories of the same formulation")
    if not np.isclose(traj.times[-1], reference.times[-1], rtol=1e-12, atol=1e-12):
        raise ValueError(
            f"final times differ: {traj.times[-1]:.17g} vs {reference.times[-1]:.17g}"
        )
    return float(np.max(np.abs(traj.final_state - reference.final_state)))


# Brackets

def poisson_tensor(s) -> npt.NDArray[np.float64]:
    """Heavy top bracket as a 6x6 matrix: {F, G} = dF . B(s) dG"""
    s = se3_vector(s)
    Pi_hat, Gamma_hat = hat(s[:3]), hat(s[3:])
    return np.block([[Pi_hat, Gamma_hat], [Gamma_hat, np.zeros((3, 3))]])


def heavytop_bracket(s, grad_f, grad_g) -> float:
    """-Pi.(dF/dPi x dG/dPi) - Gamma.(dF/dPi x dG/dGamma - dG/dPi x dF/dGamma)"""
    return float(np.asarray(grad_f) @ poisson_tensor(s) @ np.asarray(grad_g))


def canonical_bracket(grad_f, grad_g) -> float:
    """dF/dq . dG/dp - dF/dp . dG/dq on T*R^4"""
    return float(np.asarray(grad_f) @ SYMPLECTIC_J @ np.asarray(grad_g))


def bracket_check(z) -> npt.NDArray[np.float64]:
    """
    |{x_a o M, x_b o M} - {x_a, x_b} o M| for the six coordinate functions of se(3)*.
    The pullback gradients are the rows of jacobian_M.
    """
    x = phase_vector(z)
    jac = jacobian_M(x)
    jq, jp = jac[:, :4], jac[:, 4:]
    product = jq @ jp.T
    pulled = product - product.T
    return np.abs(pulled - poisson_tensor(collective_M_vector(x)))
