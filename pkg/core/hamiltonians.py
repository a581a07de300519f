"""
Heavy top and collective Hamiltonians, vector fields and conserved quantities.

    h(Pi, Gamma) = 1/2 Pi . I^{-1} Pi + mgl Gamma . c
    H = h o M on T*R^4, q' = dH/dp, p' = -dH/dq

The vector helpers (suffix ``_vector``) work on flat numpy arrays and are the
hot path of the integrators; the typed wrappers take PhasePoint / SE3Dual.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

import numpy as np
import numpy.typing as npt

from core.algebra import PhasePoint, SE3Dual, as_vec3, hat, phase_vector, se3_vector
from core.errors import InvalidParametersError, PresetMismatchError
from core.maps import HESSIANS_M, collective_M_vector, jacobian_M

logger = logging.getLogger(__name__)

UNIT_TOL = 1e-12

# (q, p) -> (dH/dp, -dH/dq)
SYMPLECTIC_J = np.block([
    [np.zeros((4, 4)), np.eye(4)],
    [-np.eye(4), np.zeros((4, 4))],
])
SYMPLECTIC_J.setflags(write=False)


class TopPreset(Enum):
    """Named parameter families"""
    GENERAL = "general"
    LAGRANGE = "lagrange"
    KOVALEVSKAYA = "kovalevskaya"


@dataclass(frozen=True)
class TopParams:
    """Principal moments of inertia, m, g, l and the body-frame center direction c"""

    I1: float
    I2: float
    I3: float
    m: float = 1.0
    g: float = 1.0
    l: float = 1.0
    c: Tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in as_vec3(self.c)))
        values = (self.I1, self.I2, self.I3, self.m, self.g, self.l) + self.c
        if not all(np.isfinite(values)):
            raise InvalidParametersError(f"non-finite top parameters: {self}")
        if min(self.I1, self.I2, self.I3) <= 0.0:
            raise InvalidParametersError(
                f"moments of inertia must be positive, got ({self.I1}, {self.I2}, {self.I3})"
            )
        if min(self.m, self.g, self.l) < 0.0:
            raise InvalidParametersError(
                f"m, g, l must be non-negative, got ({self.m}, {self.g}, {self.l})"
            )
        if abs(np.linalg.norm(self.c) - 1.0) > UNIT_TOL:
            raise InvalidParametersError(f"c must be a unit vector, got {self.c}")

    @classmethod
    def lagrange(cls, I1: float, I3: float, m: float = 1.0, g: float = 1.0, l: float = 1.0) -> "TopParams":
        """Symmetric top: I2 = I1, c = (0, 0, 1)"""
        return cls(I1=I1, I2=I1, I3=I3, m=m, g=g, l=l, c=(0.0, 0.0, 1.0))

    @classmethod
    def kovalevskaya(cls, I3: float = 1.0, m: float = 1.0, g: float = 1.0, l: float = 1.0) -> "TopParams":
        """I1 = I2 = 2 I3, c = (1, 0, 0)"""
        return cls(I1=2.0 * I3, I2=2.0 * I3, I3=I3, m=m, g=g, l=l, c=(1.0, 0.0, 0.0))

    @property
    def inertia(self) -> npt.NDArray[np.float64]:
        return np.array([self.I1, self.I2, self.I3])

    @property
    def inverse_inertia(self) -> npt.NDArray[np.float64]:
        return 1.0 / self.inertia

    @property
    def mgl(self) -> float:
        return self.m * self.g * self.l

    @property
    def c_vector(self) -> npt.NDArray[np.float64]:
        return np.array(self.c)

    @property
    def is_lagrange(self) -> bool:
        return self.I1 == self.I2 and self.c == (0.0, 0.0, 1.0)

    @property
    def is_kovalevskaya(self) -> bool:
        return self.I1 == self.I2 == 2.0 * self.I3 and self.c == (1.0, 0.0, 0.0)

    @property
    def preset(self) -> TopPreset:
        if self.is_lagrange:
            return TopPreset.LAGRANGE
        if self.is_kovalevskaya:
            return TopPreset.KOVALEVSKAYA
        return TopPreset.GENERAL


@dataclass(frozen=True)
class SE3Invariants:
    h: float
    f1: float
    f2: float
    f3: float
    K: float
    f3_meaningful: bool
    K_meaningful: bool


@dataclass(frozen=True)
class PhaseInvariants:
    J1: float
    J2: float
    J3: float
    F1: float
    F2: float
    F3: float


# Heavy top on se(3)*

def h_vector(s, params: TopParams):
    """h on (..., 6) arrays"""
    s = np.asarray(s, dtype=np.float64)
    Pi, Gamma = s[..., :3], s[..., 3:]
    return 0.5 * np.sum(Pi * Pi * params.inverse_inertia, axis=-1) + params.mgl * (Gamma @ params.c_vector)


def h_heavytop(s, params: TopParams) -> float:
    return float(h_vector(se3_vector(s), params))


def h_gradient_vector(s, params: TopParams) -> npt.NDArray[np.float64]:
    """(dh/dPi, dh/dGamma) = (I^{-1} Pi, mgl c)"""
    s = np.asarray(s, dtype=np.float64)
    return np.concatenate([params.inverse_inertia * s[:3], params.mgl * params.c_vector])


def heavytop_field_vector(y, params: TopParams) -> npt.NDArray[np.float64]:
    Pi, Gamma = y[:3], y[3:]
    omega = params.inverse_inertia * Pi
    return np.concatenate([
        np.cross(Pi, omega) + params.mgl * np.cross(Gamma, params.c_vector),
        np.cross(Gamma, omega),
    ])


def heavytop_field(s, params: TopParams) -> SE3Dual:
    return SE3Dual.from_vector(heavytop_field_vector(se3_vector(s), params))


def heavytop_jacobian(y, params: TopParams) -> npt.NDArray[np.float64]:
    """Derivative of the heavy top field, assembled from its bilinear structure"""
    y = np.asarray(y, dtype=np.float64)
    Pi, Gamma = y[:3], y[3:]
    inv = np.diag(params.inverse_inertia)
    omega_hat = hat(params.inverse_inertia * Pi)
    jac = np.zeros((6, 6))
    jac[:3, :3] = hat(Pi) @ inv - omega_hat
    jac[:3, 3:] = -params.mgl * hat(params.c_vector)
    jac[3:, :3] = hat(Gamma) @ inv
    jac[3:, 3:] = -omega_hat
    return jac


# Collective Hamiltonian on T*R^4

def _complex_views(x):
    x = np.asarray(x, dtype=np.float64)
    chi1 = x[..., 0] + 1j * x[..., 1]
    chi2 = x[..., 2] + 1j * x[..., 3]
    psi1 = x[..., 4] + 1j * x[..., 5]
    psi2 = x[..., 6] + 1j * x[..., 7]
    return chi1, chi2, psi1, psi2


def collective_H_vector(x, params: TopParams):
    """h o M on (..., 8) arrays"""
    return h_vector(collective_M_vector(x), params)


def collective_H(z, params: TopParams) -> float:
    return float(collective_H_vector(phase_vector(z), params))


def collective_H_expanded(z, params: TopParams) -> float:
    """H written out in chi and psi; agrees with collective_H"""
    x = phase_vector(z)
    chi1, chi2, psi1, psi2 = _complex_views(x)
    a1 = np.imag(chi1 * np.conj(psi2) + chi2 * np.conj(psi1))
    a2 = np.real(chi2 * np.conj(psi1) - chi1 * np.conj(psi2))
    a3 = np.imag(chi2 * np.conj(psi2) - chi1 * np.conj(psi1))
    w = np.conj(psi1) * psi2
    c1, c2, c3 = params.c
    kinetic = (a1 ** 2 / params.I1 + a2 ** 2 / params.I2 + a3 ** 2 / params.I3) / 8.0
    potential = params.mgl * (
        2.0 * np.real(w) * c1 + 2.0 * np.imag(w) * c2 + (np.abs(psi1) ** 2 - np.abs(psi2) ** 2) * c3
    )
    return float(kinetic + potential)


def collective_grad_vector(x, params: TopParams) -> npt.NDArray[np.float64]:
    """(dH/dq, dH/dp) by the chain rule through jacobian_M"""
    return jacobian_M(x).T @ h_gradient_vector(collective_M_vector(x), params)


def collective_grad(z, params: TopParams) -> npt.NDArray[np.float64]:
    return collective_grad_vector(phase_vector(z), params)


def collective_hessian(x, params: TopParams) -> npt.NDArray[np.float64]:
    """Hessian of H = h o M: DM^T D^2h DM + sum_k (dh)_k D^2 M_k"""
    x = np.asarray(x, dtype=np.float64)
    jac = jacobian_M(x)
    grad_h = h_gradient_vector(collective_M_vector(x), params)
    jac_pi = jac[:3]
    hess = jac_pi.T @ (params.inverse_inertia[:, None] * jac_pi)
    hess += np.tensordot(grad_h, HESSIANS_M, axes=(0, 0))
    return hess


def canonical_field_vector(x, params: TopParams) -> npt.NDArray[np.float64]:
    grad = collective_grad_vector(x, params)
    return np.concatenate([grad[4:], -grad[:4]])


def canonical_field(z, params: TopParams) -> PhasePoint:
    return PhasePoint.from_vector(canonical_field_vector(phase_vector(z), params))


def canonical_jacobian(x, params: TopParams) -> npt.NDArray[np.float64]:
    return SYMPLECTIC_J @ collective_hessian(x, params)


def complex_field(z, params: TopParams) -> Tuple[npt.NDArray[np.complex128], npt.NDArray[np.complex128]]:
    """(chi', psi') = (2 dH/d psi-bar, -2 dH/d chi-bar) with Wirtinger derivatives"""
    grad = collective_grad(z, params)
    dq, dp = grad[:4], grad[4:]
    # 2 d/d(conj w) = d/d(Re w) + i d/d(Im w)
    two_dH_dpsibar = np.array([complex(dp[0], dp[1]), complex(dp[2], dp[3])])
    two_dH_dchibar = np.array([complex(dq[0], dq[1]), complex(dq[2], dq[3])])
    return two_dH_dpsibar, -two_dH_dchibar


def lagrange_H(z, params: TopParams) -> float:
    """H for the Lagrange top in the simplified form using I2 = I1, c = e3"""
    if not params.is_lagrange:
        raise PresetMismatchError(
            f"lagrange_H requires I2 = I1 and c = (0, 0, 1), got I=({params.I1}, {params.I2}, {params.I3}), c={params.c}"
        )
    chi1, chi2, psi1, psi2 = _complex_views(phase_vector(z))
    u = chi1 * np.conj(psi2)
    v = chi2 * np.conj(psi1)
    a3 = np.imag(chi2 * np.conj(psi2) - chi1 * np.conj(psi1))
    kinetic = ((np.abs(u) ** 2 + np.abs(v) ** 2 - 2.0 * np.real(u * v)) / params.I1 + a3 ** 2 / params.I3) / 8.0
    return float(kinetic + params.mgl * (np.abs(psi1) ** 2 - np.abs(psi2) ** 2))


def lagrange_symmetry(z, theta: float) -> PhasePoint:
    """(chi, psi) -> (diag(e^{i theta}, e^{-i theta}) chi, diag(e^{i theta}, e^{-i theta}) psi)"""
    if not isinstance(z, PhasePoint):
        z = PhasePoint.from_vector(phase_vector(z))
    d = np.array([np.exp(1j * theta), np.exp(-1j * theta)])
    return PhasePoint(chi=d * z.chi, psi=d * z.psi)


# Conserved quantities

def se3_invariant_columns(states, params: TopParams) -> Dict[str, npt.NDArray[np.float64]]:
    """h, f1, f2, f3, K on (..., 6) arrays"""
    s = np.asarray(states, dtype=np.float64)
    Pi, Gamma = s[..., :3], s[..., 3:]
    kov = (Pi[..., 0] + 1j * Pi[..., 1]) ** 2 - 4.0 * params.mgl * params.I3 * (Gamma[..., 0] + 1j * Gamma[..., 1])
    return {
        "h": h_vector(s, params),
        "f1": np.sum(Gamma * Gamma, axis=-1),
        "f2": np.sum(Pi * Gamma, axis=-1),
        "f3": Pi[..., 2],
        "K": np.abs(kov) ** 2,
    }


def invariants_se3(s, params: TopParams) -> SE3Invariants:
    cols = se3_invariant_columns(se3_vector(s), params)
    return SE3Invariants(
        **{name: float(value) for name, value in cols.items()},
        f3_meaningful=params.is_lagrange,
        K_meaningful=params.is_kovalevskaya,
    )


def phase_invariant_columns(x) -> Dict[str, npt.NDArray[np.float64]]:
    """J1, J2, J3, F1, F2, F3 on (..., 8) arrays"""
    chi1, chi2, psi1, psi2 = _complex_views(x)
    norm2 = np.abs(psi1) ** 2 + np.abs(psi2) ** 2
    # Im(psi^* chi)
    im_psi_chi = np.imag(np.conj(psi1) * chi1 + np.conj(psi2) * chi2)
    J1 = norm2 / 2.0
    J2 = -im_psi_chi
    J3 = np.imag(chi2 * np.conj(psi2) - chi1 * np.conj(psi1))
    return {
        "J1": J1,
        "J2": J2,
        "J3": J3,
        "F1": norm2 ** 2,
        "F2": -(norm2 / 2.0) * im_psi_chi,
        "F3": J3 / 2.0,
    }


def invariants_phase(z) -> PhaseInvariants:
    cols = phase_invariant_columns(phase_vector(z))
    return PhaseInvariants(**{name: float(value) for name, value in cols.items()})


def invariant_gradients(z) -> Dict[str, npt.NDArray[np.float64]]:
    """Analytic gradients of F1, F2, F3 on T*R^4"""
    x = phase_vector(z)
    p = x[4:]
    jac = jacobian_M(x)
    s = collective_M_vector(x)
    grad_f2 = np.concatenate([s[3:], s[:3]])
    return {
        "F1": np.concatenate([np.zeros(4), 4.0 * np.dot(p, p) * p]),
        "F2": jac.T @ grad_f2,
        "F3": jac[2].copy(),
    }
