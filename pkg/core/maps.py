"""
Poisson maps from the collective phase space to se(3)*.

    L : T*C^2 -> (su(2) x| C^2)*,  (chi, psi) -> (1/4(chi psi^* - psi chi^* - i Im(psi^* chi) I), -psi)
    varpi : (mu, alpha) -> (mu, hopf(alpha))
    M = varpi o L : T*C^2 -> se(3)*

M is evaluated from its real-coordinate polynomial form; the complex
composition varpi(L(z)) is kept for cross-checking. The lift inverts M up to
the gauge freedom chi -> chi + b psi and the overall phase.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
import numpy.typing as npt

from core.algebra import (
    PhasePoint,
    SE3Dual,
    SU2xC2Dual,
    as_complex_pair,
    complex_to_real,
    phase_vector,
    se3_vector,
    vec3_from_su2,
)
from core.errors import GaugeUnsolvableError, ZeroGammaError

logger = logging.getLogger(__name__)


class GaugeMode(Enum):
    """How the one-parameter kernel freedom q -> q + s p is fixed"""
    FREE = "free"
    FIX_RE_CHI1 = "fix-re-chi1"


class HopfBranch(Enum):
    """Which component of psi is taken real and positive in the inverse Hopf map"""
    AUTO = "auto"
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class LiftGauge:
    mode: GaugeMode = GaugeMode.FREE
    value: float = 0.0
    hopf_branch: HopfBranch = HopfBranch.AUTO

    @classmethod
    def free(cls, hopf_branch: HopfBranch = HopfBranch.AUTO) -> "LiftGauge":
        return cls(GaugeMode.FREE, 0.0, hopf_branch)

    @classmethod
    def fix_re_chi1(cls, value: float, hopf_branch: HopfBranch = HopfBranch.AUTO) -> "LiftGauge":
        return cls(GaugeMode.FIX_RE_CHI1, float(value), hopf_branch)

    @classmethod
    def parse(cls, text: str) -> "LiftGauge":
        """Parse 'free' or 'fix-re-chi1=V'"""
        text = text.strip().lower()
        if text == GaugeMode.FREE.value:
            return cls.free()
        if text.startswith(GaugeMode.FIX_RE_CHI1.value + "="):
            return cls.fix_re_chi1(float(text.split("=", 1)[1]))
        raise ValueError(f"invalid gauge '{text}', expected 'free' or 'fix-re-chi1=V'")

    def __str__(self) -> str:
        if self.mode is GaugeMode.FREE:
            return GaugeMode.FREE.value
        return f"{GaugeMode.FIX_RE_CHI1.value}={self.value:g}"


@dataclass(frozen=True, eq=False)
class SurjectivityMatrix:
    """The 3x4 matrix A(p) with Pi = A(p) q; A A^T = (|p|^2/4) I and A p = 0"""

    entries: npt.NDArray[np.float64] = field(repr=False)

    def __matmul__(self, other):
        return self.entries @ other

    @property
    def T(self) -> npt.NDArray[np.float64]:
        return self.entries.T


# Momentum map and Hopf map

def momentum_map_L(z) -> SU2xC2Dual:
    """L(chi, psi) from the complex matrix expression"""
    if not isinstance(z, PhasePoint):
        z = PhasePoint.from_vector(phase_vector(z))
    chi = z.chi.reshape(2, 1)
    psi = z.psi.reshape(2, 1)
    im = np.vdot(z.psi, z.chi).imag
    mu_matrix = 0.25 * (chi @ psi.conj().T - psi @ chi.conj().T - 1j * im * np.eye(2))
    return SU2xC2Dual(mu=vec3_from_su2(mu_matrix), alpha=-z.psi)


def hopf(alpha) -> npt.NDArray[np.float64]:
    """varpi_2(alpha) = (2 Re(a1* a2), 2 Im(a1* a2), |a1|^2 - |a2|^2)"""
    a = as_complex_pair(alpha)
    w = np.conj(a[0]) * a[1]
    return np.array([2.0 * w.real, 2.0 * w.imag, abs(a[0]) ** 2 - abs(a[1]) ** 2])


def hopf_tangent(alpha) -> npt.NDArray[np.float64]:
    """Tangent map of varpi_2 in the real coordinates (Re a1, Im a1, Re a2, Im a2)"""
    x1, x2, x3, x4 = complex_to_real(alpha)
    return 2.0 * np.array([
        [x3, x4, x1, x2],
        [x4, -x3, -x2, x1],
        [x1, x2, -x3, -x4],
    ])


def varpi(m: SU2xC2Dual) -> SE3Dual:
    """(mu, alpha) -> (mu, hopf(alpha))"""
    return SE3Dual(Pi=m.mu, Gamma=hopf(m.alpha))


# Collective map in real coordinates

def collective_M_vector(x) -> npt.NDArray[np.float64]:
    """M on real coordinates; accepts (..., 8) and returns (..., 6)"""
    x = np.asarray(x, dtype=np.float64)
    q1, q2, q3, q4, p1, p2, p3, p4 = np.moveaxis(x, -1, 0)
    return np.stack([
        0.5 * (q1 * p4 - q4 * p1 - q2 * p3 + q3 * p2),
        0.5 * (q3 * p1 - q1 * p3 - q2 * p4 + q4 * p2),
        0.5 * (q1 * p2 - q2 * p1 - q3 * p4 + q4 * p3),
        2.0 * (p1 * p3 + p2 * p4),
        2.0 * (p1 * p4 - p2 * p3),
        p1 * p1 + p2 * p2 - p3 * p3 - p4 * p4,
    ], axis=-1)


def collective_M(z) -> SE3Dual:
    return SE3Dual.from_vector(collective_M_vector(phase_vector(z)))


def surjectivity_matrix(p) -> SurjectivityMatrix:
    p1, p2, p3, p4 = np.asarray(p, dtype=np.float64)
    return SurjectivityMatrix(0.5 * np.array([
        [p4, -p3, p2, -p1],
        [-p3, -p4, p1, p2],
        [p2, -p1, -p4, p3],
    ]))


def jacobian_M(z) -> npt.NDArray[np.float64]:
    """6x8 derivative of M; rows (Pi, Gamma), columns (q, p)"""
    x = phase_vector(z)
    q1, q2, q3, q4, p1, p2, p3, p4 = x
    jac = np.zeros((6, 8))
    jac[:3, :4] = surjectivity_matrix(x[4:]).entries
    jac[:3, 4:] = 0.5 * np.array([
        [-q4, q3, -q2, q1],
        [q3, q4, -q1, -q2],
        [-q2, q1, q4, -q3],
    ])
    jac[3:, 4:] = 2.0 * np.array([
        [p3, p4, p1, p2],
        [p4, -p3, -p2, p1],
        [p1, p2, -p3, -p4],
    ])
    return jac


# Every component of M is a quadratic form, so its Hessian is constant and
# the Jacobian is linear in z: d^2 M_k / dz_i dz_j = jacobian_M(e_j)[k, i].
HESSIANS_M: npt.NDArray[np.float64] = np.stack(
    [jacobian_M(unit) for unit in np.eye(8)], axis=-1
)
HESSIANS_M.setflags(write=False)


def pullback_gradient(z, grad_se3: Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]) -> npt.NDArray[np.float64]:
    """Gradient of f o M at z, given the se(3)* gradient function of f"""
    x = phase_vector(z)
    return jacobian_M(x).T @ grad_se3(collective_M_vector(x))


def gauge_orbit(z, b: float = 0.0, theta: float = 0.0) -> PhasePoint:
    """Apply chi -> chi + b psi followed by the phase (chi, psi) -> e^{i theta}(chi, psi)"""
    if not isinstance(z, PhasePoint):
        z = PhasePoint.from_vector(phase_vector(z))
    phase = np.exp(1j * theta)
    return PhasePoint(chi=phase * (z.chi + b * z.psi), psi=phase * z.psi)


# Lift

def inverse_hopf(gamma, branch: HopfBranch = HopfBranch.AUTO) -> npt.NDArray[np.complex128]:
    """A psi with hopf(psi) = gamma; one real positive component per branch"""
    g1, g2, g3 = np.asarray(gamma, dtype=np.float64)
    r = float(np.sqrt(g1 * g1 + g2 * g2 + g3 * g3))
    if r == 0.0:
        raise ZeroGammaError("Gamma = 0 has no preimage with psi != 0")
    if branch is HopfBranch.AUTO:
        branch = HopfBranch.UPPER if g3 >= 0.0 else HopfBranch.LOWER
    if branch is HopfBranch.UPPER:
        psi1 = np.sqrt((r + g3) / 2.0)
        if psi1 == 0.0:
            raise ZeroGammaError("upper Hopf branch is singular at the south pole")
        return np.array([complex(psi1), complex(g1, g2) / (2.0 * psi1)])
    psi2 = np.sqrt((r - g3) / 2.0)
    if psi2 == 0.0:
        raise ZeroGammaError("lower Hopf branch is singular at the north pole")
    return np.array([complex(g1, -g2) / (2.0 * psi2), complex(psi2)])


def lift(target, gauge: Optional[LiftGauge] = None) -> PhasePoint:
    """A phase point z with collective_M(z) = target"""
    gauge = gauge or LiftGauge.free()
    s = se3_vector(target)
    Pi, Gamma = s[:3], s[3:]
    r = float(np.linalg.norm(Gamma))
    if r == 0.0:
        raise ZeroGammaError("cannot lift a state with Gamma = 0")

    psi = inverse_hopf(Gamma, gauge.hopf_branch)
    p = np.array([psi[0].real, psi[0].imag, psi[1].real, psi[1].imag])
    A = surjectivity_matrix(p)
    # |p|^2 = |Gamma| = r, so A (4/r) A^T = I
    q = (4.0 / r) * (A.T @ Pi)

    if gauge.mode is GaugeMode.FIX_RE_CHI1:
        if p[0] == 0.0:
            raise GaugeUnsolvableError(
                "Re(chi_1) cannot be fixed because Re(psi_1) = 0 for this target"
            )
        q = q + ((gauge.value - q[0]) / p[0]) * p

    logger.debug(f"Lifted target with |Gamma|={r:.6g} using gauge {gauge}")
    return PhasePoint.from_real(q, p)
