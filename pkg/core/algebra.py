"""
Algebraic identifications shared by every other module.

R^3 <-> so(3) <-> su(2) via the hat map and the basis
e_j = -(i/2) sigma_j, the inner products that make these isometries, and the
complex/real views of the collective phase space T*C^2 = T*R^4.

Real-view ordering is fixed as
    q = (Re chi_1, Im chi_1, Re chi_2, Im chi_2),
    p = (Re psi_1, Im psi_1, Re psi_2, Im psi_2).
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
import numpy.typing as npt

Vec3 = npt.NDArray[np.float64]
ComplexPair = npt.NDArray[np.complex128]
RealMatrix = npt.NDArray[np.float64]
ComplexMatrix = npt.NDArray[np.complex128]


def as_vec3(v) -> Vec3:
    """Coerce to a float 3-vector"""
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    return arr


def as_complex_pair(c) -> ComplexPair:
    """Coerce to a complex 2-vector"""
    arr = np.asarray(c, dtype=np.complex128)
    if arr.shape != (2,):
        raise ValueError(f"expected a complex 2-vector, got shape {arr.shape}")
    return arr


def complex_to_real(c: ComplexPair) -> npt.NDArray[np.float64]:
    """(c1, c2) -> (Re c1, Im c1, Re c2, Im c2)"""
    c = as_complex_pair(c)
    return np.array([c[0].real, c[0].imag, c[1].real, c[1].imag])


def real_to_complex(x) -> ComplexPair:
    """(x1, x2, x3, x4) -> (x1 + i x2, x3 + i x4)"""
    x = np.asarray(x, dtype=np.float64)
    return np.array([complex(x[0], x[1]), complex(x[2], x[3])])


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """A point (chi, psi) of T*C^2 with its real view (q, p) of T*R^4"""

    chi: ComplexPair
    psi: ComplexPair

    def __post_init__(self):
        object.__setattr__(self, "chi", as_complex_pair(self.chi))
        object.__setattr__(self, "psi", as_complex_pair(self.psi))

    @property
    def q(self) -> npt.NDArray[np.float64]:
        return complex_to_real(self.chi)

    @property
    def p(self) -> npt.NDArray[np.float64]:
        return complex_to_real(self.psi)

    def to_real(self) -> npt.NDArray[np.float64]:
        """Flat (q1..q4, p1..p4) vector"""
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_real(cls, q, p) -> "PhasePoint":
        return cls(chi=real_to_complex(q), psi=real_to_complex(p))

    @classmethod
    def from_vector(cls, x) -> "PhasePoint":
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (8,):
            raise ValueError(f"expected an 8-vector, got shape {x.shape}")
        return cls.from_real(x[:4], x[4:])


@dataclass(frozen=True, eq=False)
class SE3Dual:
    """A point (Pi, Gamma) of se(3)* = R^3 x R^3"""

    Pi: Vec3
    Gamma: Vec3

    def __post_init__(self):
        object.__setattr__(self, "Pi", as_vec3(self.Pi))
        object.__setattr__(self, "Gamma", as_vec3(self.Gamma))

    def as_vector(self) -> npt.NDArray[np.float64]:
        return np.concatenate([self.Pi, self.Gamma])

    @classmethod
    def from_vector(cls, x) -> "SE3Dual":
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (6,):
            raise ValueError(f"expected a 6-vector, got shape {x.shape}")
        return cls(Pi=x[:3], Gamma=x[3:])


@dataclass(frozen=True, eq=False)
class SU2xC2Dual:
    """A point (mu, alpha) of (su(2) x| C^2)*, mu stored as its R^3 coordinates"""

    mu: Vec3
    alpha: ComplexPair

    def __post_init__(self):
        object.__setattr__(self, "mu", as_vec3(self.mu))
        object.__setattr__(self, "alpha", as_complex_pair(self.alpha))


def phase_vector(z: Union[PhasePoint, npt.ArrayLike]) -> npt.NDArray[np.float64]:
    """Real 8-vector view of a phase point given either as PhasePoint or array"""
    if isinstance(z, PhasePoint):
        return z.to_real()
    x = np.asarray(z, dtype=np.float64)
    if x.shape[-1] != 8:
        raise ValueError(f"expected trailing dimension 8, got shape {x.shape}")
    return x


def se3_vector(s: Union[SE3Dual, npt.ArrayLike]) -> npt.NDArray[np.float64]:
    """Flat (Pi, Gamma) view of an se(3)* point given either as SE3Dual or array"""
    if isinstance(s, SE3Dual):
        return s.as_vector()
    x = np.asarray(s, dtype=np.float64)
    if x.shape[-1] != 6:
        raise ValueError(f"expected trailing dimension 6, got shape {x.shape}")
    return x


# so(3)

def hat(v) -> RealMatrix:
    """R^3 -> so(3), hat(v) w = v x w"""
    x, y, z = as_vec3(v)
    return np.array([
        [0.0, -z, y],
        [z, 0.0, -x],
        [-y, x, 0.0],
    ])


def vee(m) -> Vec3:
    """Inverse of hat"""
    m = np.asarray(m, dtype=np.float64)
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def ip_so3(a, b) -> float:
    """<A, B> = (1/2) tr(A^T B)"""
    return 0.5 * float(np.trace(np.asarray(a).T @ np.asarray(b)))


# su(2)

def su2_from_vec3(v) -> ComplexMatrix:
    """R^3 -> su(2), xi -> sum_j xi_j e_j with e_j = -(i/2) sigma_j"""
    x, y, z = as_vec3(v)
    return -0.5j * np.array([
        [z, x - 1j * y],
        [x + 1j * y, -z],
    ])


def vec3_from_su2(m) -> Vec3:
    """Inverse of su2_from_vec3"""
    s = 2j * np.asarray(m, dtype=np.complex128)
    return np.array([s[1, 0].real, s[1, 0].imag, s[0, 0].real])


def ip_su2(a, b) -> float:
    """<xi, eta> = 2 tr(xi^* eta)"""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return 2.0 * float(np.trace(a.conj().T @ b).real)


def commutator(a, b):
    return a @ b - b @ a


# C^2

def c2_inner(a, b) -> float:
    """<a, b> = Re(a^* b), equal to the R^4 dot product of the real views"""
    a = as_complex_pair(a)
    b = as_complex_pair(b)
    return float(np.vdot(a, b).real)
