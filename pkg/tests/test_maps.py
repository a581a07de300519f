import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import KOVALEVSKAYA_PSI0, central_difference_gradient, central_difference_jacobian, relative_error
from core.algebra import PhasePoint, SE3Dual
from core.errors import GaugeUnsolvableError, ZeroGammaError
from core.hamiltonians import invariant_gradients
from core.maps import (
    HESSIANS_M,
    GaugeMode,
    HopfBranch,
    LiftGauge,
    collective_M,
    collective_M_vector,
    gauge_orbit,
    hopf,
    hopf_tangent,
    inverse_hopf,
    jacobian_M,
    lift,
    momentum_map_L,
    pullback_gradient,
    surjectivity_matrix,
    varpi,
)


def test_zero_psi_maps_to_origin():
    s = collective_M(PhasePoint(chi=[1 + 1j, 2 - 1j], psi=[0, 0]))
    assert_allclose(s.as_vector(), np.zeros(6))


def test_single_point_values():
    # chi = (1, 0), psi = (0, 1)
    s = collective_M(PhasePoint(chi=[1, 0], psi=[0, 1]))
    assert_allclose(s.Pi, [0.0, -0.5, 0.0])
    assert_allclose(s.Gamma, [0.0, 0.0, -1.0])


def test_real_form_matches_complex_composition(random_points):
    for x in random_points:
        expected = varpi(momentum_map_L(x)).as_vector()
        assert_allclose(collective_M_vector(x), expected, rtol=1e-13, atol=1e-13)


def test_vectorized_evaluation_matches_rowwise(random_points):
    batched = collective_M_vector(random_points)
    assert batched.shape == (100, 6)
    for x, row in zip(random_points, batched):
        assert_allclose(collective_M_vector(x), row, rtol=1e-15, atol=1e-15)


def test_hopf_maps_spheres_to_spheres(rng):
    for re, im in rng.normal(size=(100, 2, 2)):
        alpha = re + 1j * im
        assert np.linalg.norm(hopf(alpha)) == pytest.approx(np.linalg.norm(alpha) ** 2, rel=1e-14)


def test_hopf_is_phase_invariant(rng):
    for (re, im), theta in zip(rng.normal(size=(100, 2, 2)), rng.uniform(0.0, 2.0 * np.pi, size=100)):
        alpha = re + 1j * im
        scale = 1.0 + np.vdot(alpha, alpha).real
        assert_allclose(hopf(np.exp(1j * theta) * alpha), hopf(alpha), atol=1e-14 * scale)


def test_surjectivity_matrix_identities(random_points):
    for x in random_points[:20]:
        q, p = x[:4], x[4:]
        A = surjectivity_matrix(p)
        assert_allclose(A @ A.T, np.dot(p, p) / 4.0 * np.eye(3), atol=1e-13)
        assert_allclose(A @ p, np.zeros(3), atol=1e-13)
        assert_allclose(A @ q, collective_M_vector(x)[:3], atol=1e-13)


def test_jacobian_gamma_row_at_unit_psi():
    x = np.zeros(8)
    x[4] = 1.0
    assert_allclose(jacobian_M(x)[4, 4:], [0.0, 0.0, 0.0, 2.0])


def test_jacobian_matches_central_differences(random_points):
    for x in random_points:
        fd = central_difference_jacobian(collective_M_vector, x)
        assert relative_error(jacobian_M(x), fd) < 1e-6


def test_jacobian_gamma_block_is_hopf_tangent(random_points):
    x = random_points[0]
    z = PhasePoint.from_vector(x)
    jac = jacobian_M(x)
    assert_allclose(jac[3:, 4:], hopf_tangent(z.psi))
    assert_allclose(jac[3:, :4], np.zeros((3, 4)))


def test_components_are_quadratic_forms(random_points):
    for x in random_points[:10]:
        values = 0.5 * np.einsum("kij,i,j->k", HESSIANS_M, x, x)
        assert_allclose(values, collective_M_vector(x), rtol=1e-13, atol=1e-13)


def test_gauge_orbit_leaves_M_invariant(random_points):
    for x in random_points[:20]:
        z = PhasePoint.from_vector(x)
        moved = gauge_orbit(z, b=0.7, theta=1.3)
        assert_allclose(collective_M(moved).as_vector(), collective_M(z).as_vector(), rtol=1e-12, atol=1e-12)


def test_pullback_gradient_of_f2(random_points):
    x = random_points[3]

    def grad_f2(s):
        return np.concatenate([s[3:], s[:3]])

    def f2_of_M(y):
        s = collective_M_vector(y)
        return s[:3] @ s[3:]

    pulled = pullback_gradient(x, grad_f2)
    assert relative_error(pulled, central_difference_gradient(f2_of_M, x)) < 1e-6
    assert_allclose(pulled, invariant_gradients(x)["F2"], rtol=1e-14, atol=1e-14)


def test_inverse_hopf_branches(rng):
    for gamma in rng.normal(size=(100, 3)):
        r = np.linalg.norm(gamma)
        assert_allclose(hopf(inverse_hopf(gamma)), gamma, atol=1e-13 * r)
        for branch in (HopfBranch.UPPER, HopfBranch.LOWER):
            psi = inverse_hopf(gamma, branch)
            real_component = psi[0] if branch is HopfBranch.UPPER else psi[1]
            assert real_component.imag == 0.0 and real_component.real > 0.0
            assert_allclose(hopf(psi), gamma, atol=1e-9 * r)


def test_inverse_hopf_rejects_zero():
    with pytest.raises(ZeroGammaError):
        inverse_hopf([0.0, 0.0, 0.0])


def test_lift_round_trip(rng):
    for _ in range(50):
        target = rng.normal(size=6)
        for gauge in (LiftGauge.free(), LiftGauge.fix_re_chi1(0.3)):
            z = lift(target, gauge)
            assert_allclose(collective_M(z).as_vector(), target, rtol=1e-12, atol=1e-12)


def test_lift_fixes_re_chi1(rng):
    z = lift(rng.normal(size=6), LiftGauge.fix_re_chi1(-2.5))
    assert z.chi[0].real == pytest.approx(-2.5, abs=1e-12)


def test_lift_reproduces_kovalevskaya_initial_condition(initial_state, initial_point):
    assert_allclose(collective_M(initial_point).as_vector(), initial_state.as_vector(), atol=1e-12)
    # agreement up to a global phase
    assert_allclose(np.abs(initial_point.psi), np.abs(KOVALEVSKAYA_PSI0), atol=1e-12)
    overlap = np.vdot(KOVALEVSKAYA_PSI0, initial_point.psi)
    assert abs(overlap) == pytest.approx(np.linalg.norm(KOVALEVSKAYA_PSI0) ** 2, abs=1e-12)
    assert initial_point.chi[0].real == pytest.approx(1.0, abs=1e-12)
    assert initial_point.chi[0].imag == pytest.approx(-(math.sqrt(2.0) + 3.0 * math.sqrt(6.0)), abs=1e-12)


def test_lift_rejects_zero_gamma():
    with pytest.raises(ZeroGammaError):
        lift(SE3Dual(Pi=[1.0, 2.0, 3.0], Gamma=[0.0, 0.0, 0.0]))


def test_gauge_unsolvable_when_re_psi1_vanishes():
    # lower branch gives psi_1 = -0.6i / (2 sqrt(0.9)), purely imaginary
    with pytest.raises(GaugeUnsolvableError):
        lift(SE3Dual(Pi=[1.0, 0.0, 0.0], Gamma=[0.0, 0.6, -0.8]), LiftGauge.fix_re_chi1(1.0))
    # free gauge still works
    z = lift(SE3Dual(Pi=[1.0, 0.0, 0.0], Gamma=[0.0, 0.6, -0.8]))
    assert_allclose(collective_M(z).Gamma, [0.0, 0.6, -0.8], atol=1e-14)


@pytest.mark.parametrize("text, mode, value", [
    ("free", GaugeMode.FREE, 0.0),
    ("fix-re-chi1=1", GaugeMode.FIX_RE_CHI1, 1.0),
    (" FIX-RE-CHI1=-0.25 ", GaugeMode.FIX_RE_CHI1, -0.25),
])
def test_gauge_parse(text, mode, value):
    gauge = LiftGauge.parse(text)
    assert gauge.mode is mode
    assert gauge.value == value


def test_gauge_parse_rejects_garbage():
    with pytest.raises(ValueError):
        LiftGauge.parse("fix-im-chi1=2")
    assert str(LiftGauge.fix_re_chi1(1.0)) == "fix-re-chi1=1"
