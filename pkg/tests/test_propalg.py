import math

import numpy as np
import pytest

from cstirap.dynamics import SystemParams, propagate
from cstirap.propalg import (CayleyKlein, CKAngles, compose_sequence, extract_ck,
                             from_angles, lift_to_three, phase_imprint, reverse,
                             to_angles)
from cstirap.pulses import ShapeKind, make_pair

_R3 = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)


def _random_su2(rng):
    # Haar-ish draw: normalize a random complex pair.
    v = rng.normal(size=4)
    n = math.hypot(math.hypot(v[0], v[1]), math.hypot(v[2], v[3]))
    return CayleyKlein(complex(v[0], v[1]) / n, complex(v[2], v[3]) / n)


def _matrix(ck):
    return np.array([[ck.a, ck.b], [-np.conj(ck.b), np.conj(ck.a)]])


def test_cayley_klein_norm_enforced():
    with pytest.raises(ValueError):
        CayleyKlein(1.0, 0.1)
    CayleyKlein(math.sqrt(0.5), 1j * math.sqrt(0.5))


def test_lift_pinned_points():
    np.testing.assert_allclose(lift_to_three(CayleyKlein(1.0, 0.0)), np.eye(3),
                               atol=1e-15)
    np.testing.assert_allclose(lift_to_three(CayleyKlein(0.0, 1.0)),
                               np.diag([-1.0, 1.0, -1.0]), atol=1e-15)


def test_lift_is_orthogonal_like():
    rng = np.random.default_rng(3)
    for _ in range(20):
        u = lift_to_three(_random_su2(rng))
        assert np.max(np.abs(u.conj().T @ u - np.eye(3))) < 1e-12


def test_lift_homomorphism_on_random_pairs():
    # The quadratic lift must respect products for arbitrary SU(2) inputs,
    # not just the mirror-symmetric class realized by STIRAP pairs.
    rng = np.random.default_rng(7)
    for _ in range(50):
        x, y = _random_su2(rng), _random_su2(rng)
        prod = extract_ck(_matrix(x) @ _matrix(y))
        dev = np.max(np.abs(lift_to_three(x) @ lift_to_three(y)
                            - lift_to_three(prod)))
        assert dev < 1e-12


def test_extract_ck_roundtrip_and_rejection():
    ck = CayleyKlein(0.6, 0.8j)
    got = extract_ck(_matrix(ck))
    assert got.a == pytest.approx(0.6)
    assert got.b == pytest.approx(0.8j)
    with pytest.raises(ValueError):
        extract_ck(np.array([[1.0, 0.1], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        extract_ck(np.eye(3))


def test_angle_roundtrip_on_mirror_class():
    rng = np.random.default_rng(11)
    for _ in range(200):
        theta = rng.uniform(-math.pi, math.pi)
        phi = rng.uniform(-math.pi, math.pi)
        ck = from_angles(CKAngles(theta, phi))
        back = from_angles(to_angles(ck))
        assert abs(back.a - ck.a) < 1e-12
        assert abs(back.b - ck.b) < 1e-12


def test_to_angles_principal_branch():
    angles = to_angles(from_angles(CKAngles(0.4, -0.9)))
    assert angles.theta == pytest.approx(0.4)
    assert angles.phi == pytest.approx(-0.9)
    assert -math.pi / 2 <= to_angles(from_angles(CKAngles(2.8, 0.3))).theta <= math.pi / 2


def test_to_angles_requires_mirror_symmetry():
    with pytest.raises(ValueError):
        to_angles(CayleyKlein(1j * math.sqrt(0.5), math.sqrt(0.5)))


def test_reverse_is_exchange_conjugation():
    rng = np.random.default_rng(5)
    u = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    np.testing.assert_allclose(reverse(u), _R3 @ u @ _R3, atol=1e-15)
    np.testing.assert_allclose(reverse(reverse(u)), u, atol=1e-15)


def test_phase_imprint_matches_explicit_conjugation():
    rng = np.random.default_rng(6)
    u = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    phi = np.diag([np.exp(0.7j), 1.0, np.exp(1.3j)])
    np.testing.assert_allclose(phase_imprint(u, 0.7, -1.3),
                               phi @ u @ phi.conj().T, atol=1e-13)
    np.testing.assert_allclose(phase_imprint(u, 0.0, 0.0), u, atol=1e-15)


def test_compose_sequence_validation():
    u = np.eye(3)
    with pytest.raises(ValueError):
        compose_sequence([u, u], [(0, 0), (0, 0)], False)
    with pytest.raises(ValueError):
        compose_sequence([u, u, u], [(0, 0)], False)


def test_compose_order_rightmost_first():
    rng = np.random.default_rng(8)
    mats = [rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3)]
    got = compose_sequence(mats, [(0.0, 0.0)] * 3, alternate=False)
    np.testing.assert_allclose(got, mats[2] @ mats[1] @ mats[0], atol=1e-13)


def test_compose_alternation_reverses_even_pairs():
    rng = np.random.default_rng(9)
    u = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    got = compose_sequence([u, u, u], [(0.0, 0.0)] * 3, alternate=True)
    np.testing.assert_allclose(got, u @ (_R3 @ u @ _R3) @ u, atol=1e-13)


def test_imprint_equals_integrating_phased_pair():
    # Conjugation by diag(e^{i a}, 1, e^{-i b}) is exactly what the phase
    # factors on the complex envelopes do to the propagator.
    sys = SystemParams(delta=0.8, gamma=0.25)
    plain = make_pair(ShapeKind.SINE_SQUARED, 18.0)
    phased = make_pair(ShapeKind.SINE_SQUARED, 18.0, pump_phase=1.1,
                       stokes_phase=-0.4)
    u0 = propagate(plain, sys)
    u1 = propagate(phased, sys)
    assert np.max(np.abs(phase_imprint(u0, 1.1, -0.4) - u1)) < 1e-8


def test_reversal_equals_integrating_swapped_pair():
    sys = SystemParams(delta=-1.2, gamma=0.4)
    fwd = make_pair(ShapeKind.SINE_SQUARED, 12.0)
    bwd = make_pair(ShapeKind.SINE_SQUARED, 12.0, reversed=True)
    np.testing.assert_allclose(reverse(propagate(fwd, sys)), propagate(bwd, sys),
                               atol=1e-8)
