"""Propagator algebra for composite sequences.

The resonant three-state propagator is quadratic in the Cayley-Klein
parameters (a, b) of the equivalent two-state problem; this module holds
that lift, the backward-ordering reversal R U R, the phase imprint
Phi U Phi*, and the N-fold sequence composition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-10

# Exchange of states 1 and 3; reversing a pair's pulse order conjugates
# its propagator by this matrix.
_R = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)


@dataclass(frozen=True)
class CayleyKlein:
    """SU(2) parameters (a, b) with |a|^2 + |b|^2 = 1."""

    a: complex
    b: complex

    def __post_init__(self):
        if abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1.0) > NORM_TOL:
            raise ValueError("Cayley-Klein parameters must satisfy |a|^2+|b|^2 = 1")


@dataclass(frozen=True)
class CKAngles:
    """Angle form: a = cos(theta)cos(phi) + i sin(theta)/sqrt(2),
    b = cos(theta)sin(phi) - i sin(theta)/sqrt(2)."""

    theta: float
    phi: float


def lift_to_three(ck: CayleyKlein) -> np.ndarray:
    """The 3x3 STIRAP propagator built from the two-state parameters."""
    a, b = complex(ck.a), complex(ck.b)
    return np.array([
        [abs(a) ** 2 - abs(b) ** 2, -2j * (a * np.conj(b)).imag, 2 * (a * np.conj(b)).real],
        [2j * (a * b).imag, (a * a + b * b).real, -1j * (a * a - b * b).imag],
        [-2 * (a * b).real, -1j * (a * a + b * b).imag, (a * a - b * b).real],
    ], dtype=complex)


def extract_ck(u2: np.ndarray, tol: float = 1e-8) -> CayleyKlein:
    """Read (a, b) off a 2x2 matrix of the form [[a, b], [-b*, a*]]."""
    u2 = np.asarray(u2, dtype=complex)
    if u2.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    a, b = u2[0, 0], u2[0, 1]
    dev = max(abs(u2[1, 0] + np.conj(b)), abs(u2[1, 1] - np.conj(a)),
              abs(abs(a) ** 2 + abs(b) ** 2 - 1.0))
    if dev > tol:
        raise ValueError(f"matrix is not SU(2) to tolerance (max deviation {dev:.3e})")
    # Integration noise up to `tol` is allowed in; project back onto the
    # exact constraint surface so CayleyKlein's strict norm check holds.
    scale = 1.0 / np.sqrt(abs(a) ** 2 + abs(b) ** 2)
    return CayleyKlein(complex(a) * scale, complex(b) * scale)


def to_angles(ck: CayleyKlein, mirror_tol: float = 1e-6) -> CKAngles:
    """Invert the angle parameterization.

    Only defined on the mirror-symmetric class Im a = -Im b. The principal
    arcsin branch (cos theta >= 0) together with phi = atan2(Re b, Re a)
    always satisfies the reconstruction identity.
    """
    if abs(ck.a.imag + ck.b.imag) > mirror_tol:
        raise ValueError("angle form needs the mirror-symmetry property Im a = -Im b")
    theta = math.asin(min(1.0, max(-1.0, math.sqrt(2.0) * ck.a.imag)))
    phi = math.atan2(ck.b.real, ck.a.real)
    return CKAngles(theta, phi)


def from_angles(angles: CKAngles) -> CayleyKlein:
    """Rebuild (a, b) from (theta, phi)."""
    ct, st = math.cos(angles.theta), math.sin(angles.theta)
    return CayleyKlein(ct * math.cos(angles.phi) + 1j * st / math.sqrt(2.0),
                       ct * math.sin(angles.phi) - 1j * st / math.sqrt(2.0))


def reverse(u: np.ndarray) -> np.ndarray:
    """Propagator of the same pair with pump and Stokes exchanged: R U R."""
    return _R @ np.asarray(u, dtype=complex) @ _R


def phase_imprint(u: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """Phi U Phi* with Phi = diag(e^{i alpha}, 1, e^{-i beta})."""
    phi = np.array([np.exp(1j * alpha), 1.0, np.exp(-1j * beta)])
    return (phi[:, None] * np.asarray(u, dtype=complex)) * np.conj(phi)[None, :]


def compose_sequence(propagators, phases, alternate: bool) -> np.ndarray:
    """U^(N) for a sequence of N phased pairs; rightmost factor = first pair.

    With alternate=True every even pair (second, fourth, ...) enters as its
    reversed propagator R U R, the resonant protocol; with alternate=False
    all pairs enter forward, the far-off-resonant protocol.
    """
    props = [np.asarray(u, dtype=complex) for u in propagators]
    n = len(props)
    if n < 1 or n % 2 == 0:
        raise ValueError("sequence length must be odd")
    if len(phases) != n:
        raise ValueError("need one (alpha, beta) per pair")
    total = np.eye(3, dtype=complex)
    for k, (u, (alpha, beta)) in enumerate(zip(props, phases), start=1):
        if alternate and k % 2 == 0:
            u = reverse(u)
        total = phase_imprint(u, alpha, beta) @ total
    return total
