"""Hamiltonians and Schrodinger-equation integration for the Lambda system.

State ordering is (c1, c2, c3) with the pump driving 1<->2 and the Stokes
driving 2<->3; both fields share the one-photon detuning Delta and state 2
loses population at rate gamma through the non-Hermitian diagonal term.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .pulses import (PulsePair, PulseTrain, pair_envelopes, train_envelopes,
                     window, train_window)

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12

# Aliases for readability; both are plain complex ndarrays.
StateVector = np.ndarray    # shape (3,), amplitudes (c1, c2, c3)
Propagator3 = np.ndarray    # shape (3, 3), unitary when gamma = 0


@dataclass(frozen=True)
class SystemParams:
    """One-photon detuning and middle-state decay rate, in units of 1/T."""

    delta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.delta) and np.isfinite(self.gamma)):
            raise ValueError("detuning and decay must be finite")
        if self.gamma < 0:
            raise ValueError("decay rate must be >= 0")


class IntegrationError(RuntimeError):
    """Adaptive stepping failed; `time` holds the offending instant."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t = {time:g})")
        self.time = time


def _fields(pulses, t):
    if isinstance(pulses, PulseTrain):
        return train_envelopes(pulses, t)
    return pair_envelopes(pulses, t)


def _span(pulses):
    if isinstance(pulses, PulseTrain):
        return train_window(pulses)
    return window(pulses)


def hamiltonian(pulses, sys: SystemParams, t) -> np.ndarray:
    """The 3x3 rotating-wave Hamiltonian at time t (two-photon resonance)."""
    wp, ws = _fields(pulses, t)
    return 0.5 * np.array([
        [0.0, wp, 0.0],
        [np.conj(wp), 2.0 * sys.delta - 1j * sys.gamma, ws],
        [0.0, np.conj(ws), 0.0],
    ], dtype=complex)


def _min_width(pulses):
    pairs = pulses.pairs if isinstance(pulses, PulseTrain) else (pulses,)
    return min(min(p.pump.width, p.stokes.width) for p in pairs)


def propagate(pulses, sys: SystemParams, t_span=None,
              rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> Propagator3:
    """Propagator U(t_f, t_i) of i dU/dt = H(t) U for a pair or a train.

    Integrates the full matrix equation with an adaptive embedded 5(4)
    Runge-Kutta scheme; t_span defaults to the pulse support window.
    """
    if t_span is None:
        t_span = _span(pulses)
    t_i, t_f = t_span
    if not t_i < t_f:
        raise ValueError("need t_i < t_f")

    def rhs(t, y):
        h = hamiltonian(pulses, sys, t)
        return (-1j * (h @ y.reshape(3, 3))).ravel()

    # Cap the step at half a pulse width so the error estimator can never
    # step across an entire envelope unsampled.
    sol = solve_ivp(rhs, (t_i, t_f), np.eye(3, dtype=complex).ravel(),
                    method="RK45", rtol=rtol, atol=atol,
                    max_step=0.5 * _min_width(pulses))
    if sol.status != 0:
        raise IntegrationError(sol.message, float(sol.t[-1]))
    return sol.y[:, -1].reshape(3, 3)


def propagate_state(initial, pulses, sys: SystemParams, t_span=None,
                    rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> StateVector:
    """Evolve an amplitude vector: c(t_f) = U(t_f, t_i) c(t_i)."""
    c = np.asarray(initial, dtype=complex)
    if c.shape != (3,):
        raise ValueError("state must have three amplitudes")
    return propagate(pulses, sys, t_span, rtol, atol) @ c


def _require_real_envelopes(pair: PulsePair):
    if pair.pump_phase % (2 * np.pi) != 0.0 or pair.stokes_phase % (2 * np.pi) != 0.0:
        raise ValueError("the two-state mapping assumes real envelopes (zero phases)")


def resonant_two_state_hamiltonian(pair: PulsePair, t) -> np.ndarray:
    """The real symmetric two-state matrix (1/2)[[-Ws, Wp], [Wp, Ws]].

    Valid on one-photon resonance with gamma = 0 and real envelopes.
    """
    _require_real_envelopes(pair)
    wp, ws = pair_envelopes(pair, t)
    wp, ws = wp.real, ws.real
    return 0.5 * np.array([[-ws, wp], [wp, ws]])


def propagate_two_state(pair: PulsePair, t_span=None,
                        rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> np.ndarray:
    """SU(2) propagator of the two-state problem equivalent to resonant STIRAP.

    The equivalent problem evolves under half the couplings of
    resonant_two_state_hamiltonian: the three-state propagator is quadratic
    in the Cayley-Klein parameters, which restores the full rotation angle.
    """
    _require_real_envelopes(pair)
    if t_span is None:
        t_span = window(pair)

    def rhs(t, y):
        h = 0.5 * resonant_two_state_hamiltonian(pair, t)
        return (-1j * (h @ y.reshape(2, 2))).ravel()

    sol = solve_ivp(rhs, t_span, np.eye(2, dtype=complex).ravel(),
                    method="RK45", rtol=rtol, atol=atol,
                    max_step=0.5 * _min_width(pair))
    if sol.status != 0:
        raise IntegrationError(sol.message, float(sol.t[-1]))
    return sol.y[:, -1].reshape(2, 2)


def effective_two_state(pair: PulsePair, delta: float):
    """Far-off-resonance reduction: returns (W_eff(t), D_eff(t)).

    W_eff = -Wp*Ws/(2*Delta) couples states 1 and 3 directly and
    D_eff = (|Wp|^2 - |Ws|^2)/(2*Delta) is the effective detuning.
    """
    if delta == 0:
        raise ValueError("adiabatic elimination needs a nonzero detuning")
    peak = max(pair.pump.peak, pair.stokes.peak)
    if abs(delta) < 10.0 * peak:
        warnings.warn("adiabatic elimination is unreliable for |Delta| < 10*Omega0",
                      stacklevel=2)

    def w_eff(t):
        wp, ws = pair_envelopes(pair, t)
        return -wp * ws / (2.0 * delta)

    def d_eff(t):
        wp, ws = pair_envelopes(pair, t)
        return (abs(wp) ** 2 - abs(ws) ** 2) / (2.0 * delta)

    return w_eff, d_eff


def propagate_effective(pair: PulsePair, delta: float, t_span=None,
                        rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> np.ndarray:
    """2x2 propagator of the adiabatically eliminated (c1, c3) problem.

    Keeps the full light-shift diagonal -|Wp|^2/(4 Delta), -|Ws|^2/(4 Delta),
    whose difference is the effective detuning of effective_two_state.
    """
    if delta == 0:
        raise ValueError("adiabatic elimination needs a nonzero detuning")
    if t_span is None:
        t_span = window(pair)

    def rhs(t, y):
        wp, ws = pair_envelopes(pair, t)
        h = np.array([
            [-abs(wp) ** 2, -wp * ws],
            [-np.conj(wp * ws), -abs(ws) ** 2],
        ], dtype=complex) / (4.0 * delta)
        return (-1j * (h @ y.reshape(2, 2))).ravel()

    sol = solve_ivp(rhs, t_span, np.eye(2, dtype=complex).ravel(),
                    method="RK45", rtol=rtol, atol=atol,
                    max_step=0.5 * _min_width(pair))
    if sol.status != 0:
        raise IntegrationError(sol.message, float(sol.t[-1]))
    return sol.y[:, -1].reshape(2, 2)
