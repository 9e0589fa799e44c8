import numpy as np
import pytest


@pytest.fixture
def rk4_propagator():
    """Fixed-step classical Runge-Kutta propagator, independent of scipy.

    `matrix(t)` returns H(t); integrates i dU/dt = H U from t0 to t1.
    """

    def integrate(matrix, t0, t1, steps, dim):
        u = np.eye(dim, dtype=complex)
        h = (t1 - t0) / steps
        for i in range(steps):
            t = t0 + i * h
            k1 = -1j * matrix(t) @ u
            k2 = -1j * matrix(t + 0.5 * h) @ (u + 0.5 * h * k1)
            k3 = -1j * matrix(t + 0.5 * h) @ (u + 0.5 * h * k2)
            k4 = -1j * matrix(t + h) @ (u + h * k3)
            u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return u

    return integrate
