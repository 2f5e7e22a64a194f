"""Explicit solutions of the filament NLS and the gauge transformation."""

import numpy as np

from .base import FilamentField


class StraightLine(FilamentField):
    """u = 0: a still straight line."""

    def u(self, t, x):
        return np.zeros(np.shape(x), dtype=complex)

    def u_x(self, t, x):
        return np.zeros(np.shape(x), dtype=complex)

    def space_rate(self, t, x):
        return 0.0

    def time_rate(self, t, x0):
        return 0.0


class Helix(FilamentField):
    """
    u = exp(-i*t*(1 + alpha^2) + i*alpha*x) with f = 3.

    Curvature 1 and torsion alpha; alpha = 0 is the smoke ring, a unit
    circle translating at unit speed along its binormal.
    """

    GAUGE = 3.0

    def __init__(self, alpha=0.0):
        self.alpha = float(alpha)

    def u(self, t, x):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        return np.exp(-1j * t * (1.0 + self.alpha**2) + 1j * self.alpha * x)

    def u_x(self, t, x):
        return 1j * self.alpha * self.u(t, x)

    def gauge(self, t):
        return np.full(np.shape(t), self.GAUGE)

    def space_rate(self, t, x):
        return 1.0 + abs(self.alpha)

    def time_rate(self, t, x0):
        return 2.0 + abs(self.alpha) + self.alpha**2


class SmokeRing(Helix):
    """u = exp(-i*t), f = 3."""

    def __init__(self):
        super().__init__(alpha=0.0)


class Soliton(FilamentField):
    """
    Travelling wave u = 2*sech(x - 2*alpha*t) * exp(i*alpha*x - i*(1 + alpha^2)*t) with f = 4.

    The curvature bump 2*sech travels at speed 2*alpha along the filament.
    """

    GAUGE = 4.0

    def __init__(self, alpha=0.5):
        self.alpha = float(alpha)

    def u(self, t, x):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        y = x - 2.0 * self.alpha * t
        return 2.0 / np.cosh(y) * np.exp(1j * self.alpha * x - 1j * (1.0 + self.alpha**2) * t)

    def u_x(self, t, x):
        y = np.asarray(x, dtype=float) - 2.0 * self.alpha * np.asarray(t, dtype=float)
        return (1j * self.alpha - np.tanh(y)) * self.u(t, x)

    def gauge(self, t):
        return np.full(np.shape(t), self.GAUGE)

    def space_rate(self, t, x):
        return 3.0 + abs(self.alpha)

    def time_rate(self, t, x0):
        return 4.0 + 1.0 + 3.0 * abs(self.alpha) + self.alpha**2


class GaugedField(FilamentField):
    """
    Gauge-transformed field: u -> u*exp(i*Phi(t)), f -> f - 2*Phi'(t).

    Drives the same curve; the normals rotate by the extra phase.
    """

    def __init__(self, field, phase, phase_rate):
        self.field = field
        self.phase = phase
        self.phase_rate = phase_rate

    def _factor(self, t):
        return np.exp(1j * np.asarray(self.phase(t), dtype=float))

    def u(self, t, x):
        return self.field.u(t, x) * self._factor(t)

    def u_x(self, t, x):
        return self.field.u_x(t, x) * self._factor(t)

    def along_time(self, times, x0):
        u, ux = self.field.along_time(times, x0)
        factor = self._factor(np.asarray(times, dtype=float))
        return u * factor, ux * factor

    def gauge(self, t):
        return np.asarray(self.field.gauge(t), dtype=float) - 2.0 * np.asarray(self.phase_rate(t), dtype=float)

    def space_rate(self, t, x):
        return self.field.space_rate(t, x)

    def time_rate(self, t, x0):
        return self.field.time_rate(t, x0) + 2.0 * abs(float(self.phase_rate(t)))
