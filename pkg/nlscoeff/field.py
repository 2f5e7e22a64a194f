"""Pointwise evaluation of the Dirac superposition u(t,x) = sum A_k exp(i(x-k)^2/(4t)) / sqrt(t)."""

import logging

import numpy as np

from seqcore import ComplexSeq
from .base import CoeffState

logger = logging.getLogger(__name__)

# Grid points evaluated per block, bounds the (points x modes) work array.
EVAL_CHUNK = 4096


def superpose(t, values, x, derivative=False, chunk=EVAL_CHUNK):
    """
    Sum the Gaussian-phase kernels on a grid at one time.

    Args:
        t (float): Time (> 0)
        values (array-like): Coefficients A_k, length 2K+1
        x (array-like): Evaluation points
        derivative (bool): Also return du/dx (termwise, i(x-k)/(2t) factor)
        chunk (int): Points per evaluation block

    Returns:
        np.ndarray or tuple: u, or (u, u_x)
    """
    values = np.asarray(values, dtype=complex)
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    K = (values.size - 1) // 2
    modes = np.arange(-K, K + 1, dtype=float)
    support = np.flatnonzero(values)
    u = np.zeros(flat.size, dtype=complex)
    ux = np.zeros(flat.size, dtype=complex) if derivative else None

    if support.size:
        active, coeffs = modes[support], values[support]
        scale = 1.0 / np.sqrt(t)
        for lo in range(0, flat.size, chunk):
            dx = flat[lo:lo + chunk, None] - active[None, :]
            terms = np.exp(1j * dx**2 / (4.0 * t)) * coeffs[None, :] * scale
            u[lo:lo + chunk] = terms.sum(axis=1)
            if derivative:
                ux[lo:lo + chunk] = (terms * (1j * dx / (2.0 * t))).sum(axis=1)

    u = u.reshape(x.shape)
    if derivative:
        return u, ux.reshape(x.shape)
    return u


def evaluate_u(state: CoeffState, x, derivative=False):
    """u(t, x) (and optionally du/dx) for the coefficients held in a CoeffState."""
    return superpose(state.t, state.values, x, derivative=derivative)


def superpose_at(times, values, x0, derivative=False):
    """
    u at one point x0 along many times.

    Args:
        times (array-like): Times, shape (n,)
        values (array-like): Coefficients per time, shape (n, 2K+1)
        x0 (float): Evaluation point

    Returns:
        np.ndarray or tuple: u(t_i, x0), or (u, u_x)
    """
    times = np.asarray(times, dtype=float)
    values = np.atleast_2d(np.asarray(values, dtype=complex))
    K = (values.shape[1] - 1) // 2
    dx = x0 - np.arange(-K, K + 1, dtype=float)
    kernels = np.exp(1j * dx[None, :] ** 2 / (4.0 * times[:, None])) / np.sqrt(times[:, None])
    terms = values * kernels
    u = terms.sum(axis=1)
    if derivative:
        ux = (terms * (1j * dx[None, :] / (2.0 * times[:, None]))).sum(axis=1)
        return u, ux
    return u


def pseudo_conformal(state: CoeffState) -> CoeffState:
    """
    Coefficients of the periodic dual solution at time 1/t: B_k(1/t) = conj(A_k(t)).

    Applying the map twice returns the original state.
    """
    return CoeffState(1.0 / state.t, ComplexSeq(state.K, np.conj(state.values)), M=state.M)
