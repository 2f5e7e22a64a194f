"""
Right-hand side of the coefficient system

    dA_k/dt = i*c0/t * [ sum_{NR_k} exp(-i*omega/(4t)) A_j1 conj(A_j2) A_j3 + A_k (2M - |A_k|^2) ].

The full bracket (resonant plus nonresonant terms) is evaluated in O(K^2)
through the factorization omega = 2ab with a = k - j1, b = k - j3:

    bracket_k = sum_a A_{k-a} exp(-2iakw) C_a,   C_a = sum_m exp(2iamw) A_m conj(A_{m-a}),

where w = 1/(4t). The a = 0 row gives A_k*M, the b = 0 terms are folded into C_a.
"""

import logging
from functools import lru_cache

import numpy as np

from seqcore import ComplexSeq
from .base import NLS_COUPLING, CoeffState, NonresonantTriple, band_indices

logger = logging.getLogger(__name__)


def resonant_partition(k: int, band):
    """
    Split every (j1, j2, j3) in band^3 with k - j1 + j2 - j3 = 0 by phase.

    Args:
        k (int): Target mode
        band: Half-width K, a range, or an iterable of indices

    Returns:
        tuple: (list of resonant (j1, j2, j3) tuples, list of NonresonantTriple)
    """
    indices = band_indices(band)
    members = set(indices.tolist())
    resonant, nonresonant = [], []
    for j1 in indices:
        for j3 in indices:
            j2 = int(j1 + j3 - k)
            if j2 not in members:
                continue
            triple = NonresonantTriple(int(k), int(j1), j2, int(j3))
            if triple.omega == 0:
                resonant.append(triple.as_tuple())
            else:
                nonresonant.append(triple)
    return resonant, nonresonant


@lru_cache(maxsize=64)
def _bracket_layout(K):
    """Index and integer-phase tables of the factorized bracket for band half-width K."""
    idx = np.arange(-K, K + 1)
    shifts = np.arange(-2 * K, 2 * K + 1)

    # rows a, columns m: A_{m-a}
    diff_c = idx[None, :] - shifts[:, None]
    inside_c = np.abs(diff_c) <= K
    pos_c = np.clip(diff_c + K, 0, 2 * K)

    # rows k, columns a: A_{k-a}
    diff_s = idx[:, None] - shifts[None, :]
    inside_s = np.abs(diff_s) <= K
    pos_s = np.clip(diff_s + K, 0, 2 * K)

    phase = 2.0 * shifts[:, None] * idx[None, :]
    for table in (inside_c, pos_c, inside_s, pos_s, phase):
        table.setflags(write=False)
    return inside_c, pos_c, inside_s, pos_s, phase


def nonlinear_bracket(values, w):
    """
    Full cubic bracket (nonresonant sum plus A_k(2M - |A_k|^2)) for a centered array.

    Args:
        values (np.ndarray): Coefficients A_k, length 2K+1
        w (float): Phase weight 1/(4t); the pseudo-conformal dual uses -s/4

    Returns:
        np.ndarray: bracket_k for every k in the band
    """
    values = np.asarray(values, dtype=complex)
    K = (values.size - 1) // 2
    inside_c, pos_c, inside_s, pos_s, phase = _bracket_layout(K)

    E = np.exp(1j * w * phase)
    conj_shift = np.where(inside_c, np.conj(values)[pos_c], 0.0)
    C = np.sum(E * values[None, :] * conj_shift, axis=1)

    shifted = np.where(inside_s, values[pos_s], 0.0)
    return np.sum(shifted * np.conj(E.T) * C[None, :], axis=1)


def system_rhs(state: CoeffState, coupling: float = NLS_COUPLING) -> ComplexSeq:
    """
    dA_k/dt of the coefficient system at the given state.

    Args:
        state (CoeffState): Current coefficients (t > 0 enforced by CoeffState)
        coupling (float): Coupling c0

    Returns:
        ComplexSeq: Time derivative of every A_k
    """
    t = state.t
    bracket = nonlinear_bracket(state.values, 1.0 / (4.0 * t))
    return ComplexSeq(state.K, 1j * coupling / t * bracket)


def system_rhs_direct(state: CoeffState, coupling: float = NLS_COUPLING) -> ComplexSeq:
    """Term-by-term evaluation over the resonant partition (oracle for system_rhs)."""
    t, A, M = state.t, state.A, state.M
    out = np.zeros(2 * state.K + 1, dtype=complex)
    for pos, k in enumerate(A.indices):
        _, nonresonant = resonant_partition(int(k), state.K)
        total = 0j
        for tri in nonresonant:
            total += np.exp(-1j * tri.omega / (4.0 * t)) * A[tri.j1] * np.conj(A[tri.j2]) * A[tri.j3]
        total += A[k] * (2.0 * M - abs(A[k]) ** 2)
        out[pos] = 1j * coupling / t * total
    return ComplexSeq(state.K, out)


def dual_system_rhs(state: CoeffState, coupling: float = NLS_COUPLING) -> ComplexSeq:
    """
    dB_k/ds of the pseudo-conformal dual system, B_k(s) = conj(A_k(1/s)).

    dB_k/ds = i*c0/s * bracket_k(B) with phase weight w = -s/4.
    """
    s = state.t
    bracket = nonlinear_bracket(state.values, -s / 4.0)
    return ComplexSeq(state.K, 1j * coupling / s * bracket)
