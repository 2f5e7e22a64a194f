import logging
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ComplexSeq:
    """
    Finitely supported complex sequence {alpha_k} indexed by k in [-K, K].

    Values are stored densely (2K+1 entries, index k sits at position k + K)
    and frozen after construction. Everything outside the band is zero.
    """

    K: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.K < 0:
            raise ValueError(f"Band half-width must be nonnegative, got K={self.K}")
        values = np.array(self.values, dtype=complex).reshape(-1)
        if values.size != 2 * self.K + 1:
            raise ValueError(
                f"Expected {2 * self.K + 1} values for K={self.K}, got {values.size}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------
    @classmethod
    def zeros(cls, K):
        return cls(K, np.zeros(2 * K + 1, dtype=complex))

    @classmethod
    def from_dict(cls, entries, K=None):
        """
        Build a sequence from a {k: value} mapping.

        Args:
            entries (dict): Nonzero entries keyed by integer index
            K (int, optional): Band half-width; defaults to the smallest band holding all keys

        Returns:
            ComplexSeq
        """
        radius = max((abs(int(k)) for k in entries), default=0)
        K = radius if K is None else int(K)
        if radius > K:
            raise ValueError(f"Index {radius} lies outside the band [-{K}, {K}]")
        values = np.zeros(2 * K + 1, dtype=complex)
        for k, value in entries.items():
            values[int(k) + K] = value
        return cls(K, values)

    @classmethod
    def from_array(cls, values):
        """Build from a centered array of odd length 2K+1."""
        values = np.asarray(values, dtype=complex).reshape(-1)
        if values.size % 2 != 1:
            raise ValueError(f"Centered array must have odd length, got {values.size}")
        return cls((values.size - 1) // 2, values)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------
    @property
    def indices(self):
        return np.arange(-self.K, self.K + 1)

    def __getitem__(self, k):
        k = int(k)
        if abs(k) > self.K:
            return 0j
        return complex(self.values[k + self.K])

    def __len__(self):
        return self.values.size

    def take(self, indices):
        """Vectorized lookup that returns 0 outside the band."""
        indices = np.asarray(indices)
        inside = np.abs(indices) <= self.K
        out = np.zeros(indices.shape, dtype=complex)
        out[inside] = self.values[indices[inside] + self.K]
        return out

    def support(self):
        """Indices carrying a nonzero value."""
        return self.indices[self.values != 0]

    def mass(self):
        """Sum of |alpha_k|^2."""
        return float(np.sum(np.abs(self.values) ** 2))

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------
    def scale(self, factor):
        return ComplexSeq(self.K, self.values * factor)

    def conjugate(self):
        return ComplexSeq(self.K, np.conj(self.values))

    def reversed(self):
        """The sequence k -> alpha_{-k}."""
        return ComplexSeq(self.K, self.values[::-1])

    def with_band(self, K):
        """Zero-pad (or crop, if the dropped entries vanish) to half-width K."""
        K = int(K)
        if K == self.K:
            return self
        if K > self.K:
            values = np.zeros(2 * K + 1, dtype=complex)
            values[K - self.K:K + self.K + 1] = self.values
            return ComplexSeq(K, values)
        dropped = np.concatenate([self.values[:self.K - K], self.values[self.K + K + 1:]])
        if np.any(dropped != 0):
            raise ValueError(f"Cannot crop to K={K}: nonzero entries would be lost")
        return ComplexSeq(K, self.values[self.K - K:self.K + K + 1])

    def __add__(self, other):
        K = max(self.K, other.K)
        return ComplexSeq(K, self.with_band(K).values + other.with_band(K).values)

    def to_dict(self):
        return {int(k): complex(v) for k, v in zip(self.indices, self.values) if v != 0}


def japanese_bracket(k):
    """<k> = (1 + k^2)^(1/2)."""
    k = np.asarray(k, dtype=float)
    return np.sqrt(1.0 + k * k)


def weighted_norm(seq: ComplexSeq, s: float) -> float:
    """
    l^{2,s} norm (sum_k <k>^{2s} |alpha_k|^2)^(1/2) over the finite support.

    Args:
        seq (ComplexSeq): Sequence to measure
        s (float): Nonnegative regularity index

    Returns:
        float: The weighted norm

    Raises:
        ValueError: If s is negative
    """
    if s < 0:
        raise ValueError(f"Weight index s must be nonnegative, got {s}")
    weights = (1.0 + seq.indices.astype(float) ** 2) ** s
    return float(np.sqrt(np.sum(weights * np.abs(seq.values) ** 2)))
