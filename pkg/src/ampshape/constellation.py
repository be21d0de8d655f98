"""ASK constellations, label functions, and bit mappers.

Points of a 2^m-ASK constellation are the signed odd integers
{±1, ±3, ..., ±(2^m−1)}; amplitudes are the positive half. Two labelings
are supported:

* ``brgc`` — binary reflected Gray code over the full constellation,
  anchored so the most negative point gets the all-zeros label.
* ``nbbc`` — sign bit followed by the complemented natural binary index
  of the amplitude (all-ones amplitude bits label amplitude 1).

Both labelings share the sign convention of the 8-ASK reference table:
bit 1 is 0 for negative points and 1 for positive points, and bits 2..m
depend only on the amplitude (bit 2 is the most significant amplitude
bit). The amplitude-bit structure is what the product matcher relies on.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

LABEL_KINDS = ("brgc", "nbbc")


@dataclass(frozen=True)
class AskConstellation:
    """2^m-ASK constellation with its amplitude alphabet."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("ASK constellation needs m >= 2 bits per symbol")

    @property
    def order(self) -> int:
        return 1 << self.m

    @property
    def points(self) -> np.ndarray:
        """Signed odd points in ascending order."""
        return np.arange(-self.order + 1, self.order, 2)

    @property
    def amplitudes(self) -> np.ndarray:
        """Positive odd amplitudes in ascending order."""
        return np.arange(1, self.order, 2)


@dataclass(frozen=True)
class Labeling:
    """A bit labeling of a 2^m-ASK constellation."""

    kind: str
    m: int

    def __post_init__(self):
        if self.kind not in LABEL_KINDS:
            raise ValueError("unknown labeling kind %r" % (self.kind,))
        if self.m < 2:
            raise ValueError("labeling needs m >= 2")

    @property
    def constellation(self) -> AskConstellation:
        return AskConstellation(self.m)


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _gray_inverse(g: int) -> int:
    i = 0
    while g:
        i ^= g
        g >>= 1
    return i


@lru_cache(maxsize=None)
def amplitude_label_table(kind: str, m: int) -> np.ndarray:
    """(2^(m−1), m−1) bit table; row v labels amplitude 2v+1."""
    half = 1 << (m - 1)
    rows = np.zeros((half, m - 1), dtype=np.uint8)
    for v in range(half):
        if kind == "nbbc":
            value = half - 1 - v
        elif kind == "brgc":
            value = _gray(half - 1 - v)
        else:
            raise ValueError("unknown labeling kind %r" % (kind,))
        rows[v] = [(value >> (m - 2 - t)) & 1 for t in range(m - 1)]
    return rows


@lru_cache(maxsize=None)
def label_table(kind: str, m: int) -> np.ndarray:
    """(2^m, m) bit table for points in ascending order."""
    amp = amplitude_label_table(kind, m)
    half = 1 << (m - 1)
    rows = np.zeros((2 * half, m), dtype=np.uint8)
    # negative points descend in amplitude as the index ascends
    rows[:half, 0] = 0
    rows[:half, 1:] = amp[::-1]
    rows[half:, 0] = 1
    rows[half:, 1:] = amp
    return rows


@lru_cache(maxsize=None)
def _point_index_by_label(kind: str, m: int) -> np.ndarray:
    table = label_table(kind, m)
    weights = 1 << np.arange(m - 1, -1, -1)
    inv = np.zeros(1 << m, dtype=np.int64)
    inv[(table * weights).sum(axis=1)] = np.arange(1 << m)
    return inv


@lru_cache(maxsize=None)
def _amp_value_by_label(kind: str, m: int) -> np.ndarray:
    table = amplitude_label_table(kind, m)
    weights = 1 << np.arange(m - 2, -1, -1)
    inv = np.zeros(1 << (m - 1), dtype=np.int64)
    inv[(table * weights).sum(axis=1)] = np.arange(1 << (m - 1))
    return inv


def label_symbol(labeling: Labeling, x: int) -> np.ndarray:
    """Label a constellation point; bit 1 is the sign bit."""
    order = 1 << labeling.m
    if not (isinstance(x, (int, np.integer)) and abs(x) <= order - 1 and abs(x) % 2 == 1):
        raise ValueError("%r is not a point of %d-ASK" % (x, order))
    index = (int(x) + order - 1) // 2
    return label_table(labeling.kind, labeling.m)[index].copy()


def map_bits(labeling: Labeling, bits) -> int:
    """Inverse of :func:`label_symbol`."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape != (labeling.m,):
        raise ValueError("expected %d label bits, got shape %r" % (labeling.m, bits.shape))
    value = int(bits_value(bits))
    index = int(_point_index_by_label(labeling.kind, labeling.m)[value])
    return int(AskConstellation(labeling.m).points[index])


def amplitude_label(labeling: Labeling, amplitude: int) -> np.ndarray:
    """Amplitude part of the label (bits 2..m)."""
    order = 1 << labeling.m
    if not (0 < amplitude < order and amplitude % 2 == 1):
        raise ValueError("%r is not an amplitude of %d-ASK" % (amplitude, order))
    return amplitude_label_table(labeling.kind, labeling.m)[(amplitude - 1) // 2].copy()


def amplitude_map(labeling: Labeling, bits) -> int:
    """Map m−1 amplitude-label bits back to the amplitude."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape != (labeling.m - 1,):
        raise ValueError(
            "expected %d amplitude bits, got shape %r" % (labeling.m - 1, bits.shape)
        )
    value = int(bits_value(bits))
    v = int(_amp_value_by_label(labeling.kind, labeling.m)[value])
    return 2 * v + 1


def bits_value(bits: np.ndarray) -> np.ndarray:
    """Unsigned integer value of bit rows (MSB first), vectorized over rows."""
    width = bits.shape[-1]
    weights = 1 << np.arange(width - 1, -1, -1)
    return (bits * weights).sum(axis=-1)


def amplitude_labels_vec(labeling: Labeling, amplitudes) -> np.ndarray:
    """Amplitude labels for a vector of amplitudes, shape (n, m−1)."""
    amplitudes = np.asarray(amplitudes)
    return amplitude_label_table(labeling.kind, labeling.m)[(amplitudes - 1) // 2]


def amplitudes_from_labels_vec(labeling: Labeling, bits: np.ndarray) -> np.ndarray:
    """Amplitudes for rows of amplitude-label bits, shape (n,)."""
    values = bits_value(np.asarray(bits, dtype=np.uint8))
    return 2 * _amp_value_by_label(labeling.kind, labeling.m)[values] + 1
