"""Constant-composition distribution matching (CCDM).

A matcher maps k uniform data bits to an n-symbol sequence whose empirical
symbol counts equal a fixed composition, and back. The mapping is exact
arithmetic coding over big integers: the 2^k data intervals of width 2^-k
are placed on [0, 1), the constant-composition sequences partition [0, 1)
into multinomial(n; counts) lexicographic subintervals (at each position,
candidate symbols in index order get widths proportional to their remaining
counts), and a data word maps to the sequence whose subinterval contains
its lower endpoint. All interval arithmetic uses integers over the
multinomial denominator, so matching is bit-exact across platforms and
dematch(match(d)) = d always holds.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bits import as_bits, bits_to_int, int_to_bits


class DecodeError(ValueError):
    """A symbol sequence cannot be inverted by the configured matcher."""

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


@dataclass(frozen=True)
class Composition:
    """Occurrence counts of each output symbol in a length-n sequence."""

    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) < 1 or any(c < 0 for c in counts):
            raise ValueError("composition counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def q(self) -> int:
        return len(self.counts)

    def probabilities(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n


def multinomial(counts) -> int:
    """Exact number of sequences with the given symbol counts."""
    n = sum(counts)
    value = math.factorial(n)
    for c in counts:
        value //= math.factorial(c)
    return value


def input_length(comp: Composition) -> int:
    """Largest k with 2^k <= multinomial(n; counts)."""
    return multinomial(comp.counts).bit_length() - 1


@dataclass(frozen=True)
class CcdmConfig:
    """A sized matcher: composition plus its input length in bits."""

    composition: Composition
    k: int

    def __post_init__(self):
        expected = input_length(self.composition)
        if self.k != expected:
            raise ValueError("k=%d does not match composition (expected %d)" % (self.k, expected))

    @classmethod
    def from_counts(cls, counts) -> "CcdmConfig":
        comp = Composition(tuple(counts))
        return cls(comp, input_length(comp))

    @property
    def n(self) -> int:
        return self.composition.n

    @property
    def rate(self) -> float:
        return self.k / self.n


def quantize_distribution(target, n: int) -> Composition:
    """Quantize a probability vector to integer counts summing to n.

    Largest-remainder rounding: floor(n*p) per symbol, then the leftover
    slots go to the largest fractional parts, ties toward the smaller
    symbol index.
    """
    target = np.asarray(target, dtype=float)
    if n < 1:
        raise ValueError("output length must be >= 1")
    if target.ndim != 1 or target.size < 1 or np.any(target < -1e-12):
        raise ValueError("target must be a probability vector")
    if abs(target.sum() - 1.0) > 1e-9:
        raise ValueError("target probabilities sum to %g, not 1" % target.sum())
    scaled = n * np.clip(target, 0.0, None)
    counts = np.floor(scaled).astype(int)
    frac = scaled - counts
    leftover = n - int(counts.sum())
    for i in sorted(range(target.size), key=lambda i: (-frac[i], i))[:leftover]:
        counts[i] += 1
    return Composition(tuple(int(c) for c in counts))


def rate_loss(cfg: CcdmConfig) -> float:
    """Entropy of the output distribution minus the matcher rate, bits/symbol."""
    p = cfg.composition.probabilities()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum()) - cfg.k / cfg.n


def match(cfg: CcdmConfig, data) -> np.ndarray:
    """Map k data bits to an n-symbol sequence with the configured composition."""
    data = as_bits(data)
    if data.size != cfg.k:
        raise ValueError("expected %d data bits, got %d" % (cfg.k, data.size))
    total = multinomial(cfg.composition.counts)
    index = (bits_to_int(data) * total) >> cfg.k
    return _unrank(cfg.composition, index, total)


def dematch(cfg: CcdmConfig, symbols) -> np.ndarray:
    """Invert :func:`match`; raises :class:`DecodeError` off the image."""
    symbols = np.asarray(symbols)
    counts = cfg.composition.counts
    if symbols.shape != (cfg.n,):
        raise DecodeError("expected %d symbols, got shape %r" % (cfg.n, symbols.shape))
    observed = np.bincount(symbols.astype(np.int64), minlength=len(counts))
    if observed.size > len(counts) or tuple(observed[: len(counts)]) != counts:
        raise DecodeError("sequence composition does not match the configuration")
    total = multinomial(counts)
    index = _rank(cfg.composition, symbols, total)
    data = ((index << cfg.k) + total - 1) // total  # ceil(index * 2^k / total)
    if data >= (1 << cfg.k) or (data * total) >> cfg.k != index:
        raise DecodeError("sequence is outside the matcher image")
    return int_to_bits(data, cfg.k)


def _unrank(comp: Composition, index: int, total: int) -> np.ndarray:
    remaining = list(comp.counts)
    completions = total
    out = np.empty(comp.n, dtype=np.uint8)
    for pos in range(comp.n):
        r = comp.n - pos
        acc = 0
        for s, c in enumerate(remaining):
            if c == 0:
                continue
            cnt = completions * c // r  # sequences continuing with symbol s
            if index < acc + cnt:
                out[pos] = s
                index -= acc
                completions = cnt
                remaining[s] = c - 1
                break
            acc += cnt
    return out


def _rank(comp: Composition, symbols: np.ndarray, total: int) -> int:
    remaining = list(comp.counts)
    completions = total
    index = 0
    for pos, sym in enumerate(symbols):
        r = comp.n - pos
        sym = int(sym)
        for s in range(sym):
            if remaining[s]:
                index += completions * remaining[s] // r
        completions = completions * remaining[sym] // r
        remaining[sym] -= 1
    return index
