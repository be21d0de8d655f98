"""Bit-vector helpers shared by the matchers and the PAS chain.

Bit vectors are numpy uint8 arrays with values in {0, 1}. Packed byte
payloads are MSB-first: bit 0 of a vector is the most significant bit of
byte 0.
"""

import numpy as np


def as_bits(x) -> np.ndarray:
    """Coerce a sequence of 0/1 values to a uint8 bit vector."""
    bits = np.asarray(x, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError("bit vector must be one-dimensional")
    if bits.size and bits.max() > 1:
        raise ValueError("bit vector entries must be 0 or 1")
    return bits


def pack_bits(bits) -> bytes:
    """Pack a bit vector into bytes, MSB first. Length must be a multiple of 8."""
    bits = as_bits(bits)
    if bits.size % 8:
        raise ValueError("bit count %d is not a multiple of 8" % bits.size)
    return np.packbits(bits).tobytes()


def unpack_bits(payload: bytes) -> np.ndarray:
    """Unpack bytes into a bit vector, MSB first."""
    return np.unpackbits(np.frombuffer(payload, dtype=np.uint8))


def bits_to_int(bits) -> int:
    """Interpret a bit vector as an unsigned integer, MSB first."""
    bits = as_bits(bits)
    value = 0
    for b in np.packbits(bits).tobytes():
        value = (value << 8) | b
    pad = (-bits.size) % 8
    return value >> pad


def int_to_bits(value: int, width: int) -> np.ndarray:
    """Binary digits of ``value`` as a bit vector of length ``width``, MSB first."""
    if value < 0 or (width < value.bit_length()):
        raise ValueError("value %d does not fit in %d bits" % (value, width))
    if width == 0:
        return np.zeros(0, dtype=np.uint8)
    nbytes = (width + 7) // 8
    raw = (value << ((-width) % 8)).to_bytes(nbytes, "big")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:width]
