"""Framing of byte messages into the embedded bit stream.

Wire layout: a 32-bit big-endian count N of payload bits, then the N
payload bits, each byte serialized most-significant bit first. Bit
sequences are 1-D uint8 numpy arrays holding 0/1.
"""
from __future__ import annotations

import numpy as np

from .errors import BadLength, TooLong, Underflow

HEADER_BITS = 32
MAX_MESSAGE_BYTES = 2**29 - 1


def as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8).reshape(-1)
    if arr.size and arr.max() > 1:
        raise ValueError("bit values must be 0 or 1")
    return arr


def int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def bits_to_int(bits) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def frame_message(message: bytes) -> np.ndarray:
    message = bytes(message)
    if len(message) > MAX_MESSAGE_BYTES:
        raise TooLong(f"message of {len(message)} bytes exceeds the {MAX_MESSAGE_BYTES}-byte limit")
    body = np.unpackbits(np.frombuffer(message, dtype=np.uint8))
    return np.concatenate([int_to_bits(8 * len(message), HEADER_BITS), body]).astype(np.uint8)


def read_length(bits) -> int:
    """Payload bit count N stored in the first 32 bits."""
    bits = as_bits(bits)
    if bits.size < HEADER_BITS:
        raise Underflow(f"need {HEADER_BITS} header bits, have {bits.size}")
    return bits_to_int(bits[:HEADER_BITS])


def unframe_message(bits) -> bytes:
    bits = as_bits(bits)
    n = read_length(bits)
    if n % 8:
        raise BadLength(f"payload length {n} bits is not a whole number of bytes")
    body = bits[HEADER_BITS:HEADER_BITS + n]
    if body.size < n:
        raise Underflow(f"header announces {n} payload bits, only {body.size} available")
    return np.packbits(body).tobytes()


def to_nibbles(bits) -> list[int]:
    """Group bits into 4-bit values, first bit most significant, zero-padding the last group."""
    return to_groups(bits, 4)


def to_groups(bits, width: int) -> list[int]:
    bits = as_bits(bits)
    pad = -bits.size % width
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    weights = 1 << np.arange(width - 1, -1, -1)
    return [int(v) for v in bits.reshape(-1, width).astype(np.int64) @ weights]


def from_groups(groups, width: int) -> np.ndarray:
    if not len(groups):
        return np.zeros(0, dtype=np.uint8)
    return np.concatenate([int_to_bits(int(g), width) for g in groups])


def from_nibbles(nibbles) -> np.ndarray:
    return from_groups(nibbles, 4)
