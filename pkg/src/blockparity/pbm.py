"""Reader and writer for bi-level netpbm images (P1 ASCII and P4 raw).

Pixels follow the PBM convention: 1 is black, 0 is white. P4 rasters are
packed most-significant-bit first, leftmost pixel in the high bit, and each
row is padded with zero bits to a whole byte.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadDigit, BadHeader, BadMagic, Truncated

MAX_DIMENSION = 1_000_000

_WHITESPACE = b" \t\r\n\v\f"


class PbmVariant(enum.Enum):
    ASCII_P1 = "P1"
    RAW_P4 = "P4"


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """A read-only bi-level raster, stored row-major as a (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pixels, dtype=np.uint8, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D pixel grid, got shape {arr.shape}")
        if arr.size and arr.max() > 1:
            raise ValueError("pixel values must be 0 or 1")
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def pixel(self, x: int, y: int) -> int:
        return int(self.pixels[y, x])

    def to_array(self) -> np.ndarray:
        """Return a writable copy of the pixel grid."""
        return self.pixels.copy()

    @classmethod
    def blank(cls, width: int, height: int, value: int = 0) -> "BinaryImage":
        return cls(np.full((height, width), value, dtype=np.uint8))

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"BinaryImage(width={self.width}, height={self.height})"


class _Cursor:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def skip_whitespace(self, allow_comments: bool) -> None:
        data = self.data
        while self.pos < len(data):
            ch = data[self.pos]
            if ch in _WHITESPACE:
                self.pos += 1
            elif allow_comments and ch == 0x23:
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            else:
                break

    def read_int(self, what: str) -> int:
        start = self.pos
        while self.pos < len(self.data) and 0x30 <= self.data[self.pos] <= 0x39:
            self.pos += 1
        token = self.data[start:self.pos]
        if not token:
            found = self.data[start:start + 1]
            raise BadHeader(f"expected numeric {what}, found {found!r}" if found else f"missing {what}")
        value = int(token)
        if not 1 <= value <= MAX_DIMENSION:
            raise BadHeader(f"{what} {value} outside 1..{MAX_DIMENSION}")
        return value


def decode_pbm(data: bytes) -> BinaryImage:
    data = bytes(data)
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        raise BadMagic(f"unsupported magic number {magic!r}")
    cur = _Cursor(data, 2)
    if cur.pos < len(data) and data[cur.pos] not in _WHITESPACE + b"#":
        raise BadMagic(f"unsupported magic number {data[:3]!r}")

    cur.skip_whitespace(allow_comments=True)
    width = cur.read_int("width")
    cur.skip_whitespace(allow_comments=False)
    height = cur.read_int("height")

    if magic == b"P4":
        # exactly one whitespace byte separates the header from the raster
        if cur.pos >= len(data) or data[cur.pos] not in _WHITESPACE:
            raise Truncated("missing raster after header")
        start = cur.pos + 1
        row_bytes = (width + 7) // 8
        need = row_bytes * height
        raster = data[start:start + need]
        if len(raster) < need:
            raise Truncated(f"raster has {len(raster)} bytes, expected {need}")
        rows = np.frombuffer(raster, dtype=np.uint8).reshape(height, row_bytes)
        return BinaryImage(np.unpackbits(rows, axis=1)[:, :width])

    body = data[cur.pos:]
    digits = body.translate(None, _WHITESPACE)
    bad = digits.translate(None, b"01")
    if bad:
        raise BadDigit(f"unexpected character {bad[:1]!r} in P1 raster")
    need = width * height
    if len(digits) < need:
        raise Truncated(f"raster has {len(digits)} pixels, expected {need}")
    arr = np.frombuffer(digits[:need], dtype=np.uint8) - ord("0")
    return BinaryImage(arr.reshape(height, width))


def encode_pbm(img: BinaryImage, variant: PbmVariant = PbmVariant.RAW_P4) -> bytes:
    header = f"{variant.value}\n{img.width} {img.height}\n".encode("ascii")
    if variant is PbmVariant.RAW_P4:
        # packbits zero-fills the tail of each row
        return header + np.packbits(img.pixels, axis=1).tobytes()
    lines = [bytes(row + ord("0")) for row in img.pixels]
    return header + b"\n".join(lines) + b"\n"


def read_pbm(path) -> BinaryImage:
    return decode_pbm(Path(path).read_bytes())


def write_pbm(path, img: BinaryImage, variant: PbmVariant = PbmVariant.RAW_P4) -> None:
    Path(path).write_bytes(encode_pbm(img, variant))
