"""Weight-matrix baseline: r bits per m x n block via key K and weights W.

A block F carries the residue ``sum((F xor K) * W) mod 2**r``. Embedding
changes at most two cells, found by exhaustive search over single flips and
then flip pairs in row-major order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import payload
from .errors import CapacityExceeded, DimensionMismatch, InvalidConfig, NoSolution, NotAStegoImage
from .parity import EmbedReport
from .pbm import BinaryImage


@dataclass(frozen=True, eq=False)
class CptConfig:
    key: np.ndarray      # m x n, 0/1
    weights: np.ndarray  # m x n, values in 1 .. 2**r - 1
    r: int

    def __post_init__(self):
        key = np.array(self.key, dtype=np.int64)
        weights = np.array(self.weights, dtype=np.int64)
        if key.ndim != 2 or key.shape != weights.shape or key.size == 0:
            raise InvalidConfig(f"key {key.shape} and weights {weights.shape} must be equal non-empty matrices")
        if not np.isin(key, (0, 1)).all():
            raise InvalidConfig("key matrix must hold only 0 and 1")
        m, n = key.shape
        limit = int(math.floor(math.log2(m * n + 1)))
        if not 1 <= self.r <= limit:
            raise InvalidConfig(f"r={self.r} outside 1..{limit} for a {m}x{n} block")
        top = 2**self.r - 1
        if weights.min() < 1 or weights.max() > top:
            raise InvalidConfig(f"weights must lie in 1..{top}")
        missing = sorted(set(range(1, top + 1)) - set(weights.ravel().tolist()))
        if missing:
            raise InvalidConfig(f"weights never take the values {missing}; two flips cannot reach every residue")
        key.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "weights", weights)

    @property
    def m(self) -> int:
        return self.key.shape[0]

    @property
    def n(self) -> int:
        return self.key.shape[1]

    @property
    def modulus(self) -> int:
        return 2**self.r

    def __eq__(self, other):
        if not isinstance(other, CptConfig):
            return NotImplemented
        return (self.r == other.r and np.array_equal(self.key, other.key)
                and np.array_equal(self.weights, other.weights))


def default_config(m: int = 5, n: int = 5, r: Optional[int] = None) -> CptConfig:
    """All-zero key; weights cycle through 1..2**r-1 in row-major order."""
    if r is None:
        r = int(math.floor(math.log2(m * n + 1)))
    cycle = np.arange(m * n) % (2**r - 1) + 1
    return CptConfig(np.zeros((m, n), dtype=np.int64), cycle.reshape(m, n), r)


def _check(block, cfg):
    block = np.asarray(block)
    if block.shape != cfg.key.shape:
        raise DimensionMismatch(f"block {block.shape} does not match config {cfg.key.shape}")
    return block


def cpt_residue(block, cfg: CptConfig) -> int:
    block = _check(block, cfg)
    return int(((block.astype(np.int64) ^ cfg.key) * cfg.weights).sum() % cfg.modulus)


def cpt_embed_block(block: np.ndarray, cfg: CptConfig, d: int):
    """Change at most two cells of ``block`` in place so it carries ``d``.

    Returns the flipped cells as 1-based (row, col) pairs, or None when the
    block already carries ``d``.
    """
    block = _check(block, cfg)
    if not 0 <= d < cfg.modulus:
        raise ValueError(f"value {d} does not fit in {cfg.r} bits")
    flat = block.reshape(-1)
    s = cpt_residue(block, cfg)
    if s == d:
        return None
    x = flat.astype(np.int64) ^ cfg.key.ravel()
    delta = cfg.weights.ravel() * (1 - 2 * x)
    target = (d - s) % cfg.modulus

    hits = np.flatnonzero(delta % cfg.modulus == target)
    if hits.size:
        cells = (int(hits[0]),)
    else:
        p, q = np.triu_indices(flat.size, k=1)
        pair_hits = np.flatnonzero((delta[p] + delta[q]) % cfg.modulus == target)
        if not pair_hits.size:
            raise NoSolution(f"no one- or two-cell change reaches residue {d}; check the weight matrix")
        cells = (int(p[pair_hits[0]]), int(q[pair_hits[0]]))
    flips = tuple(divmod(c, cfg.n) for c in cells)
    for row, col in flips:
        block[row, col] ^= 1
    return tuple((row + 1, col + 1) for row, col in flips)


def cpt_extract_block(block, cfg: CptConfig) -> int:
    return cpt_residue(block, cfg)


def _tiles(pixels: np.ndarray, cfg: CptConfig) -> np.ndarray:
    rows, cols = pixels.shape[0] // cfg.m, pixels.shape[1] // cfg.n
    region = pixels[:rows * cfg.m, :cols * cfg.n]
    return region.reshape(rows, cfg.m, cols, cfg.n).swapaxes(1, 2)


def cpt_capacity_bits(img: BinaryImage, cfg: CptConfig) -> int:
    return cfg.r * (img.height // cfg.m) * (img.width // cfg.n)


def cpt_embed_message(img: BinaryImage, message: bytes, cfg: CptConfig) -> tuple[BinaryImage, EmbedReport]:
    """Embed every framed r-bit group into consecutive blocks in scan order."""
    bits = payload.frame_message(message)
    groups = payload.to_groups(bits, cfg.r)
    stego = img.to_array()
    tiles = _tiles(stego, cfg)
    grid_cols = tiles.shape[1]
    available = tiles.shape[0] * grid_cols
    if len(groups) > available:
        spare = max(0, (cpt_capacity_bits(img, cfg) - payload.HEADER_BITS) // 8)
        raise CapacityExceeded(
            f"message needs {len(groups)} blocks, image has {available} "
            f"(short by {len(message) - spare} bytes)",
            shortfall_bytes=len(message) - spare,
        )
    report = EmbedReport(blocks_used=len(groups), bits_embedded=int(bits.size))
    for idx, value in enumerate(groups):
        gr, gc = divmod(idx, grid_cols)
        flips = cpt_embed_block(tiles[gr, gc], cfg, value)
        report.total_flips += len(flips or ())
        report.per_block.append(((gr, gc), value, flips))
    return BinaryImage(stego), report


def cpt_extract_message(img: BinaryImage, cfg: CptConfig) -> bytes:
    tiles = _tiles(img.pixels, cfg)
    flat = tiles.reshape(-1, cfg.m, cfg.n)
    header_blocks = -(-payload.HEADER_BITS // cfg.r)
    if flat.shape[0] < header_blocks:
        raise NotAStegoImage(f"image has {flat.shape[0]} blocks, the length header needs {header_blocks}")
    head = [cpt_residue(t, cfg) for t in flat[:header_blocks]]
    n_bits = payload.read_length(payload.from_groups(head, cfg.r))
    total = -(-(payload.HEADER_BITS + n_bits) // cfg.r)
    if total > flat.shape[0]:
        raise NotAStegoImage(f"header announces {n_bits} payload bits, image holds at most "
                             f"{flat.shape[0] * cfg.r - payload.HEADER_BITS}")
    rest = [cpt_residue(t, cfg) for t in flat[header_blocks:total]]
    return payload.unframe_message(payload.from_groups(head + rest, cfg.r))


def parse_config(text: str) -> CptConfig:
    """Text form: "m n r", then m rows of K as 0/1 strings, then m rows of W.

    Blank lines and '#' comments are ignored.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    try:
        m, n, r = (int(v) for v in lines[0].split())
    except (IndexError, ValueError):
        raise InvalidConfig("first line must be 'm n r'") from None
    if len(lines) < 1 + 2 * m:
        raise InvalidConfig(f"expected {m} key rows and {m} weight rows")
    key_rows = [ln.replace(" ", "") for ln in lines[1:1 + m]]
    if any(len(row) != n or set(row) - {"0", "1"} for row in key_rows):
        raise InvalidConfig(f"key rows must be {n} characters of 0/1")
    try:
        weight_rows = [[int(v) for v in ln.split()] for ln in lines[1 + m:1 + 2 * m]]
    except ValueError:
        raise InvalidConfig("weight rows must be integers") from None
    if any(len(row) != n for row in weight_rows):
        raise InvalidConfig(f"weight rows must hold {n} integers")
    key = [[int(ch) for ch in row] for row in key_rows]
    return CptConfig(np.array(key), np.array(weight_rows), r)


def format_config(cfg: CptConfig) -> str:
    out = [f"{cfg.m} {cfg.n} {cfg.r}"]
    out += ["".join(str(int(v)) for v in row) for row in cfg.key]
    out += [" ".join(str(int(v)) for v in row) for row in cfg.weights]
    return "\n".join(out) + "\n"


def read_config(path) -> CptConfig:
    return parse_config(Path(path).read_text())
