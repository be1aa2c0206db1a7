"""5x5 tiling of an image, carrier-block selection, capacity and block keys."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CapacityExceeded, ImageTooSmall, KeyListError
from .payload import HEADER_BITS

BLOCK = 5
BITS_PER_BLOCK = 4
HEADER_BLOCKS = -(-HEADER_BITS // BITS_PER_BLOCK)  # 8
UNKEYED = 5

LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class BlockRef:
    grid_row: int
    grid_col: int
    index: int = 0  # position in row-major scan order

    @property
    def origin_x(self) -> int:
        return BLOCK * self.grid_col

    @property
    def origin_y(self) -> int:
        return BLOCK * self.grid_row

    def cell(self, row: int, col: int) -> tuple[int, int]:
        """Global (y, x) of 1-based block cell (row, col)."""
        return self.origin_y + row - 1, self.origin_x + col - 1

    @property
    def cells(self) -> list[tuple[int, int]]:
        return [self.cell(r, c) for r in range(1, BLOCK + 1) for c in range(1, BLOCK + 1)]

    @property
    def slices(self) -> tuple[slice, slice]:
        return (slice(self.origin_y, self.origin_y + BLOCK),
                slice(self.origin_x, self.origin_x + BLOCK))


@dataclass(frozen=True)
class Capacity:
    gross_bits: int
    usable_bits: int
    net_payload_bytes: int

    @property
    def gross_bytes(self) -> float:
        return self.gross_bits / 8


@dataclass(frozen=True)
class EmbedPlan:
    header_blocks: tuple
    payload_blocks: tuple
    stride: int
    keys: tuple = field(default=())  # one key per carrier: header blocks first, then payload

    @property
    def carriers(self) -> tuple:
        return self.header_blocks + self.payload_blocks


@dataclass(frozen=True)
class KeySequence:
    seed: int
    values: tuple

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def grid_shape(img) -> tuple[int, int]:
    return img.height // BLOCK, img.width // BLOCK


def partition(img) -> list[BlockRef]:
    if img.width < BLOCK or img.height < BLOCK:
        raise ImageTooSmall(f"{img.width}x{img.height} image holds no {BLOCK}x{BLOCK} block")
    rows, cols = grid_shape(img)
    return [BlockRef(r, c, r * cols + c) for r in range(rows) for c in range(cols)]


def block_view(pixels: np.ndarray) -> np.ndarray:
    """View the tiled region as (grid_rows, grid_cols, 5, 5); margins are dropped."""
    rows, cols = pixels.shape[0] // BLOCK, pixels.shape[1] // BLOCK
    tiled = pixels[:rows * BLOCK, :cols * BLOCK]
    return tiled.reshape(rows, BLOCK, cols, BLOCK).swapaxes(1, 2)


def is_uniform(img, block: BlockRef) -> bool:
    tile = img.pixels[block.slices]
    return bool(tile.min() == tile.max())


def uniform_mask(img) -> np.ndarray:
    """Boolean per block, row-major over the grid; True where all 25 cells match."""
    tiles = block_view(img.pixels).reshape(-1, BLOCK * BLOCK)
    return tiles.min(axis=1) == tiles.max(axis=1)


def usable_blocks(img) -> list[BlockRef]:
    blocks = partition(img)
    mask = uniform_mask(img)
    return [b for b, uniform in zip(blocks, mask) if not uniform]


def capacity(img) -> Capacity:
    total = len(partition(img))
    usable = total - int(uniform_mask(img).sum())
    gross = BITS_PER_BLOCK * total
    usable_bits = BITS_PER_BLOCK * usable
    return Capacity(gross, usable_bits, max(0, (usable_bits - HEADER_BITS) // 8))


def select_blocks(usable, payload_nibbles: int, keys=None) -> EmbedPlan:
    """Header on the first 8 usable blocks, payload evenly spaced over the rest.

    ``keys`` maps a block's scan index to its key; omitted means unkeyed.
    """
    usable = list(usable)
    spare = len(usable) - HEADER_BLOCKS
    if spare < payload_nibbles:
        short_blocks = payload_nibbles - max(spare, 0)
        raise CapacityExceeded(
            f"need {HEADER_BLOCKS + payload_nibbles} usable blocks, image has {len(usable)}",
            shortfall_bytes=-(-short_blocks * BITS_PER_BLOCK // 8),
        )
    stride = max(1, spare // payload_nibbles) if payload_nibbles else 1
    header = tuple(usable[:HEADER_BLOCKS])
    payload = tuple(usable[HEADER_BLOCKS + k * stride] for k in range(payload_nibbles))
    carriers = header + payload
    if keys is None:
        key_values = (UNKEYED,) * len(carriers)
    else:
        key_values = tuple(block_key(keys, b) for b in carriers)
    return EmbedPlan(header, payload, stride, key_values)


def block_key(keys, block: BlockRef) -> int:
    if keys is None:
        return UNKEYED
    if block.index >= len(keys):
        raise KeyListError(f"key list has {len(keys)} entries, block {block.index} needs one")
    return int(keys[block.index])


def lcg_states(seed: int, count: int):
    state = seed & _MASK64
    for _ in range(count):
        state = (state * LCG_MULTIPLIER + LCG_INCREMENT) & _MASK64
        yield state


def key_sequence(seed: int, count: int) -> KeySequence:
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return KeySequence(seed, tuple((s >> 33) % 5 + 1 for s in lcg_states(seed, count)))


def parse_key_list(text: str) -> tuple[int, ...]:
    """One key per line; blank lines and '#' comments are skipped."""
    keys = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            value = int(line)
        except ValueError:
            raise KeyListError(f"line {lineno}: {raw.strip()!r} is not an integer") from None
        if not 1 <= value <= 5:
            raise KeyListError(f"line {lineno}: key {value} outside 1..5")
        keys.append(value)
    return tuple(keys)


def read_key_list(path) -> tuple[int, ...]:
    return parse_key_list(Path(path).read_text())


def format_key_list(keys) -> str:
    return "".join(f"{int(k)}\n" for k in keys)
