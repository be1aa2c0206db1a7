"""Block-parity data hiding: 4 bits per non-uniform 5x5 block, at most 2 flips.

Each carrier block holds a 4-bit syndrome built from row and column parities.
For a block key K (5 when unkeyed) the active indices are ``{1..5} - {K}``; the
n-th syndrome bit is the XOR of the parity of block row ``I[n]`` and the
parity of block column ``I[n]``. Flipping block cell (a, b) therefore toggles
the syndrome bit of index a and of index b, unless the index is K or a == b.

Nibbles and syndromes are ints in 0..15 with s1 in the most significant bit.
Block cells are addressed 1-based as (row, col).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from . import blockgrid, payload
from .blockgrid import BLOCK, HEADER_BLOCKS, UNKEYED, BlockRef
from .errors import (
    BadLength,
    CapacityExceeded,
    EmptyDiff,
    NoViableCandidate,
    NotAStegoImage,
    UniformBlock,
)
from .pbm import BinaryImage

FlipSet = tuple  # 1 or 2 distinct (row, col) cells, 1-based within the block

KEYS = (1, 2, 3, 4, 5)


def active_indices(key: int = UNKEYED) -> tuple[int, int, int, int]:
    if key not in KEYS:
        raise ValueError(f"block key must be in 1..5, got {key}")
    return tuple(i for i in KEYS if i != key)


def diff_positions(syndrome_value: int, nibble: int) -> tuple[int, ...]:
    """Syndrome positions (1..4) where the block disagrees with the nibble."""
    d = syndrome_value ^ nibble
    return tuple(n for n in range(1, 5) if d >> (4 - n) & 1)


def tile_syndrome(tile, key: int = UNKEYED) -> int:
    tile = np.asarray(tile)
    rows = np.bitwise_xor.reduce(tile, axis=1)
    cols = np.bitwise_xor.reduce(tile, axis=0)
    value = 0
    for i in active_indices(key):
        value = (value << 1) | int(rows[i - 1] ^ cols[i - 1])
    return value


def _tile(img, block: BlockRef) -> np.ndarray:
    pixels = img.pixels if isinstance(img, BinaryImage) else img
    return pixels[block.slices]


def syndrome(img, block: BlockRef, key: int = UNKEYED) -> int:
    tile = _tile(img, block)
    if tile.min() == tile.max():
        raise UniformBlock(f"block {block.index} is uniform and carries no data")
    return tile_syndrome(tile, key)


def _candidate_table(diff: tuple[int, ...], key: int) -> list[FlipSet]:
    if len(diff) == 1:
        (i,) = diff
        return [((i, key),), ((key, i),)]
    if len(diff) == 2:
        i, j = diff
        return [((i, j),), ((j, i),)]
    if len(diff) == 3:
        i, j, k = diff
        spare = key
    else:
        i, j, k, spare = diff
    # three ways to split the diff, each choice of cell orientation expanded in order
    splits = [
        (((i, j), (j, i)), ((k, spare), (spare, k))),
        (((i, spare), (spare, i)), ((k, j), (j, k))),
        (((spare, j), (j, spare)), ((k, i), (i, k))),
    ]
    out = []
    for firsts, seconds in splits:
        for a in firsts:
            for b in seconds:
                out.append((a, b))
    return out


def flip_candidates(diff, key: int = UNKEYED) -> list[FlipSet]:
    """Ordered flip sets that toggle exactly the syndrome positions in ``diff``.

    ``diff`` holds syndrome positions 1..4; they map to block indices through
    the active indices of ``key``.
    """
    positions = sorted(set(diff))
    if not positions:
        raise EmptyDiff("no differing bits; the block needs no change")
    if positions[0] < 1 or positions[-1] > 4:
        raise ValueError(f"diff positions must lie in 1..4, got {positions}")
    active = active_indices(key)
    return list(_CANDIDATES[key][tuple(active[p - 1] for p in positions)])


_CANDIDATES = {
    key: {
        combo: _candidate_table(combo, key)
        for size in range(1, 5)
        for combo in combinations(active_indices(key), size)
    }
    for key in KEYS
}


def adjacency_cost_map(cover) -> np.ndarray:
    """Per pixel, how many in-bounds 8-neighbours share its value."""
    pixels = cover.pixels if isinstance(cover, BinaryImage) else np.asarray(cover)
    h, w = pixels.shape
    padded = np.full((h + 2, w + 2), -1, dtype=np.int8)
    padded[1:-1, 1:-1] = pixels
    counts = np.zeros((h, w), dtype=np.int64)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy or dx:
                counts += padded[1 + dy:h + 1 + dy, 1 + dx:w + 1 + dx] == pixels
    return counts


def adjacency_cost(cover: BinaryImage, x: int, y: int) -> int:
    if not (0 <= x < cover.width and 0 <= y < cover.height):
        raise IndexError(f"pixel ({x}, {y}) outside {cover.width}x{cover.height} image")
    y0, y1 = max(0, y - 1), min(cover.height, y + 2)
    x0, x1 = max(0, x - 1), min(cover.width, x + 2)
    window = cover.pixels[y0:y1, x0:x1]
    return int((window == cover.pixels[y, x]).sum()) - 1


def _pick(tile, cell_costs, candidates):
    """Cheapest candidate that keeps the tile non-uniform; first wins ties.

    ``tile`` and ``cell_costs`` are 5x5 nested sequences indexed [row-1][col-1].
    """
    ones = sum(sum(r) for r in tile)
    best, best_cost = None, None
    for cand in candidates:
        after = ones
        cost = 0
        for r, c in cand:
            after += 1 - 2 * tile[r - 1][c - 1]
            cost += cell_costs[r - 1][c - 1]
        if after == 0 or after == BLOCK * BLOCK:
            continue
        if best_cost is None or cost < best_cost:
            best, best_cost = cand, cost
    return best


def choose_flip(cover: BinaryImage, stego, block: BlockRef, candidates, cost_map=None) -> FlipSet:
    """Pick the candidate with the smallest summed adjacency cost in the cover.

    Candidates that would leave the block all-black or all-white in ``stego``
    are skipped.
    """
    candidates = list(candidates)
    if not candidates:
        raise NoViableCandidate("empty candidate list")
    if cost_map is None:
        cost_map = adjacency_cost_map(cover)
    tile = _tile(stego, block).tolist()
    costs = cost_map[block.slices].tolist()
    best = _pick(tile, costs, candidates)
    if best is None:
        raise NoViableCandidate(f"every candidate would make block {block.index} uniform")
    return best


def _apply(pixels: np.ndarray, block: BlockRef, flips: FlipSet) -> None:
    for r, c in flips:
        y, x = block.cell(r, c)
        pixels[y, x] ^= 1


def embed_block(cover: BinaryImage, stego: np.ndarray, block: BlockRef, nibble: int,
                key: int = UNKEYED, cost_map=None) -> Optional[FlipSet]:
    """Make the block's syndrome in ``stego`` (a writable pixel array) equal ``nibble``."""
    diff = diff_positions(syndrome(stego, block, key), nibble)
    if not diff:
        return None
    flips = choose_flip(cover, stego, block, flip_candidates(diff, key), cost_map)
    _apply(stego, block, flips)
    return flips


def extract_block(img, block: BlockRef, key: int = UNKEYED) -> int:
    return syndrome(img, block, key)


@dataclass
class EmbedReport:
    blocks_used: int = 0
    bits_embedded: int = 0
    total_flips: int = 0
    stride: int = 1
    per_block: list = field(default_factory=list)  # (BlockRef, nibble, FlipSet or None)

    def summary(self) -> str:
        return (f"blocks_used={self.blocks_used} bits_embedded={self.bits_embedded} "
                f"total_flips={self.total_flips} stride={self.stride}")


def resolve_keys(block_count: int, seed=None, keys=None):
    """Per-block key lookup for a mode: None (unkeyed), a seed, or an explicit list."""
    if seed is not None and keys is not None:
        raise ValueError("seed and key list are mutually exclusive")
    if seed is not None:
        return blockgrid.key_sequence(seed, block_count).values
    if keys is not None:
        keys = tuple(int(k) for k in keys)
        bad = [k for k in keys if k not in KEYS]
        if bad:
            raise ValueError(f"key list contains values outside 1..5: {bad[:3]}")
        return keys
    return None


def _decide(cover_tiles, syndromes, costs, work):
    """Flip decisions for (block, nibble, key) triples; reads only the cover."""
    out = []
    for block, nibble, key in work:
        diff = diff_positions(syndromes[block.index][key - 1], nibble)
        if not diff:
            out.append(None)
            continue
        tile = cover_tiles[block.index].tolist()
        cell_costs = costs[block.index].tolist()
        best = _pick(tile, cell_costs, flip_candidates(diff, key))
        if best is None:
            raise NoViableCandidate(f"every candidate would make block {block.index} uniform")
        out.append(best)
    return out


def all_syndromes(pixels: np.ndarray) -> np.ndarray:
    """Syndrome of every grid block under each key, shape (blocks, 5)."""
    tiles = blockgrid.block_view(pixels).reshape(-1, BLOCK, BLOCK)
    both = np.bitwise_xor.reduce(tiles, axis=2) ^ np.bitwise_xor.reduce(tiles, axis=1)
    out = np.zeros((tiles.shape[0], 5), dtype=np.int64)
    for key in KEYS:
        for i in active_indices(key):
            out[:, key - 1] = (out[:, key - 1] << 1) | both[:, i - 1]
    return out


def embed_message(cover: BinaryImage, message: bytes, *, seed=None, keys=None,
                  workers: int = 1) -> tuple[BinaryImage, EmbedReport]:
    """Hide ``message`` in ``cover``; returns the stego image and an audit report.

    Mode: unkeyed by default, or per-block keys from ``seed`` or an explicit
    ``keys`` list indexed by block scan order. ``workers`` > 1 computes block
    decisions on a thread pool; the output is identical either way.
    """
    blocks = blockgrid.partition(cover)
    uniform = blockgrid.uniform_mask(cover)
    usable = [b for b, u in zip(blocks, uniform) if not u]
    bits = payload.frame_message(message)
    nibbles = payload.to_nibbles(bits)
    block_keys = resolve_keys(len(blocks), seed, keys)
    try:
        plan = blockgrid.select_blocks(usable, len(nibbles) - HEADER_BLOCKS, block_keys)
    except CapacityExceeded as exc:
        cap = blockgrid.capacity(cover)
        raise CapacityExceeded(
            f"message needs {len(message)} bytes, net capacity is {cap.net_payload_bytes} "
            f"bytes (short by {len(message) - cap.net_payload_bytes} bytes)",
            shortfall_bytes=len(message) - cap.net_payload_bytes,
        ) from exc

    tiles = blockgrid.block_view(cover.pixels).reshape(-1, BLOCK, BLOCK)
    costs = blockgrid.block_view(adjacency_cost_map(cover)).reshape(-1, BLOCK, BLOCK)
    syndromes = all_syndromes(cover.pixels).tolist()
    work = list(zip(plan.carriers, nibbles, plan.keys))

    if workers > 1 and len(work) > 1:
        size = -(-len(work) // workers)
        chunks = [work[i:i + size] for i in range(0, len(work), size)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            decisions = [d for part in pool.map(lambda w: _decide(tiles, syndromes, costs, w), chunks)
                         for d in part]
    else:
        decisions = _decide(tiles, syndromes, costs, work)

    stego = cover.to_array()
    report = EmbedReport(blocks_used=len(work), bits_embedded=int(bits.size), stride=plan.stride)
    for (block, nibble, _key), flips in zip(work, decisions):
        if flips is not None:
            _apply(stego, block, flips)
            report.total_flips += len(flips)
        report.per_block.append((block, nibble, flips))
    return BinaryImage(stego), report


def extract_message(stego: BinaryImage, *, seed=None, keys=None) -> bytes:
    blocks = blockgrid.partition(stego)
    usable = blockgrid.usable_blocks(stego)
    block_keys = resolve_keys(len(blocks), seed, keys)
    if len(usable) < HEADER_BLOCKS:
        raise NotAStegoImage(f"only {len(usable)} usable blocks; a stego image has at least {HEADER_BLOCKS}")

    def read(block):
        return extract_block(stego, block, blockgrid.block_key(block_keys, block))

    header = [read(b) for b in usable[:HEADER_BLOCKS]]
    n_bits = payload.read_length(payload.from_nibbles(header))
    if n_bits % 8:
        raise BadLength(f"payload length {n_bits} bits is not a whole number of bytes")
    count = -(-n_bits // 4)
    try:
        plan = blockgrid.select_blocks(usable, count)
    except CapacityExceeded:
        raise NotAStegoImage(
            f"header announces {n_bits} payload bits but only "
            f"{len(usable) - HEADER_BLOCKS} carrier blocks remain") from None
    body = [read(b) for b in plan.payload_blocks]
    return payload.unframe_message(payload.from_nibbles(header + body))
