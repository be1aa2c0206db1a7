"""Quality measures between a cover image and its stego image."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionMismatch
from .pbm import BinaryImage


@dataclass(frozen=True)
class MetricsReport:
    similarity: float
    avg_original: float
    avg_stego: float
    avg_delta: float
    std_dev_delta: float

    def to_text(self) -> str:
        return "".join(f"{k}={v:.12g}\n" for k, v in asdict(self).items())

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


def _same_shape(a: BinaryImage, b: BinaryImage) -> None:
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatch(f"{a.width}x{a.height} vs {b.width}x{b.height}")


def similarity(a: BinaryImage, b: BinaryImage) -> float:
    """Fraction of pixel positions where the two images agree."""
    _same_shape(a, b)
    return float(np.count_nonzero(a.pixels == b.pixels)) / a.pixels.size


def neighbor_average_map(img: BinaryImage) -> np.ndarray:
    """Mean over the 3x3 window around each pixel, clipped at the borders."""
    h, w = img.height, img.width
    values = np.zeros((h + 2, w + 2))
    values[1:-1, 1:-1] = img.pixels
    inside = np.zeros((h + 2, w + 2))
    inside[1:-1, 1:-1] = 1.0
    total = np.zeros((h, w))
    count = np.zeros((h, w))
    for dy in range(3):
        for dx in range(3):
            total += values[dy:dy + h, dx:dx + w]
            count += inside[dy:dy + h, dx:dx + w]
    return total / count


def compare(original: BinaryImage, stego: BinaryImage) -> MetricsReport:
    _same_shape(original, stego)
    map_a = neighbor_average_map(original)
    map_b = neighbor_average_map(stego)
    avg_a, avg_b = float(map_a.mean()), float(map_b.mean())
    return MetricsReport(
        similarity=similarity(original, stego),
        avg_original=avg_a,
        avg_stego=avg_b,
        avg_delta=abs(avg_b - avg_a),
        std_dev_delta=float(np.std(map_b - map_a)),
    )
