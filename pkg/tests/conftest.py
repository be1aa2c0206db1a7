import numpy as np
import pytest

from blockparity.pbm import BinaryImage

_ACCEPTANCE = {}


def random_image(rng, width, height, p_black=0.5):
    return BinaryImage((rng.random((height, width)) < p_black).astype(np.uint8))


def sparse_block_image(rng, grid_rows, grid_cols):
    """Tiles whose minority-pixel counts range from 0 to 12, to stress the uniform-block rules."""
    pixels = np.zeros((grid_rows * 5, grid_cols * 5), dtype=np.uint8)
    for r in range(grid_rows):
        for c in range(grid_cols):
            tile = np.zeros(25, dtype=np.uint8)
            tile[rng.choice(25, size=rng.integers(0, 13), replace=False)] = 1
            if rng.random() < 0.5:
                tile ^= 1
            pixels[5 * r:5 * r + 5, 5 * c:5 * c + 5] = tile.reshape(5, 5)
    return BinaryImage(pixels)


def text_like_image(rng, width, height):
    """White page with scattered black strokes and solid areas, plus a margin."""
    pixels = np.zeros((height, width), dtype=np.uint8)
    for _ in range(width * height // 200):
        y, x = rng.integers(0, height), rng.integers(0, width)
        h, w = rng.integers(1, 4), rng.integers(1, 12)
        pixels[y:y + h, x:x + w] = 1
    pixels[height // 3: height // 3 + 10, : width // 2] = 1
    return BinaryImage(pixels)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def corpus():
    rng = np.random.default_rng(2024)
    images = [random_image(rng, 60, 60) for _ in range(8)]
    images += [random_image(rng, 63, 57, p) for p in (0.05, 0.2, 0.8, 0.97)]
    images += [sparse_block_image(rng, 12, 14) for _ in range(4)]
    images += [text_like_image(rng, 101, 77) for _ in range(4)]
    return images


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and (rep.when == "call" or rep.failed):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        if rep.when == "call" or item.nodeid not in _ACCEPTANCE:
            _ACCEPTANCE[item.nodeid] = ("PASS" if rep.passed else "FAIL", doc)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, doc in _ACCEPTANCE.values():
        terminalreporter.write_line(f"[{status}] {doc}")
