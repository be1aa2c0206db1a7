import io
import json
import subprocess
import sys

import numpy as np
import pytest

from blockparity import blockgrid, cpt
from blockparity.cli import run
from blockparity.pbm import BinaryImage, write_pbm

from conftest import random_image


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cover(tmp_path, rng):
    path = tmp_path / "cover.pbm"
    write_pbm(path, random_image(rng, 80, 64))
    return path


@pytest.fixture
def secret(tmp_path, rng):
    path = tmp_path / "msg.bin"
    path.write_bytes(bytes(rng.integers(0, 256, 90, dtype=np.uint8)))
    return path


@pytest.mark.parametrize("mode", [[], ["--seed", "123456789"], ["--seed", "0xffffffffffffffff"]])
def test_embed_extract_round_trip(tmp_path, cover, secret, mode):
    stego, recovered = tmp_path / "stego.pbm", tmp_path / "out.bin"
    before = cover.read_bytes()
    code, out, err = call("embed", "-i", cover, "-o", stego, "-m", secret, *mode)
    assert code == 0, err
    assert "blocks_used=188" in out
    assert cover.read_bytes() == before
    code, _, err = call("extract", "-i", stego, "-o", recovered, *mode)
    assert code == 0, err
    assert recovered.read_bytes() == secret.read_bytes()


def test_key_list_mode(tmp_path, cover, rng):
    keys = tmp_path / "keys.txt"
    keys.write_text(blockgrid.format_key_list(rng.integers(1, 6, 16 * 12)))
    stego, recovered = tmp_path / "stego.pbm", tmp_path / "out.bin"
    assert call("embed", "-i", cover, "-o", stego, "-t", "héllo", "--keys", keys)[0] == 0
    assert call("extract", "-i", stego, "-o", recovered, "--keys", keys)[0] == 0
    assert recovered.read_bytes() == "héllo".encode()


def test_ascii_output(tmp_path, cover):
    stego = tmp_path / "stego.pbm"
    assert call("embed", "-i", cover, "-o", stego, "-t", "x", "--ascii")[0] == 0
    assert stego.read_bytes().startswith(b"P1\n")
    assert call("extract", "-i", stego, "-o", tmp_path / "m")[0] == 0
    assert (tmp_path / "m").read_bytes() == b"x"


def test_json_report(tmp_path, cover):
    code, out, _ = call("embed", "-i", cover, "-o", tmp_path / "s.pbm", "-t", "ab", "--format", "json")
    assert code == 0
    assert json.loads(out)["blocks_used"] == 12


def test_capacity_512(tmp_path, rng):
    path = tmp_path / "big.pbm"
    write_pbm(path, random_image(rng, 512, 512))
    code, out, _ = call("capacity", "-i", path)
    assert code == 0
    fields = dict(line.split("=") for line in out.splitlines())
    assert fields["gross_bytes"] == "5202"
    assert fields["gross_kib"] == "5.08"
    assert fields["net_payload_bytes"] == "5198"


def test_capacity_shortfall(tmp_path, rng):
    path = tmp_path / "small.pbm"
    write_pbm(path, random_image(rng, 30, 30))  # net 14 bytes
    code, _, err = call("embed", "-i", path, "-o", tmp_path / "s.pbm", "-t", "x" * 20)
    assert code == 3
    assert "short by 6 bytes" in err
    assert len(err.strip().splitlines()) == 1
    assert not (tmp_path / "s.pbm").exists()


def test_metrics_command(tmp_path, cover):
    code, out, _ = call("metrics", "-a", cover, "-b", cover)
    assert code == 0
    assert "similarity=1\n" in out and "std_dev_delta=0\n" in out
    code, out, _ = call("metrics", "-a", cover, "-b", cover, "--format", "json")
    assert json.loads(out)["avg_delta"] == 0.0


def test_cpt_commands(tmp_path, cover, secret):
    cfg_path = tmp_path / "cfg.txt"
    cfg_path.write_text(cpt.format_config(cpt.CptConfig(np.eye(5, dtype=int), cpt.default_config().weights, 4)))
    stego, out = tmp_path / "s.pbm", tmp_path / "o.bin"
    assert call("cpt-embed", "-i", cover, "-o", stego, "-m", secret, "--cpt-config", cfg_path)[0] == 0
    assert call("cpt-extract", "-i", stego, "-o", out, "--cpt-config", cfg_path)[0] == 0
    assert out.read_bytes() == secret.read_bytes()
    assert call("cpt-embed", "-i", cover, "-o", stego, "-t", "default")[0] == 0
    assert call("cpt-extract", "-i", stego, "-o", out)[0] == 0
    assert out.read_bytes() == b"default"


def test_usage_errors(tmp_path, cover):
    assert call()[0] == 1
    assert call("frobnicate")[0] == 1
    assert call("embed", "-i", cover, "-o", tmp_path / "s.pbm")[0] == 1  # no message
    keys = tmp_path / "k"
    keys.write_text("5\n")
    code, _, err = call("embed", "-i", cover, "-o", tmp_path / "s.pbm", "-t", "a", "--seed", "1", "--keys", keys)
    assert code == 1 and "not allowed" in err
    assert call("extract", "-i", cover, "--seed", "-4")[0] == 1


def test_refuses_to_overwrite_input(cover):
    before = cover.read_bytes()
    code, _, err = call("embed", "-i", cover, "-o", cover, "-t", "a")
    assert code == 1
    assert cover.read_bytes() == before


def test_io_and_format_errors(tmp_path):
    assert call("capacity", "-i", tmp_path / "missing.pbm")[0] == 2
    bad = tmp_path / "bad.pbm"
    bad.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
    code, _, err = call("capacity", "-i", bad)
    assert code == 2 and "magic" in err
    cfg = tmp_path / "cfg"
    cfg.write_text("2 2 9\n00\n00\n1 1\n1 1\n")
    assert call("cpt-extract", "-i", bad, "--cpt-config", cfg)[0] == 2
    keys = tmp_path / "keys"
    keys.write_text("7\n")
    good = tmp_path / "good.pbm"
    write_pbm(good, BinaryImage.blank(10, 10))
    assert call("extract", "-i", good, "--keys", keys)[0] == 2


def test_extract_from_plain_image(tmp_path):
    path = tmp_path / "white.pbm"
    write_pbm(path, BinaryImage.blank(50, 50))
    code, _, err = call("extract", "-i", path, "-o", tmp_path / "o")
    assert code == 3 and "usable blocks" in err


def test_identical_invocations_identical_output(tmp_path, cover, secret):
    a, b = tmp_path / "a.pbm", tmp_path / "b.pbm"
    call("embed", "-i", cover, "-o", a, "-m", secret, "--seed", "77")
    call("embed", "-i", cover, "-o", b, "-m", secret, "--seed", "77")
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point_writes_stdout(tmp_path, cover):
    stego = tmp_path / "s.pbm"
    assert call("embed", "-i", cover, "-o", stego, "-t", "piped")[0] == 0
    proc = subprocess.run([sys.executable, "-m", "blockparity", "extract", "-i", str(stego)],
                          capture_output=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == b"piped"
