"""Command-line front end: embed, extract, capacity, metrics, cpt-embed, cpt-extract."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import blockgrid, cpt, metrics, parity
from .errors import (
    CapacityExceeded,
    InvalidConfig,
    KeyListError,
    NoSolution,
    NotAStegoImage,
    PayloadError,
    PbmError,
    StegoError,
)
from .pbm import PbmVariant, read_pbm, write_pbm

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blockparity", description="Hide data in bi-level PBM images with 5x5 block parity.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def message_source(p):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("-m", "--message", metavar="FILE", help="file whose bytes are hidden")
        src.add_argument("-t", "--text", help="literal message, encoded as UTF-8")

    def key_mode(p):
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--seed", type=_seed, help="derive per-block keys from this 64-bit seed")
        mode.add_argument("--keys", metavar="FILE", help="explicit key list, one value 1..5 per block")

    def output_variant(p):
        p.add_argument("--ascii", action="store_true", help="write P1 instead of P4")

    def report_format(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("embed", help="hide a message")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    message_source(p)
    key_mode(p)
    output_variant(p)
    report_format(p)

    p = sub.add_parser("extract", help="recover a hidden message")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", help="destination file (default: stdout)")
    key_mode(p)

    p = sub.add_parser("capacity", help="report how much an image can carry")
    p.add_argument("-i", "--input", required=True)
    report_format(p)

    p = sub.add_parser("metrics", help="compare an original and a stego image")
    p.add_argument("-a", required=True, metavar="ORIGINAL")
    p.add_argument("-b", required=True, metavar="STEGO")
    report_format(p)

    p = sub.add_parser("cpt-embed", help="hide a message with the weight-matrix baseline")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    message_source(p)
    p.add_argument("--cpt-config", metavar="FILE", help="K/W/r config (default: 5x5, r=4, zero key)")
    output_variant(p)
    report_format(p)

    p = sub.add_parser("cpt-extract", help="recover a message hidden with the baseline")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--cpt-config", metavar="FILE")
    return parser


def _read_message(args) -> bytes:
    if args.text is not None:
        return args.text.encode("utf-8")
    return Path(args.message).read_bytes()


def _check_output(args) -> None:
    out = getattr(args, "output", None)
    if out is None:
        return
    for name in ("input", "message"):
        src = getattr(args, name, None)
        if src and os.path.exists(out) and os.path.samefile(src, out):
            raise UsageError(f"refusing to overwrite input file {src}")


def _write_output(path, data: bytes) -> None:
    if path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(data)


def _mode(args) -> dict:
    if getattr(args, "keys", None):
        return {"keys": blockgrid.read_key_list(args.keys)}
    if getattr(args, "seed", None) is not None:
        return {"seed": args.seed}
    return {}


def _cpt_config(args) -> cpt.CptConfig:
    return cpt.read_config(args.cpt_config) if args.cpt_config else cpt.default_config()


def _print_report(report, fmt: str, out) -> None:
    fields = {
        "blocks_used": report.blocks_used,
        "bits_embedded": report.bits_embedded,
        "total_flips": report.total_flips,
        "stride": report.stride,
    }
    if fmt == "json":
        out.write(json.dumps(fields, indent=2) + "\n")
    else:
        out.write("".join(f"{k}={v}\n" for k, v in fields.items()))


def _variant(args) -> PbmVariant:
    return PbmVariant.ASCII_P1 if args.ascii else PbmVariant.RAW_P4


def _run(args, out) -> None:
    cmd = args.command
    _check_output(args)
    if cmd == "embed":
        cover = read_pbm(args.input)
        stego, report = parity.embed_message(cover, _read_message(args), **_mode(args))
        write_pbm(args.output, stego, _variant(args))
        _print_report(report, args.format, out)
    elif cmd == "extract":
        stego = read_pbm(args.input)
        _write_output(args.output, parity.extract_message(stego, **_mode(args)))
    elif cmd == "capacity":
        img = read_pbm(args.input)
        cap = blockgrid.capacity(img)
        fields = {
            "blocks": cap.gross_bits // blockgrid.BITS_PER_BLOCK,
            "usable_blocks": cap.usable_bits // blockgrid.BITS_PER_BLOCK,
            "gross_bits": cap.gross_bits,
            "gross_bytes": cap.gross_bits // 8,
            "gross_kib": round(cap.gross_bits / 8 / 1024, 2),
            "usable_bits": cap.usable_bits,
            "net_payload_bytes": cap.net_payload_bytes,
        }
        if args.format == "json":
            out.write(json.dumps(fields, indent=2) + "\n")
        else:
            out.write("".join(f"{k}={v}\n" for k, v in fields.items()))
    elif cmd == "metrics":
        report = metrics.compare(read_pbm(args.a), read_pbm(args.b))
        out.write(report.to_json() if args.format == "json" else report.to_text())
    elif cmd == "cpt-embed":
        cfg = _cpt_config(args)
        stego, report = cpt.cpt_embed_message(read_pbm(args.input), _read_message(args), cfg)
        write_pbm(args.output, stego, _variant(args))
        _print_report(report, args.format, out)
    elif cmd == "cpt-extract":
        cfg = _cpt_config(args)
        _write_output(args.output, cpt.cpt_extract_message(read_pbm(args.input), cfg))


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        _run(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (OSError, PbmError, InvalidConfig, KeyListError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_IO
    except CapacityExceeded as exc:
        err.write(f"capacity error: {exc}\n")
        return EXIT_DATA
    except (NotAStegoImage, PayloadError, NoSolution, StegoError) as exc:
        err.write(f"extraction error: {exc}\n")
        return EXIT_DATA
    return EXIT_OK


def main() -> None:
    sys.exit(run())
