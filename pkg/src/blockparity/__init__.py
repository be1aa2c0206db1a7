"""Data hiding in bi-level PBM images using 5x5 block parity."""
from .blockgrid import BlockRef, EmbedPlan, KeySequence, capacity, key_sequence, partition, select_blocks
from .cpt import CptConfig, cpt_embed_message, cpt_extract_message, default_config
from .errors import StegoError
from .metrics import MetricsReport, compare
from .parity import EmbedReport, embed_message, extract_message
from .pbm import BinaryImage, PbmVariant, decode_pbm, encode_pbm, read_pbm, write_pbm

__all__ = [
    "BinaryImage", "BlockRef", "CptConfig", "EmbedPlan", "EmbedReport", "KeySequence",
    "MetricsReport", "PbmVariant", "StegoError", "capacity", "compare", "cpt_embed_message",
    "cpt_extract_message", "decode_pbm", "default_config", "embed_message", "encode_pbm",
    "extract_message", "key_sequence", "partition", "read_pbm", "select_blocks", "write_pbm",
]
