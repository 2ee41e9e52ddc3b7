"""Arc-preserving subsequence matching for nested arc-annotated strings."""

from .arcstr import ArcAnnotatedString, parse_dotbracket, read_dotbracket, validate, wrap
from .engine import MODES, EngineConfig, EngineStats, NapsResult, longest_prefix, naps
from .errors import ArcMatchError, InputError
from .gamma import GammaSeq
from .succinct import CompressedGamma, access, decode, encode

__all__ = [
    "ArcAnnotatedString",
    "ArcMatchError",
    "CompressedGamma",
    "EngineConfig",
    "EngineStats",
    "GammaSeq",
    "InputError",
    "MODES",
    "NapsResult",
    "access",
    "decode",
    "encode",
    "longest_prefix",
    "naps",
    "parse_dotbracket",
    "read_dotbracket",
    "validate",
    "wrap",
]
