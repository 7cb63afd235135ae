"""Miniature Obfuscator.IO-style string obfuscator and corpus tools."""

from .corpus import file_seed, generate_corpus
from .examples import HELLO_WORLD, prompt_example, simple_hello
from .obfuscator import (
    LEVELS,
    GroundTruth,
    ObfuscationConfig,
    Obfuscated,
    UnsupportedInput,
    b64_decode,
    b64_encode,
    js_parse_int,
    obfuscate,
    obfuscate_source,
)
from .seeds import seed_program, seed_programs

__all__ = [
    "HELLO_WORLD",
    "LEVELS",
    "GroundTruth",
    "ObfuscationConfig",
    "Obfuscated",
    "UnsupportedInput",
    "b64_decode",
    "b64_encode",
    "file_seed",
    "generate_corpus",
    "js_parse_int",
    "obfuscate",
    "obfuscate_source",
    "prompt_example",
    "seed_program",
    "seed_programs",
    "simple_hello",
]
