"""String deobfuscation for Obfuscator.IO-style JavaScript."""

__version__ = "0.1.0"
