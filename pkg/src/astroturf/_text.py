"""Tokenization and hashing shared by term matching and feature extraction."""
from __future__ import annotations

import hashlib
import re
from functools import lru_cache

_SPLIT = re.compile(r"[\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on any non-alphanumeric character."""
    return [t for t in _SPLIT.split(text.lower()) if t]


@lru_cache(maxsize=1 << 18)
def hash64(token: str) -> int:
    """Platform-independent 64-bit token hash (BLAKE2b, little endian)."""
    return int.from_bytes(hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "little")
