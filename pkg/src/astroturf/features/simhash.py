"""64-bit simhash fingerprints and near-duplicate counting."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .._text import hash64, tokenize

BITS = np.arange(64, dtype=np.uint64)
SIMILAR_DISTANCE = 3


def simhash64(text: str) -> int:
    """Simhash of one text; the empty text (no tokens) maps to 0."""
    return int(simhash_many([text])[0])


def _fingerprints(token_lists: Sequence[list[str]]) -> np.ndarray:
    lengths = np.fromiter((len(t) for t in token_lists), dtype=np.int64, count=len(token_lists))
    out = np.zeros(len(token_lists), dtype=np.uint64)
    total = int(lengths.sum())
    if total == 0:
        return out
    hashes = np.fromiter(
        (hash64(tok) for toks in token_lists for tok in toks), dtype=np.uint64, count=total
    )
    votes = ((hashes[:, None] >> BITS) & np.uint64(1)).astype(np.int32) * 2 - 1
    nonempty = np.flatnonzero(lengths)
    starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))[nonempty]
    sums = np.add.reduceat(votes, starts, axis=0)
    packed = ((sums > 0).astype(np.uint64) << BITS).sum(axis=1, dtype=np.uint64)
    out[nonempty] = packed
    return out


def simhash_many(texts: Sequence[str]) -> np.ndarray:
    """Fingerprints of many texts as a ``uint64`` array."""
    return _fingerprints([tokenize(t) for t in texts])


def simhash_tokens(tokens: list[str]) -> int:
    """Fingerprint of a pre-tokenized document."""
    return int(_fingerprints([tokens])[0])


def hamming(a: int, b: int) -> int:
    return (int(a) ^ int(b)).bit_count()


def similar_counts(fps: np.ndarray, max_distance: int = SIMILAR_DISTANCE,
                   chunk: int = 2048) -> np.ndarray:
    """For each fingerprint, how many *other* fingerprints lie within
    ``max_distance`` bits."""
    fps = np.asarray(fps, dtype=np.uint64)
    n = fps.size
    out = np.zeros(n, dtype=np.int64)
    for lo in range(0, n, chunk):
        block = fps[lo:lo + chunk]
        dist = np.bitwise_count(block[:, None] ^ fps[None, :])
        out[lo:lo + chunk] = (dist <= max_distance).sum(axis=1) - 1
    return out
