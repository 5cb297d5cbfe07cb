"""Small shared helpers: formatting, hashing, RNG streams, rank statistics."""

from __future__ import annotations

import hashlib
import math

import numpy as np


def fmt12(x) -> str:
    """Format a number with 12 significant digits (stable across platforms)."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x != x:
        return "nan"
    if x == float("inf"):
        return "inf"
    if x == float("-inf"):
        return "-inf"
    return format(x, ".12g")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Independent, reproducible RNG stream derived from a root seed.

    Streams are keyed by integer tuples so that e.g. the synthetic generator
    and each grid cell draw from unrelated sequences of the same root seed.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(stream)))


def pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    """Pearson correlation, or None when either vector has zero variance."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x = x - x.mean()
    y = y - y.mean()
    sx = float(np.dot(x, x))
    sy = float(np.dot(y, y))
    if sx == 0.0 or sy == 0.0:
        return None
    return float(np.dot(x, y) / math.sqrt(sx * sy))


def average_ranks(x: np.ndarray) -> np.ndarray:
    """Ranks 1..n, ties replaced by the average rank of the tied block."""
    x = np.asarray(x)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x), dtype=np.float64)
    ranks[order] = np.arange(1, len(x) + 1, dtype=np.float64)
    xs = x[order]
    boundaries = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1], True])
    for lo, hi in zip(boundaries[:-1], boundaries[1:]):
        if hi - lo > 1:
            ranks[order[lo:hi]] = 0.5 * (lo + 1 + hi)
    return ranks


def spearman(x: np.ndarray, y: np.ndarray) -> float | None:
    """Spearman rank correlation with average ranks, None when degenerate."""
    return pearson(average_ranks(x), average_ranks(y))
