"""
Core utility functions for Ansense
"""
import hashlib
import json
from typing import Any, Iterable

import numpy as np

# Independent RNG streams derived from one user seed.
STREAM_SCENE = 1
STREAM_SEGMENTATION = 2
STREAM_SAMPLING = 3
STREAM_PLANNING = 4
STREAM_EXECUTION = 5
STREAM_SENSOR_NOISE = 6
STREAM_TRAINING = 7
STREAM_DATASET = 8


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """
    Create a generator for one named stream of a seeded run.

    The same (seed, keys) always yields the same stream, and distinct keys yield
    statistically independent streams.

    Args:
        seed: User-facing seed (non-negative)
        keys: Stream identifiers, e.g. STREAM_SAMPLING and a step index

    Returns:
        numpy Generator
    """
    entropy = [int(seed) & 0xFFFFFFFF] + [int(k) & 0xFFFFFFFF for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(seed: int, *keys: int) -> int:
    """Derive a child integer seed, for APIs that take a plain seed"""
    return int(derive_rng(seed, *keys).integers(0, 2**31 - 1))


def content_hash(data: bytes) -> str:
    """SHA-256 hex digest of raw bytes"""
    return hashlib.sha256(data).hexdigest()


def array_stamp(*arrays: np.ndarray) -> str:
    """Short digest identifying the content of one or more arrays"""
    digest = hashlib.blake2b(digest_size=8)
    for arr in arrays:
        digest.update(np.ascontiguousarray(arr).tobytes())
    return digest.hexdigest()


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into plain JSON types"""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def dumps_line(record: Any) -> str:
    """Serialise one JSONL record with a stable key order"""
    return json.dumps(to_jsonable(record), sort_keys=True, separators=(",", ":"))


def mean_std(values: Iterable[float]) -> tuple[float, float]:
    """Population mean and standard deviation, (nan, nan) when empty"""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        return float("nan"), float("nan")
    return float(arr.mean()), float(arr.std())
