"""Deterministic hash-based sampling primitives.

Every random decision in the toolkit is a pure function of a seed and a
stable key, so results do not depend on iteration order or on how work is
split across workers.
"""

import hashlib
from typing import Sequence, TypeVar

T = TypeVar("T")

# Documented default for every subcommand and policy; fixed for reproducibility.
DEFAULT_SEED = 42

_SCALE = float(2**64)


def stable_hash(seed: int, *parts: object) -> int:
    """Hash a seed plus key parts to a uniform 64-bit integer.

    Parts are length-prefixed before hashing so no combination of part
    values can collide by concatenation.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(seed)).encode("utf-8"))
    for part in parts:
        data = str(part).encode("utf-8")
        h.update(len(data).to_bytes(4, "big"))
        h.update(data)
    return int.from_bytes(h.digest(), "big")


def stable_fraction(seed: int, *parts: object) -> float:
    """Map a seed plus key parts to a uniform float in [0, 1)."""
    return stable_hash(seed, *parts) / _SCALE


def stable_choice(seq: Sequence[T], seed: int, *parts: object) -> T:
    """Pick one element of a non-empty sequence, keyed by seed and parts."""
    if not seq:
        raise IndexError("stable_choice on empty sequence")
    return seq[stable_hash(seed, *parts) % len(seq)]
