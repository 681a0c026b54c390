"""Derive independent per-trial seeds from a run seed.

Seeds are split by hashing, not by drawing from a shared generator, so a trial's inputs
depend only on ``(seed, suite, check, dim, trial)`` and trials can run in any order or in
parallel.

String path components are hashed with BLAKE2b (8-byte digest). Integers are mixed in
with the SplitMix64 finalizer: the state is advanced by ``(component + 1)`` times the
golden-ratio constant ``0x9E3779B97F4A7C15`` and scrambled with the multipliers
``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB``.
"""
import hashlib
from typing import Union

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def label_key(label: str) -> int:
    digest = hashlib.blake2b(label.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(seed: int, *path: Union[int, str]) -> int:
    """Return a 64-bit seed for the sub-stream named by ``path``."""
    state = seed & MASK64
    for component in path:
        key = label_key(component) if isinstance(component, str) else component
        state = splitmix64(state + (key + 1) * GOLDEN_GAMMA)
    return state
