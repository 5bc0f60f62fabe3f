"""Stateless seed derivation.

Every random stream in the package is keyed by a tuple of integers/strings
mixed through splitmix64, so results never depend on call order or on
which worker process ran a job.
"""

import zlib

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _as_int(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if isinstance(part, bool):
        return int(part)
    return int(part) & MASK64


def derive_seed(*parts) -> int:
    """Fold ``parts`` into one 64-bit seed: h = splitmix64(h ^ part) per part.

    Strings are mapped to integers with CRC-32 first.
    """
    h = 0
    for part in parts:
        h = splitmix64(h ^ _as_int(part))
    return h
