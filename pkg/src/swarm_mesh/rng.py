"""Counter-based deterministic random sampling.

The emulated network and the noisy communication topology need random draws
that are (a) reproducible across runs and platforms and (b) addressable by
*what* is being sampled (seed, tick, sender, receiver, attempt, ...) rather
than by draw order.  A splitmix64-style hash over the identifying integers
gives both properties without carrying RNG state around.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _fold(part) -> int:
    if isinstance(part, int):
        return part & _MASK
    if isinstance(part, str):
        acc = 0x811C9DC5
        for b in part.encode("utf-8"):
            acc = ((acc ^ b) * 0x01000193) & _MASK
        return acc
    raise TypeError(f"unsupported hash part: {part!r}")


def hash_u64(*parts) -> int:
    """Deterministic 64-bit hash of a sequence of ints/strings."""
    h = 0x6A09E667F3BCC909
    for part in parts:
        h = _mix((h + _GAMMA) ^ _fold(part))
    return _mix(h)


def uniform(*parts) -> float:
    """Uniform draw in [0, 1) addressed by the given parts."""
    return hash_u64(*parts) / float(1 << 64)


def normal(*parts) -> float:
    """Standard normal draw (Box-Muller) addressed by the given parts."""
    u1 = uniform(*parts, 1)
    u2 = uniform(*parts, 2)
    # keep u1 away from 0 so log() is finite
    u1 = max(u1, 1e-18)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def lognormal(median: float, sigma: float, *parts) -> float:
    """Lognormal draw with the given median and log-space sigma."""
    if median <= 0.0:
        return 0.0
    return median * math.exp(sigma * normal(*parts))
