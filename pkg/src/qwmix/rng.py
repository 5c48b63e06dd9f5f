"""Counter-based random numbers keyed by ``(seed, stream, i, j)``.

Every draw is a pure function of its key, so a matrix entry does not
depend on the order in which entries are generated or on how trials are
spread across workers.  The mixing function is the SplitMix64 finalizer;
a stream with state ``s`` produces ``mix64(s + k * GOLDEN)`` for counter
``k >= 1``, which is exactly the SplitMix64 sequence started from ``s``.
"""

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1

_G = np.uint64(GOLDEN)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_S32 = np.uint64(32)


def mix64(z):
    """SplitMix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def mix64_int(z):
    """Scalar reference implementation using Python integers."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _check_u64(value, name):
    value = int(value)
    if not 0 <= value <= _MASK:
        raise ValueError(f"{name} must fit in an unsigned 64-bit integer, got {value}")
    return value


def stream_key(seed, stream=0):
    """Derive the 64-bit base state for one ``(seed, stream)`` pair."""
    seed = _check_u64(seed, "seed")
    stream = _check_u64(stream, "stream")
    k = mix64_int(seed + GOLDEN)
    return mix64_int(k + (stream + 1) * GOLDEN)


def pair_counter(i, j):
    """Pack row/column indices (each below 2**32) into one counter."""
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    return (i << _S32) | j


def random_bits(seed, stream, i, j):
    """64 random bits per ``(i, j)`` for the given seed and stream."""
    key = np.uint64(stream_key(seed, stream))
    ctr = pair_counter(i, j)
    with np.errstate(over="ignore"):
        return mix64(key + (ctr + np.uint64(1)) * _G)


def uniform(seed, stream, i, j):
    """Doubles in [0, 1) with 53 random mantissa bits."""
    bits = random_bits(seed, stream, i, j)
    return (bits >> _S11).astype(np.float64) * (1.0 / (1 << 53))


def splitmix64_sequence(state, count):
    """Reference SplitMix64 sequence from ``state`` (pure Python)."""
    out = []
    for _ in range(count):
        state = (state + GOLDEN) & _MASK
        out.append(mix64_int(state))
    return out
