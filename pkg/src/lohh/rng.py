"""Deterministic random streams shared by the Python and compiled code paths.

The generator is xoshiro256++ with its state held in a plain uint64 array of
length 4, seeded through splitmix64.  Keeping the state explicit (instead of
using numpy's Generator objects) lets the exact same functions run inside
numba kernels and in ordinary Python, so a trial is reproducible from
(master_seed, trial_index) no matter which execution engine drives it.
"""

import numpy as np
from numba import njit

U64 = np.uint64

_SPLITMIX_GAMMA = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)


@njit(cache=True, nogil=True)
def splitmix64(z):
    """One splitmix64 output for the (already advanced) counter z."""
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True)
def seed_state(seed):
    """Fill a fresh xoshiro256++ state from a 64-bit seed via splitmix64."""
    s = np.empty(4, dtype=np.uint64)
    z = U64(seed)
    for i in range(4):
        z = z + _SPLITMIX_GAMMA
        s[i] = splitmix64(z)
    if s[0] == U64(0) and s[1] == U64(0) and s[2] == U64(0) and s[3] == U64(0):
        s[0] = U64(1)  # the all-zero state is the one fixed point
    return s


@njit(cache=True, nogil=True)
def trial_state(master_seed, trial_index):
    """Derive the independent stream for one trial of a batch."""
    z = U64(master_seed) ^ (U64(trial_index) * _MIX1 + _MIX2)
    return seed_state(z)


@njit(cache=True, nogil=True)
def next_u64(s):
    """Advance the state in place and return the next 64-bit output."""
    s0 = s[0]
    s1 = s[1]
    s2 = s[2]
    s3 = s[3]
    result = s0 + s3
    result = ((result << U64(23)) | (result >> U64(41))) + s0
    t = s1 << U64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = (s3 << U64(45)) | (s3 >> U64(19))
    s[0] = s0
    s[1] = s1
    s[2] = s2
    s[3] = s3
    return result


@njit(cache=True, nogil=True)
def randbelow(s, bound):
    """Uniform integer in [0, bound) by masked rejection; bound >= 1.

    Always consumes at least one output, including for bound == 1, so random
    consumption is a deterministic function of the call sequence.
    """
    m = U64(bound - 1)
    m |= m >> U64(1)
    m |= m >> U64(2)
    m |= m >> U64(4)
    m |= m >> U64(8)
    m |= m >> U64(16)
    m |= m >> U64(32)
    b = U64(bound)
    while True:
        r = next_u64(s) & m
        if r < b:
            return np.int64(r)


@njit(cache=True, nogil=True)
def u01(s):
    """Uniform float in the half-open interval (0, 1] (safe under log)."""
    return ((next_u64(s) >> U64(11)) + U64(1)) * (1.0 / 9007199254740992.0)
