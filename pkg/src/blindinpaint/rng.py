"""Pinned pseudo-random generator for reproducible corruption and experiments.

Every random draw in this package funnels through :class:`Xoshiro256pp`, a
fixed 64-bit shift-register generator, so that a run is fully determined by
its integer seed.  The algorithm is pinned here, constants and all, so that a
re-implementation in any language reproduces the same streams bit for bit:

* State: four 64-bit words ``s0..s3``, seeded by four successive outputs of
  the splitmix64 sequence started at ``seed`` (increment ``0x9E3779B97F4A7C15``,
  mixing multipliers ``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB``).
* Output: ``rotl(s0 + s3, 23) + s0`` (all mod 2^64), followed by the
  xoshiro256 state transition ``t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2;
  s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)``.
* Doubles in [0, 1): ``(word >> 11) * 2^-53``.
* Normals: Box-Muller pairs.  Pair k consumes two consecutive words a, b:
  ``u1 = ((a >> 11) + 1) * 2^-53`` (in (0, 1], so the log is finite) and
  ``u2 = (b >> 11) * 2^-53``; then ``z0 = sqrt(-2 ln u1) cos(2 pi u2)`` and
  ``z1 = sqrt(-2 ln u1) sin(2 pi u2)``.  A batch of n normals consumes
  ``2 * ceil(n / 2)`` words and discards the unused half of the last pair
  when n is odd.
"""

import numpy as np
from numba import njit

_SPLITMIX_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SPLITMIX_MULT1 = np.uint64(0xBF58476D1CE4E5B9)
_SPLITMIX_MULT2 = np.uint64(0x94D049BB133111EB)

_U64_MASK = (1 << 64) - 1


def splitmix64(state):
    """One splitmix64 step: returns (output, next_state) as Python ints."""
    state = (state + 0x9E3779B97F4A7C15) & _U64_MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64_MASK
    z = z ^ (z >> 31)
    return z, state


def mix_seed(seed, *components):
    """Derive a sub-stream seed from a base seed and integer components.

    Chains splitmix64: fold each component into the state, then mix.  Used to
    give experiment cells disjoint streams without a shared generator.
    """
    h = seed & _U64_MASK
    for c in components:
        h, _ = splitmix64((h + (int(c) & _U64_MASK)) & _U64_MASK)
    return h


@njit(cache=True)
def _fill_words(state, out):
    s0, s1, s2, s3 = state[0], state[1], state[2], state[3]
    for i in range(out.size):
        tmp = s0 + s3
        result = ((tmp << np.uint64(23)) | (tmp >> np.uint64(41))) + s0
        t = s1 << np.uint64(17)
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
        out[i] = result
    state[0], state[1], state[2], state[3] = s0, s1, s2, s3


class Xoshiro256pp:
    """xoshiro256++ generator seeded via splitmix64 (see module docstring)."""

    def __init__(self, seed):
        seed = int(seed) & _U64_MASK
        state = seed
        words = []
        for _ in range(4):
            z, state = splitmix64(state)
            words.append(z)
        self._s = np.array(words, dtype=np.uint64)

    def words(self, n):
        """Next n raw 64-bit outputs as a uint64 array."""
        out = np.empty(int(n), dtype=np.uint64)
        _fill_words(self._s, out)
        return out

    def uniforms(self, n):
        """Next n doubles uniform on [0, 1)."""
        w = self.words(n)
        return (w >> np.uint64(11)).astype(np.float64) * 2.0 ** -53

    def normals(self, n):
        """Next n standard normal doubles via Box-Muller pairs."""
        n = int(n)
        npairs = (n + 1) // 2
        w = self.words(2 * npairs)
        a = w[0::2]
        b = w[1::2]
        u1 = ((a >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0 ** -53
        u2 = (b >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        z = np.empty(2 * npairs)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return z[:n]

    def index_below(self, bound):
        """One integer uniform on {0, ..., bound-1} via floor(u * bound)."""
        u = self.uniforms(1)[0]
        j = int(u * bound)
        if j >= bound:  # u rounds to 1.0 only if bound is huge; clamp anyway
            j = bound - 1
        return j
