"""Deterministic counter-based random source.

A stream is a 64-bit key plus a counter; each draw mixes the counter with the
key (splitmix-style), so equal seeds give equal streams and `split` derives
independent child streams by index without sharing state.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z):
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class Rng:
    __slots__ = ("key", "counter", "_spare_normal")

    def __init__(self, seed=0, stream=0):
        self.key = _mix((seed & _MASK) ^ _mix((stream + 1) * _GOLDEN))
        self.counter = 0
        self._spare_normal = None

    def split(self, i):
        """Independent child stream for index i; deterministic in (seed, i)."""
        child = Rng.__new__(Rng)
        child.key = _mix(self.key ^ _mix((i + 1) * _GOLDEN))
        child.counter = 0
        child._spare_normal = None
        return child

    def next_u64(self):
        self.counter = (self.counter + _GOLDEN) & _MASK
        return _mix(self.key ^ self.counter)

    def uniform(self):
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randint(self, n):
        """Integer in [0, n)."""
        if n <= 0:
            raise ValueError("randint needs n >= 1")
        # rejection sampling for exact uniformity
        limit = _MASK - (_MASK % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def normal(self, mean=0.0, sd=1.0):
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return mean + sd * z
        while True:
            u1 = self.uniform()
            if u1 > 0.0:
                break
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        z0 = r * math.cos(2.0 * math.pi * u2)
        self._spare_normal = r * math.sin(2.0 * math.pi * u2)
        return mean + sd * z0

    def exponential(self, rate):
        while True:
            u = self.uniform()
            if u > 0.0:
                return -math.log(u) / rate

    def gamma(self, shape):
        """Marsaglia-Tsang for shape >= 1, boosted for shape < 1."""
        if shape < 1.0:
            u = self.uniform()
            while u <= 0.0:
                u = self.uniform()
            return self.gamma(shape + 1.0) * (u ** (1.0 / shape))
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            x = self.normal()
            v = 1.0 + c * x
            if v <= 0.0:
                continue
            v = v * v * v
            u = self.uniform()
            if u < 1.0 - 0.0331 * (x * x) * (x * x):
                return d * v
            if u > 0.0 and math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
                return d * v

    def beta(self, a, b):
        x = self.gamma(a)
        y = self.gamma(b)
        return x / (x + y)

    def poisson(self, lam):
        if lam < 30.0:
            # Knuth: multiply uniforms until below exp(-lam)
            limit = math.exp(-lam)
            k = 0
            p = self.uniform()
            while p > limit:
                k += 1
                p *= self.uniform()
            return k
        # split recursively: Poisson(a+b) = Poisson(a) + Poisson(b)
        half = math.floor(lam / 2.0)
        return self.poisson(half) + self.poisson(lam - half)
