"""Primitive pseudorandom families.

All samplers are deterministic functions of (family descriptor, seed).
Seed layout within a family is fixed: coefficients / components are read
MSB-first in declaration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .bitseq import bit_slice, check_seed
from .fields import Field, GF2Field, gf2, next_prime, prime_field


def _coeff_bits(q: int) -> int:
    return max(1, (q - 1).bit_length())


class KWiseFamily:
    """k-wise independent vectors over [q]: seed-decoded polynomial of
    degree < k evaluated at the first n field elements."""

    def __init__(self, field: Field, n: int, k: int):
        if n > field.q:
            raise ValueError(f"n={n} exceeds field size {field.q}: "
                             "not enough evaluation points")
        if k < 1:
            raise ValueError("k must be >= 1")
        self.field = field
        self.n = n
        self.k = k
        self.q = field.q
        self.coeff_bits = _coeff_bits(field.q)
        self.seed_bits = k * self.coeff_bits

    def coeffs(self, seed: int) -> list[int]:
        check_seed(seed, self.seed_bits)
        w = self.coeff_bits
        return [bit_slice(seed, self.seed_bits, j * w, (j + 1) * w) % self.q
                for j in range(self.k)]

    def eval_at(self, seed: int, point: int) -> int:
        c = self.coeffs(seed)
        acc = 0
        for cj in reversed(c):
            acc = self.field.add(self.field.mul(acc, point), cj)
        return acc

    def sample(self, seed: int) -> np.ndarray:
        return self.sample_batch(np.asarray([seed]))[0]

    def eval_points_batch(self, seeds: np.ndarray,
                          points: np.ndarray) -> np.ndarray:
        """Value at points[i] under seed seeds[i], one output per row;
        avoids materializing all n evaluation points."""
        seeds = np.asarray(seeds)
        points = np.asarray(points)
        if self.seed_bits > 62 or self.q > (1 << 62):
            out = np.empty(len(seeds), dtype=object)
            for i in range(len(seeds)):
                out[i] = self.eval_at(int(seeds[i]), int(points[i]))
            return out
        seeds = seeds.astype(np.int64)
        points = points.astype(np.int64)
        w = self.coeff_bits
        f = self.field
        add = (lambda a, b: a ^ b) if isinstance(f, GF2Field) else \
              (lambda a, b: (a + b) % f.q)
        acc = np.zeros(len(seeds), dtype=np.int64)
        for j in range(self.k - 1, -1, -1):
            shift = self.seed_bits - (j + 1) * w
            cj = ((seeds >> shift) & ((1 << w) - 1)) % self.q
            acc = add(f.mul_vec(acc, points), cj)
        return acc

    def sample_batch(self, seeds: np.ndarray) -> np.ndarray:
        """(len(seeds), n) array of values in [q]."""
        seeds = np.asarray(seeds)
        if self.seed_bits > 62 or self.q > (1 << 62):
            # big fields: per-seed Horner evaluation with python ints
            out = np.empty((len(seeds), self.n), dtype=object)
            for i in range(len(seeds)):
                c = self.coeffs(int(seeds[i]))
                for x in range(self.n):
                    acc = 0
                    for cj in reversed(c):
                        acc = self.field.add(self.field.mul(acc, x), cj)
                    out[i, x] = acc
            return out
        seeds = seeds.astype(np.int64)
        w = self.coeff_bits
        coeff = np.empty((len(seeds), self.k), dtype=np.int64)
        for j in range(self.k):
            shift = self.seed_bits - (j + 1) * w
            coeff[:, j] = ((seeds >> shift) & ((1 << w) - 1)) % self.q
        points = np.arange(self.n, dtype=np.int64)
        acc = np.zeros((len(seeds), self.n), dtype=np.int64)
        f = self.field
        add = (lambda a, b: a ^ b) if isinstance(f, GF2Field) else \
              (lambda a, b: (a + b) % f.q)
        for j in range(self.k - 1, -1, -1):
            acc = f.mul_vec(acc, points[None, :])
            acc = add(acc, coeff[:, j][:, None])
        return acc


class KWiseVectors:
    """k-wise independent vectors over [m], built over a field of size q
    and reduced mod m. Exactly uniform marginals when m divides q;
    otherwise the per-string deviation is at most n*m/q (delta_map)."""

    def __init__(self, n: int, m: int, k: int, delta_map: float = 1e-3):
        self.n = n
        self.m = m
        self.k = k
        if m >= 2 and m & (m - 1) == 0:
            t = max(m.bit_length() - 1, max(1, (max(n, 2) - 1).bit_length()))
            f: Field = gf2(t)
            self.delta_map_actual = 0.0
        else:
            q = next_prime(max(n, m * max(1, math.ceil(4 * n / delta_map))))
            f = prime_field(q)
            self.delta_map_actual = n * m / q
        self.inner = KWiseFamily(f, n, k)
        self.seed_bits = self.inner.seed_bits

    def sample(self, seed: int) -> np.ndarray:
        return self.inner.sample(seed) % self.m

    def sample_batch(self, seeds: np.ndarray) -> np.ndarray:
        return self.inner.sample_batch(seeds) % self.m


def kwise_sample(fam: KWiseFamily, seed: int) -> np.ndarray:
    return fam.sample(seed)


class SmallBiasFamily:
    """delta-biased bits by the powering construction over GF(2^t):
    bit i = lsb(x^i * y) for seed (x, y), t = ceil(log2(n/delta)) + 1."""

    def __init__(self, n: int, delta: float):
        if not 0 < delta <= 1:
            raise ValueError("delta must be in (0, 1]")
        self.n = n
        self.delta = delta
        self.t = max(1, math.ceil(math.log2(max(n, 1) / delta))) + 1
        self.field = gf2(self.t)
        self.seed_bits = 2 * self.t
        # worst-case parity bias: a nonzero polynomial of degree < n has
        # at most n-1 roots among the 2^t choices of x
        self.bias_bound = (n - 1) / (1 << self.t) if n > 1 else 0.0

    def sample(self, seed: int) -> np.ndarray:
        return self.sample_batch(np.asarray([seed]))[0]

    def sample_batch(self, seeds: np.ndarray) -> np.ndarray:
        """(len(seeds), n) array of bits."""
        seeds = np.asarray(seeds, dtype=np.int64)
        check_seed(int(seeds.max(initial=0)), self.seed_bits)
        x = seeds >> self.t
        y = seeds & ((1 << self.t) - 1)
        out = np.empty((len(seeds), self.n), dtype=np.int64)
        power = np.ones(len(seeds), dtype=np.int64)  # x^0
        f = self.field
        for i in range(self.n):
            out[:, i] = f.mul_vec(power, y) & 1
            if i + 1 < self.n:
                power = f.mul_vec(power, x)
        return out

    def sample_packed(self, seeds: np.ndarray) -> np.ndarray:
        bits = self.sample_batch(seeds)
        weights = 1 << np.arange(self.n - 1, -1, -1, dtype=np.int64)
        return bits @ weights


def small_bias_sample(fam: SmallBiasFamily, seed: int) -> np.ndarray:
    return fam.sample(seed)


class CombinedHashFamily:
    """Hash functions [n] -> [t]: a k-wise independent part, optionally
    xor-combined (per output bit) with a delta-biased string.

    In delta=0 mode and with t a power of two the joint distribution of
    any <= k point evaluations is exactly uniform.
    """

    def __init__(self, n: int, t: int, k: int, delta: float = 0.0):
        if t < 1:
            raise ValueError("range must be nonempty")
        self.n = n
        self.t = t
        self.k = k
        self.delta = delta
        self.range_pow2 = t & (t - 1) == 0
        if self.range_pow2:
            s = max(max(1, t.bit_length() - 1),
                    max(1, (max(n, 2) - 1).bit_length()))
            self.kwise = KWiseFamily(gf2(s), n, k)
        else:
            q = next_prime(max(n, t * t, 2 * t))
            self.kwise = KWiseFamily(prime_field(q), n, k)
        if delta > 0:
            if not self.range_pow2:
                raise ValueError("biased mode requires power-of-two range")
            self.rbits = t.bit_length() - 1
            self.bias = SmallBiasFamily(n * self.rbits, delta)
            self.seed_bits = self.kwise.seed_bits + self.bias.seed_bits
        else:
            self.bias = None
            self.seed_bits = self.kwise.seed_bits

    def table_batch(self, seeds: np.ndarray) -> np.ndarray:
        """(len(seeds), n) tables of values in [t]."""
        seeds = np.asarray(seeds)
        if self.bias is None:
            return self.kwise.sample_batch(seeds) % self.t
        kseed = seeds >> self.bias.seed_bits
        bseed = seeds & ((1 << self.bias.seed_bits) - 1)
        base = self.kwise.sample_batch(kseed) % self.t
        bits = self.bias.sample_batch(bseed).reshape(len(seeds), self.n,
                                                     self.rbits)
        weights = 1 << np.arange(self.rbits - 1, -1, -1, dtype=np.int64)
        return base ^ (bits @ weights)

    def table(self, seed: int) -> np.ndarray:
        return self.table_batch(np.asarray([seed]))[0]

    def eval(self, seed: int, i: int) -> int:
        if self.bias is None:
            return self.kwise.eval_at(seed, i) % self.t
        return int(self.table(seed)[i])


def hash_sample(fam: CombinedHashFamily, seed: int) -> np.ndarray:
    return fam.table(seed)


@dataclass(frozen=True)
class PairwisePermutation:
    """x -> a*x + b over GF(2^t), a != 0: a pairwise independent
    permutation of [2^t]."""

    t: int
    a: int
    b: int
    field: GF2Field = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.a < (1 << self.t):
            raise ValueError("a must be a nonzero field element")
        object.__setattr__(self, "field", gf2(self.t))

    def apply(self, x: int) -> int:
        return self.field.mul(self.a, x) ^ self.b

    def apply_vec(self, xs: np.ndarray) -> np.ndarray:
        return self.field.mul_scalar_vec(self.a, xs) ^ self.b

    def table(self) -> np.ndarray:
        return self.apply_vec(np.arange(1 << self.t, dtype=np.int64))


def perm_seed_bits(t: int) -> int:
    return 2 * t


def perm_sample(t: int, seed: int) -> PairwisePermutation:
    """Rejection-free decoding: a from [2^t - 1] then +1 offset."""
    check_seed(seed, 2 * t)
    a_raw = seed >> t
    b = seed & ((1 << t) - 1)
    a = a_raw % ((1 << t) - 1) + 1 if t > 1 else 1
    return PairwisePermutation(t, a, b)


def hash_load(v: np.ndarray, h: np.ndarray, t: int) -> float:
    """sum_j (sum_{i: h(i)=j} v_i^2)^2 over buckets j in [t]."""
    v = np.asarray(v, dtype=float)
    if v.shape != np.asarray(h).shape:
        raise ValueError("v and h must have matching length")
    bucket = np.bincount(np.asarray(h, dtype=np.int64), weights=v * v,
                         minlength=t)
    return float(np.sum(bucket * bucket))
