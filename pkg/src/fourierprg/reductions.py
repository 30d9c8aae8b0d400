"""Structural reductions.

Alphabet reduction replaces symbols from [m] by table lookups into a
pairwise-per-column, k-wise-across-columns matrix, indexed by an inner
generator over the reduced alphabet [D], D = floor(sqrt(m)).

Dimension reduction hashes coordinates into t = ceil(sqrt(n)) buckets and
fills each bucket from a k-wise string whose seed is one symbol of an
inner generator over the blown-up alphabet [2^r0].
"""

from __future__ import annotations

import math

import numpy as np

from .core import Generator, plan_to_generator, register_plan
from .families import CombinedHashFamily, KWiseFamily, KWiseVectors
from .fields import gf2, next_prime, prime_field
from .shapes import FourierShape, shape_stats


def _column_field(m: int):
    """Field with >= max(m, D) points whose reduction mod m is exact for
    powers of two."""
    if m & (m - 1) == 0:
        return gf2(max(1, m.bit_length() - 1))
    return prime_field(next_prime(max(m, 3)))


@register_plan("alphabet-step")
class AlphabetStepPlan(Generator):
    """One m -> floor(sqrt(m)) reduction step around an inner generator."""

    def __init__(self, m: int, n: int, delta: float, inner: Generator,
                 C: float = 4.0, check_applicability: bool = True):
        if check_applicability and m <= n ** 4:
            raise ValueError("step not applicable: m <= n^4")
        self.check_applicability = check_applicability
        self.m = m
        self.n = n
        self.delta = delta
        self.C = C
        self.D = math.isqrt(m)
        if inner.m != self.D or inner.n != n:
            raise ValueError(f"inner generator must produce [{self.D}]^{n}")
        self.inner = inner
        self.k = max(1, math.ceil(C * math.log2(1 / delta) / math.log2(m)))
        self.col_field = _column_field(m)
        self.col_family = KWiseFamily(self.col_field, max(self.D, 1), 2)
        self.col_seed_bits = self.col_family.seed_bits
        # column seeds drawn k-wise from their own (power-of-two) space
        self.cross_family = KWiseVectors(n, 1 << self.col_seed_bits, self.k)
        self.local_bits = self.cross_family.seed_bits
        self.seed_bits = self.local_bits + inner.seed_bits

    def sample_matrix(self, seeds) -> np.ndarray:
        """(N, D, n) matrices over [m]."""
        seeds = np.asarray(seeds)
        col_seeds = self.cross_family.sample_batch(seeds)  # (N, n)
        N = len(seeds)
        X = np.empty((N, self.D, self.n), dtype=np.int64)
        for j in range(self.n):
            X[:, :, j] = self.col_family.sample_batch(col_seeds[:, j]) % self.m
        return X

    def generate_batch(self, seeds) -> np.ndarray:
        seeds = np.asarray(seeds)
        local = (seeds >> self.inner.seed_bits) & ((1 << self.local_bits) - 1)
        if self.local_bits <= 62:
            local = local.astype(np.int64)
        inner_seed = seeds & ((1 << self.inner.seed_bits) - 1)
        col_seeds = self.cross_family.sample_batch(local)  # (N, n)
        Y = self.inner.generate_batch(inner_seed)  # (N, n) over [D]
        # evaluate each column polynomial only at the selected row, never
        # materializing the D x n lookup matrix
        out = np.empty((len(col_seeds), self.n), dtype=np.int64)
        for j in range(self.n):
            vals = self.col_family.eval_points_batch(col_seeds[:, j], Y[:, j])
            out[:, j] = np.asarray(vals % self.m, dtype=np.int64)
        return out

    def plan(self) -> dict:
        return {"type": "alphabet-step", "m": self.m, "n": self.n,
                "delta": self.delta, "C": self.C, "D": self.D, "k": self.k,
                "check_applicability": self.check_applicability,
                "local_seed_bits": self.local_bits,
                "seed_bits": self.seed_bits,
                "children": [self.inner.plan()]}

    @classmethod
    def from_plan(cls, d):
        return cls(d["m"], d["n"], d["delta"],
                   plan_to_generator(d["children"][0]), d["C"],
                   d.get("check_applicability", True))


def alphabet_step(plan: AlphabetStepPlan, seed: int) -> np.ndarray:
    return plan.generate_batch(np.asarray([seed], dtype=object))[0]


def bias_function(f: FourierShape, x: np.ndarray) -> complex:
    """prod_j mean_l f_j(x[l, j]) for a matrix x in [m]^(D x n)."""
    x = np.asarray(x, dtype=np.int64)
    if x.ndim != 2 or x.shape[1] != f.n:
        raise ValueError("matrix must be D x n")
    cols = f.table[np.arange(f.n)[None, :], x]  # (D, n) values
    return complex(np.prod(cols.mean(axis=0)))


def alphabet_reduce(m: int, n: int, delta: float, base_factory,
                    C: float = 4.0) -> Generator:
    """Chain of alphabet steps down to alphabet <= n^4; base_factory(m',
    n, delta') supplies the terminal generator."""
    chain = []
    mm = m
    while mm > n ** 4:
        chain.append(mm)
        mm = math.isqrt(mm)
    steps = len(chain)
    if steps == 0:
        return base_factory(m, n, delta)
    per_step = delta / (2 * steps)
    gen = base_factory(mm, n, delta / 2)
    for mv in reversed(chain):
        gen = AlphabetStepPlan(mv, n, per_step, gen, C)
    return gen


def dim_step_params(m: int, n: int, delta: float, C: float = 4.0):
    """(t, k, r0) a DimStepPlan would use, computable before the inner
    generator exists."""
    t = math.isqrt(n) if math.isqrt(n) ** 2 == n else math.isqrt(n) + 1
    k = max(1, math.ceil(
        C * math.log2(max(n, 2) / delta) / math.log2(max(n, 2))))
    r0 = KWiseVectors(n, m, k).seed_bits
    return t, k, r0


@register_plan("dim-step")
class DimStepPlan(Generator):
    """n -> t = ceil(sqrt(n)) dimension reduction around an inner
    generator over [2^r0]^t."""

    def __init__(self, m: int, n: int, delta: float, inner: Generator,
                 C: float = 4.0):
        if m > n ** 4:
            raise ValueError("dimension step requires m <= n^4")
        self.m = m
        self.n = n
        self.delta = delta
        self.C = C
        self.t = math.isqrt(n) if math.isqrt(n) ** 2 == n \
            else math.isqrt(n) + 1
        self.k = max(1, math.ceil(
            C * math.log2(max(n, 2) / delta) / math.log2(max(n, 2))))
        self.bucket_hash = CombinedHashFamily(n, self.t, self.k, 0.0)
        self.within = KWiseVectors(n, m, self.k)
        self.r0 = self.within.seed_bits
        self.m_inner = 1 << self.r0
        if inner.m != self.m_inner or inner.n != self.t:
            raise ValueError(
                f"inner generator must produce [{self.m_inner}]^{self.t}")
        self.inner = inner
        self.local_bits = self.bucket_hash.seed_bits
        self.seed_bits = self.local_bits + inner.seed_bits

    def generate_batch(self, seeds) -> np.ndarray:
        seeds = np.asarray(seeds)
        hseed = (seeds >> self.inner.seed_bits) & ((1 << self.local_bits) - 1)
        if self.local_bits <= 62:
            hseed = hseed.astype(np.int64)
        inner_seed = seeds & ((1 << self.inner.seed_bits) - 1)
        tables = self.bucket_hash.table_batch(hseed)  # (N, n)
        blocks = self.inner.generate_batch(inner_seed)  # (N, t) in [2^r0]
        out = np.zeros((len(tables), self.n), dtype=np.int64)
        for j in range(self.t):
            vals = self.within.sample_batch(
                np.asarray(blocks[:, j], dtype=np.int64))
            mask = tables == j
            out[mask] = vals[mask]
        return out

    def plan(self) -> dict:
        return {"type": "dim-step", "m": self.m, "n": self.n,
                "delta": self.delta, "C": self.C, "t": self.t, "k": self.k,
                "r0": self.r0, "m_inner": self.m_inner,
                "local_seed_bits": self.local_bits,
                "seed_bits": self.seed_bits,
                "children": [self.inner.plan()]}

    @classmethod
    def from_plan(cls, d):
        return cls(d["m"], d["n"], d["delta"],
                   plan_to_generator(d["children"][0]), d["C"])


def dim_step(plan: DimStepPlan, seed: int) -> np.ndarray:
    return plan.generate_batch(np.asarray([seed], dtype=object))[0]


def is_good_hash(h: np.ndarray, f: FourierShape, alpha: float, beta: float,
                 k: int) -> bool:
    """Every bucket has at most k/2 high-variance coordinates and at most
    beta total variance over its low-variance coordinates."""
    h = np.asarray(h, dtype=np.int64)
    var = shape_stats(f).variances
    if h.shape != var.shape:
        raise ValueError("hash table and shape disagree on n")
    t = int(h.max(initial=0)) + 1
    large = var >= alpha
    for j in range(t):
        mask = h == j
        if int(np.sum(large & mask)) > k / 2:
            return False
        if float(np.sum(var[mask & ~large])) > beta:
            return False
    return True
