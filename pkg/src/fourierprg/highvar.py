"""Generators for high-total-variance shapes.

G1: constant fooling error via dyadic bucketing by a pairwise-independent
permutation, a p-wise independent string per bucket, and (optionally)
seed recycling through the INW generator.

GLarge: error amplification by a spreading hash whose buckets each get an
independent-looking G1 output.
"""

from __future__ import annotations

import math

import numpy as np

from .bitseq import check_seed
from .core import Generator, register_plan
from .families import (CombinedHashFamily, KWiseVectors, perm_sample,
                       perm_seed_bits)
from .fields import gf2
from .robp import INWGenerator


class SeedRecycler:
    """Supplies total_bits of expanded seed material, either verbatim from
    the seed ("direct") or recycled through an INW instance ("inw")."""

    def __init__(self, total_bits: int, mode: str = "inw",
                 block_bits: int = 8, state_extra: int = 2):
        self.total_bits = total_bits
        self.mode = mode
        self.block_bits = block_bits
        self.state_extra = state_extra
        if mode == "direct":
            self.seed_bits = total_bits
            self.inw = None
        elif mode == "inw":
            nblocks = max(1, math.ceil(total_bits / block_bits))
            T = 1 << (nblocks - 1).bit_length()
            self.inw = INWGenerator(block_bits, T,
                                    min(16, block_bits + state_extra))
            self.seed_bits = self.inw.seed_bits
        else:
            raise ValueError(f"unknown recycler mode {mode!r}")

    def bitstream_batch(self, seeds) -> np.ndarray:
        """Object array of python ints, total_bits wide each."""
        seeds = np.asarray(seeds)
        if self.mode == "direct":
            out = np.empty(len(seeds), dtype=object)
            out[:] = [int(s) for s in seeds]
            return out
        blocks = self.inw.expand_batch(seeds)
        D = self.block_bits
        out = np.empty(len(seeds), dtype=object)
        drop = self.inw.T * D - self.total_bits
        for i in range(len(seeds)):
            v = 0
            for b in blocks[i]:
                v = (v << D) | int(b)
            out[i] = v >> drop
        return out

    def config(self) -> dict:
        return {"mode": self.mode, "block_bits": self.block_bits,
                "state_extra": self.state_extra,
                "seed_bits": self.seed_bits}


def dyadic_buckets(t: int) -> list[range]:
    """Domain-index intervals: {1}, {2,3}, ..., {2^(t-1)..2^t - 1}; the
    j-th has size 2^j. Domain index 0 joins bucket 0 by convention."""
    return [range(1 << j, 1 << (j + 1)) for j in range(t)]


def bucket_split(perm, n: int) -> list[np.ndarray]:
    """Coordinate buckets B_j = pi-image of the j-th dyadic interval,
    with pi(0) assigned to bucket 0."""
    if n < 2 or n & (n - 1):
        raise ValueError("n must be a power of two >= 2")
    t = n.bit_length() - 1
    buckets = []
    for j, interval in enumerate(dyadic_buckets(t)):
        coords = perm.apply_vec(np.arange(interval.start, interval.stop,
                                          dtype=np.int64))
        if j == 0:
            coords = np.concatenate([[perm.apply(0)], coords])
        buckets.append(coords)
    return buckets


@register_plan("g1")
class G1Plan(Generator):
    """Constant-error generator for shapes with total variance >= 1."""

    def __init__(self, m: int, n: int, p: int = 8, recycle: str = "inw",
                 delta_map: float = 1e-3):
        self.m = m
        self.n = n
        self.p = p
        self.recycle = recycle
        self.delta_map = delta_map
        self.n_padded = 1 << max(1, (n - 1).bit_length())
        self.tlog = self.n_padded.bit_length() - 1
        self.perm_bits = perm_seed_bits(self.tlog)
        sizes = [2] + [1 << j for j in range(1, self.tlog)]
        self.bucket_families = [KWiseVectors(sz, m, p, delta_map)
                                for sz in sizes]
        self.bucket_seed_bits = [fam.seed_bits for fam in self.bucket_families]
        self.recycler = SeedRecycler(sum(self.bucket_seed_bits), recycle)
        self.seed_bits = self.perm_bits + self.recycler.seed_bits

    def generate_batch(self, seeds) -> np.ndarray:
        seeds = np.asarray(seeds)
        N = len(seeds)
        perm_seed = ((seeds >> self.recycler.seed_bits)
                     & ((1 << self.perm_bits) - 1))
        rec_seed = seeds & ((1 << self.recycler.seed_bits) - 1)
        stream = self.recycler.bitstream_batch(rec_seed)
        total = self.recycler.total_bits

        t = self.tlog
        field = gf2(t)
        a_raw = (np.asarray(perm_seed, dtype=np.int64) >> t)
        b = np.asarray(perm_seed, dtype=np.int64) & ((1 << t) - 1)
        a = a_raw % ((1 << t) - 1) + 1 if t > 1 else np.ones(N, dtype=np.int64)

        out = np.zeros((N, self.n), dtype=np.int64)
        offset = 0
        rows = np.arange(N)
        for j, fam in enumerate(self.bucket_families):
            sbits = self.bucket_seed_bits[j]
            shift = total - offset - sbits
            if sbits <= 62:
                bseed = np.fromiter(
                    ((int(s) >> shift) & ((1 << sbits) - 1) for s in stream),
                    dtype=np.int64, count=N)
            else:
                bseed = np.empty(N, dtype=object)
                bseed[:] = [(int(s) >> shift) & ((1 << sbits) - 1)
                            for s in stream]
            vals = fam.sample_batch(bseed)  # (N, bucket size)
            # bucket 0 additionally receives the image of domain index 0
            interval = (np.arange(0, 2, dtype=np.int64) if j == 0
                        else np.arange(1 << j, 1 << (j + 1), dtype=np.int64))
            coords = field.mul_vec(a[:, None], interval[None, :]) ^ b[:, None]
            valid = coords < self.n
            out[rows[:, None].repeat(len(interval), 1)[valid], coords[valid]] \
                = vals[valid]
            offset += sbits
        return out

    def plan(self) -> dict:
        return {"type": "g1", "m": self.m, "n": self.n, "p": self.p,
                "recycle": self.recycle, "delta_map": self.delta_map,
                "recycler": self.recycler.config(),
                "local_seed_bits": self.seed_bits,
                "seed_bits": self.seed_bits}

    @classmethod
    def from_plan(cls, d):
        return cls(d["m"], d["n"], d["p"], d["recycle"], d["delta_map"])


def g1_generate(plan: G1Plan, seed: int) -> np.ndarray:
    check_seed(seed, plan.seed_bits)
    return plan.generate_batch(np.asarray([seed], dtype=object))[0]


class SpreadingFamily:
    """Hash family [n] -> [T] meant to spread any heavy vector's squared
    mass over at least ell buckets with probability 1 - delta.

    T = max(16, ceil(c_T * log2(1/delta)^5)), threshold B = 2T,
    ell = ceil(2 * log2(1/delta)); the constants are knobs validated
    empirically (spot_check), not derived values.
    """

    def __init__(self, n: int, delta: float, c_T: float = 0.125,
                 k: int | None = None):
        self.n = n
        self.delta = delta
        log1d = max(1.0, math.log2(1 / delta))
        self.T = max(16, math.ceil(c_T * log1d ** 5))
        self.B = 2 * self.T
        self.ell = math.ceil(2 * log1d)
        self.k = k if k is not None else min(n, 2 + math.ceil(2 * log1d))
        self.family = CombinedHashFamily(n, self.T, self.k, 0.0)
        self.seed_bits = self.family.seed_bits

    def table_batch(self, seeds) -> np.ndarray:
        return self.family.table_batch(seeds)

    def spot_check(self, v: np.ndarray, rng: np.random.Generator,
                   trials: int = 2000) -> float:
        """Fraction of sampled hash seeds with fewer than ell heavy
        buckets, for a vector with squared norm >= B."""
        v = np.asarray(v, dtype=float)
        if float(np.sum(v * v)) < self.B:
            raise ValueError("vector too light for the spreading property")
        seeds = rng.integers(0, 1 << min(self.seed_bits, 62), size=trials,
                             dtype=np.int64)
        tables = np.asarray(self.table_batch(seeds), dtype=np.int64)
        thresh = self.B / (2 * self.T)
        bad = 0
        v2 = v * v
        for h in tables:
            mass = np.bincount(h, weights=v2, minlength=self.T)
            if int(np.sum(mass >= thresh)) < self.ell:
                bad += 1
        return bad / trials

    def config(self) -> dict:
        return {"n": self.n, "delta": self.delta, "T": self.T, "B": self.B,
                "ell": self.ell, "k": self.k, "seed_bits": self.seed_bits}


@register_plan("glarge")
class GLargePlan(Generator):
    """Amplified generator: spreading hash plus per-bucket G1 outputs,
    bucket seeds recycled."""

    def __init__(self, m: int, n: int, delta: float, p: int = 8,
                 recycle: str = "inw", c_T: float = 0.125,
                 delta_map: float = 1e-3):
        self.m = m
        self.n = n
        self.delta = delta
        self.p = p
        self.recycle = recycle
        self.c_T = c_T
        self.delta_map = delta_map
        self.spreading = SpreadingFamily(n, delta, c_T)
        self.g1 = G1Plan(m, n, p, recycle, delta_map)
        self.recycler = SeedRecycler(self.spreading.T * self.g1.seed_bits,
                                     recycle)
        self.seed_bits = self.spreading.seed_bits + self.recycler.seed_bits

    def generate_batch(self, seeds) -> np.ndarray:
        seeds = np.asarray(seeds)
        N = len(seeds)
        hseed = (seeds >> self.recycler.seed_bits) \
            & ((1 << self.spreading.seed_bits) - 1)
        if self.spreading.seed_bits <= 62:
            hseed = hseed.astype(np.int64)
        rec_seed = seeds & ((1 << self.recycler.seed_bits) - 1)
        tables = self.spreading.table_batch(hseed)  # (N, n)
        stream = self.recycler.bitstream_batch(rec_seed)
        g1_bits = self.g1.seed_bits
        total = self.recycler.total_bits
        out = np.zeros((N, self.n), dtype=np.int64)
        for j in range(self.spreading.T):
            mask = tables == j
            if not mask.any():
                continue
            shift = total - (j + 1) * g1_bits
            bucket_seeds = np.empty(N, dtype=object)
            bucket_seeds[:] = [(int(s) >> shift) & ((1 << g1_bits) - 1)
                               for s in stream]
            vals = self.g1.generate_batch(bucket_seeds)
            out[mask] = vals[mask]
        return out

    def plan(self) -> dict:
        return {"type": "glarge", "m": self.m, "n": self.n,
                "delta": self.delta, "p": self.p, "recycle": self.recycle,
                "c_T": self.c_T, "delta_map": self.delta_map,
                "spreading": self.spreading.config(),
                "recycler": self.recycler.config(),
                "local_seed_bits": self.seed_bits,
                "seed_bits": self.seed_bits}

    @classmethod
    def from_plan(cls, d):
        return cls(d["m"], d["n"], d["delta"], d["p"], d["recycle"],
                   d["c_T"], d["delta_map"])


def glarge_generate(plan: GLargePlan, seed: int) -> np.ndarray:
    check_seed(seed, plan.seed_bits)
    return plan.generate_batch(np.asarray([seed], dtype=object))[0]
