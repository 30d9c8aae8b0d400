"""Primitive families against exhaustive enumeration oracles."""

import itertools
import math

import numpy as np
import pytest

from fourierprg.families import (CombinedHashFamily, KWiseFamily,
                                 KWiseVectors, PairwisePermutation,
                                 SmallBiasFamily, hash_load, hash_sample,
                                 kwise_sample, perm_sample, perm_seed_bits,
                                 small_bias_sample)
from fourierprg.fields import gf2


def all_seeds(nbits: int) -> np.ndarray:
    return np.arange(1 << nbits, dtype=np.int64)


# ---------------------------------------------------------------------------
# k-wise families


def test_kwise_degree_zero_constant():
    fam = KWiseFamily(gf2(3), 5, 1)
    for c in range(8):
        assert np.all(fam.sample(c) == c)


def test_kwise_zero_seed_zero_vector():
    fam = KWiseFamily(gf2(4), 8, 3)
    assert np.all(fam.sample(0) == 0)


def test_kwise_insufficient_points():
    with pytest.raises(ValueError):
        KWiseFamily(gf2(2), 5, 2)


def marginal_counts(samples: np.ndarray, coords, q: int) -> np.ndarray:
    """Joint histogram of the selected coordinates over all rows."""
    code = np.zeros(len(samples), dtype=np.int64)
    for c in coords:
        code = code * q + samples[:, c]
    return np.bincount(code, minlength=q ** len(coords))


@pytest.mark.parametrize("q,n,k", [(8, 8, 2), (8, 8, 3), (16, 16, 2)])
def test_kwise_exact_marginals(q, n, k):
    fam = KWiseFamily(gf2(q.bit_length() - 1), n, k)
    samples = fam.sample_batch(all_seeds(fam.seed_bits))
    expected = (1 << fam.seed_bits) // q ** k
    for coords in itertools.combinations(range(n), k):
        counts = marginal_counts(samples, coords, q)
        assert np.all(counts == expected)


def test_kwise_eval_points_batch_matches_sample():
    rng = np.random.default_rng(7)
    for fam in (KWiseFamily(gf2(3), 8, 3), KWiseFamily(gf2(40), 4, 2)):
        seeds = rng.integers(0, 1 << min(fam.seed_bits, 30), 25)
        points = rng.integers(0, fam.n, 25)
        out = fam.eval_points_batch(seeds, points)
        full = fam.sample_batch(seeds)
        for i in range(25):
            assert out[i] == full[i, points[i]]


def test_kwise_sample_wrapper_deterministic():
    fam = KWiseFamily(gf2(3), 4, 2)
    assert np.array_equal(kwise_sample(fam, 37), kwise_sample(fam, 37))


def test_kwise_vectors_nonpow2_deviation_budget():
    fam = KWiseVectors(6, 3, 2, delta_map=0.01)
    assert fam.delta_map_actual <= 0.01
    samples = fam.sample_batch(all_seeds(min(fam.seed_bits, 24)))
    freqs = np.bincount(samples[:, 0], minlength=3) / len(samples)
    assert np.abs(freqs - 1 / 3).max() <= fam.delta_map_actual


def test_kwise_big_field_scalar_path_matches_eval_at():
    fam = KWiseFamily(gf2(40), 4, 2)
    seeds = np.array([123456789012345678901, 1, (1 << 80) - 1], dtype=object)
    out = fam.sample_batch(seeds)
    for i, s in enumerate(seeds):
        for x in range(4):
            assert out[i, x] == fam.eval_at(int(s), x)


# ---------------------------------------------------------------------------
# small-bias family


def parity_biases(fam: SmallBiasFamily) -> np.ndarray:
    """|E[(-1)^<S,x>]| for every parity S, by Walsh-Hadamard transform."""
    packed = fam.sample_packed(all_seeds(fam.seed_bits))
    counts = np.bincount(packed, minlength=1 << fam.n).astype(float)
    counts /= counts.sum()
    h = counts.copy()
    step = 1
    while step < len(h):
        for lo in range(0, len(h), 2 * step):
            a = h[lo:lo + step].copy()
            b = h[lo + step:lo + 2 * step].copy()
            h[lo:lo + step] = a + b
            h[lo + step:lo + 2 * step] = a - b
        step *= 2
    return np.abs(h)


def test_small_bias_single_bit_unbiased():
    fam = SmallBiasFamily(1, 0.5)
    bits = fam.sample_batch(all_seeds(fam.seed_bits))[:, 0]
    assert bits.mean() == 0.5


def test_small_bias_n16_bound():
    fam = SmallBiasFamily(16, 1 / 8)
    biases = parity_biases(fam)
    assert biases[1:].max() <= fam.bias_bound + 1e-12 <= 1 / 8 + 1e-12


def test_small_bias_deterministic():
    fam = SmallBiasFamily(10, 0.25)
    assert np.array_equal(small_bias_sample(fam, 999),
                          small_bias_sample(fam, 999))


# ---------------------------------------------------------------------------
# combined hash family


def test_hash_t1_constant_zero():
    fam = CombinedHashFamily(5, 1, 2, 0.0)
    assert np.all(fam.table(7) == 0)


def test_hash_k1_uniform_marginals():
    fam = CombinedHashFamily(4, 4, 1, 0.0)
    tables = fam.table_batch(all_seeds(fam.seed_bits))
    for i in range(4):
        counts = np.bincount(tables[:, i], minlength=4)
        assert np.all(counts == len(tables) // 4)


def test_hash_exact_pair_marginals():
    fam = CombinedHashFamily(8, 4, 2, 0.0)
    tables = fam.table_batch(all_seeds(fam.seed_bits))
    for i, j in itertools.combinations(range(8), 2):
        counts = marginal_counts(tables, (i, j), 4)
        assert np.all(counts == len(tables) // 16)


def test_hash_biased_mode_within_delta():
    fam = CombinedHashFamily(4, 4, 2, 0.25)
    tables = fam.table_batch(all_seeds(fam.seed_bits))
    for i in range(4):
        freqs = np.bincount(tables[:, i], minlength=4) / len(tables)
        assert np.abs(freqs - 0.25).max() <= 0.25


def test_hash_eval_matches_table():
    fam = CombinedHashFamily(6, 4, 2, 0.0)
    table = hash_sample(fam, 45)
    for i in range(6):
        assert fam.eval(45, i) == table[i]


# ---------------------------------------------------------------------------
# pairwise permutations


def test_perm_identity():
    p = PairwisePermutation(3, 1, 0)
    assert np.array_equal(p.table(), np.arange(8))


@pytest.mark.parametrize("t", [2, 4, 6])
def test_perm_bijectivity_all_seeds(t):
    for seed in range(1 << perm_seed_bits(t)):
        p = perm_sample(t, seed)
        assert np.array_equal(np.sort(p.table()), np.arange(1 << t))


def test_perm_pair_uniform_over_family():
    # enumerate the family (a != 0, b) directly: every ordered pair of
    # distinct points appears exactly once as (pi(0), pi(1))
    t = 4
    pairs = set()
    for a in range(1, 16):
        for b in range(16):
            p = PairwisePermutation(t, a, b)
            pairs.add((p.apply(0), p.apply(1)))
    assert len(pairs) == 240


def test_perm_pairwise_independence_exhaustive():
    # (pi(x), pi(y)) uniform over ordered distinct pairs for fixed x != y
    t = 3
    counts = {}
    for a in range(1, 8):
        for b in range(8):
            p = PairwisePermutation(t, a, b)
            key = (p.apply(2), p.apply(5))
            counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 56
    assert set(counts.values()) == {1}


# ---------------------------------------------------------------------------
# hash load and the moment / load-balancing properties


def test_hash_load_zero_vector():
    assert hash_load(np.zeros(5), np.zeros(5, dtype=int), 3) == 0.0


def test_hash_load_single_bucket():
    v = np.array([1.0, 2.0, 0.5])
    assert hash_load(v, np.zeros(3, dtype=int), 1) == \
        pytest.approx(float(np.sum(v * v)) ** 2)


def test_hash_load_matches_two_pass():
    rng = np.random.default_rng(3)
    v = rng.random(6)
    h = rng.integers(0, 4, 6)
    expected = 0.0
    for j in range(4):
        mass = sum(v[i] ** 2 for i in range(6) if h[i] == j)
        expected += mass ** 2
    assert hash_load(v, h, 4) == pytest.approx(expected, abs=1e-12)


def test_hash_moment_bound():
    # E[load(v, h)^p] at p = 2 over full seed enumeration, against the
    # safety-factor bound 64*((||v||_2^4 / t)^p + ||v||_4^{4p})
    n, t, p = 12, 4, 2
    fam = CombinedHashFamily(n, t, 2 * p, 0.0)
    rng = np.random.default_rng(11)
    v = rng.random(n)
    tables = fam.table_batch(all_seeds(fam.seed_bits))
    v2 = v * v
    loads = np.zeros(len(tables))
    for j in range(t):
        mass = ((tables == j) * v2).sum(axis=1)
        loads += mass * mass
    moment = float((loads ** p).mean())
    l2 = float(np.sum(v2))
    l4 = float(np.sum(v2 * v2))
    bound = 64.0 * ((l2 ** 2 / t) ** p + l4 ** p)
    assert moment <= bound


def test_load_balancing_tail():
    # Pr[| ||v restricted to bucket 0||_1 - ||v||_1/t | >= t0] against
    # (C_p ||v||_2 / t0)^p with C_p = 4 sqrt(p)
    n, t, p = 12, 4, 4
    fam = CombinedHashFamily(n, t, p, 0.0)
    rng = np.random.default_rng(5)
    v = rng.random(n)
    tables = fam.table_batch(all_seeds(fam.seed_bits))
    mass = ((tables == 0) * v).sum(axis=1)
    l1 = float(np.abs(v).sum())
    l2 = math.sqrt(float(np.sum(v * v)))
    for t0 in (1.0, 2.0, 3.0):
        tail = float(np.mean(np.abs(mass - l1 / t) >= t0))
        assert tail <= (4 * math.sqrt(p) * l2 / t0) ** p
