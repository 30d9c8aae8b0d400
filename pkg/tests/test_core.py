"""Generator abstraction: stubs, plan round-trips, seed handling."""

import json

import numpy as np
import pytest

from fourierprg.bitseq import (bit_slice, check_seed, seed_from_hex,
                               seed_to_hex)
from fourierprg.core import (ConstantStub, KWiseGenerator, SmallBiasLift,
                             UniformStub, plan_seed_bits, plan_to_generator,
                             sample_seeds)


def test_bit_slice_msb_first():
    # 0b1011 0100 as an 8-bit seed
    seed = 0b10110100
    assert bit_slice(seed, 8, 0, 4) == 0b1011
    assert bit_slice(seed, 8, 4, 8) == 0b0100
    with pytest.raises(ValueError):
        bit_slice(seed, 8, 4, 9)


def test_seed_hex_roundtrip():
    for nbits in (4, 8, 12, 26, 77):
        seed = (1 << nbits) - 3
        text = seed_to_hex(seed, nbits)
        assert text == text.lower()
        assert seed_from_hex(text, nbits) == seed


def test_check_seed():
    check_seed(15, 4)
    with pytest.raises(ValueError):
        check_seed(16, 4)


def test_uniform_stub_is_base_m_seed():
    g = UniformStub(3, 4)
    out = g.generate(2 * 27 + 1 * 9 + 0 * 3 + 2)
    assert np.array_equal(out, [2, 1, 0, 2])


def test_uniform_stub_pmf_exactly_uniform():
    g = UniformStub(2, 4)
    assert np.allclose(g.output_pmf(), 1 / 16)


def test_constant_stub():
    g = ConstantStub(4, 3, value=2)
    assert np.array_equal(g.generate(0), [2, 2, 2])
    assert g.seed_bits == 0


@pytest.mark.parametrize("g", [
    UniformStub(3, 4),
    ConstantStub(4, 3, 1),
    KWiseGenerator(2, 8, 3),
    SmallBiasLift(8, 0.25),
])
def test_plan_roundtrip(g):
    d = json.loads(json.dumps(g.plan()))
    g2 = plan_to_generator(d)
    assert g2.seed_bits == g.seed_bits
    assert (g2.m, g2.n) == (g.m, g.n)
    seeds = np.arange(min(64, 1 << g.seed_bits), dtype=np.int64)
    assert np.array_equal(g.generate_batch(seeds), g2.generate_batch(seeds))


def test_plan_seed_bits_independent_walk():
    for g in (UniformStub(3, 4), KWiseGenerator(2, 8, 3)):
        assert plan_seed_bits(g.plan()) == g.seed_bits


def test_unknown_plan_type():
    with pytest.raises(ValueError):
        plan_to_generator({"type": "nope"})


def test_output_pmf_refusals():
    g = UniformStub(2, 30)
    g.exactly_uniform = False
    with pytest.raises(ValueError):
        g.output_pmf(pattern_cap=1 << 22)
    g2 = KWiseGenerator(2, 4, 2)
    g2.seed_bits = 40  # simulate an over-cap seed
    with pytest.raises(ValueError):
        g2.output_pmf(seed_cap=26)


def test_sample_seeds_small_and_big():
    rng = np.random.default_rng(0)
    small = sample_seeds(rng, 10, 100)
    assert small.dtype == np.int64
    assert small.min() >= 0 and small.max() < 1 << 10
    big = sample_seeds(rng, 100, 50)
    assert big.dtype == object
    assert all(0 <= s < 1 << 100 for s in big)
    # high bits must actually vary
    assert len({int(s) >> 64 for s in big}) > 1
