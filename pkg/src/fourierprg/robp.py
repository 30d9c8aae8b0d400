"""Read-once branching programs with complex terminal labels, and the
INW-style seed-recycling generator used wherever a PRG for space-bounded
computation is needed."""

from __future__ import annotations

import cmath
import math

import numpy as np

from .bitseq import check_seed
from .core import Generator, register_plan
from .fields import gf2


class ROBP:
    """Layered program: width states per layer, T steps of D bits each.
    transitions[t][state][block] is the state entered in layer t+1;
    labels are unit-disk complex values on the final layer."""

    def __init__(self, width: int, D: int, T: int, transitions, labels,
                 start: int = 0):
        transitions = np.asarray(transitions, dtype=np.int64)
        labels = np.asarray(labels, dtype=complex)
        if transitions.shape != (T, width, 1 << D):
            raise ValueError("transition table has wrong shape")
        if np.any(transitions < 0) or np.any(transitions >= width):
            raise ValueError("transition out of range")
        if labels.shape != (width,):
            raise ValueError("labels must cover the final layer")
        if np.any(np.abs(labels) > 1 + 1e-12):
            raise ValueError("labels must lie in the unit disk")
        if not 0 <= start < width:
            raise ValueError("bad start state")
        self.width = width
        self.D = D
        self.T = T
        self.transitions = transitions
        self.labels = labels
        self.start = start

    def eval(self, blocks) -> complex:
        return complex(self.eval_batch(np.asarray([blocks]))[0])

    def eval_batch(self, blocks: np.ndarray) -> np.ndarray:
        blocks = np.asarray(blocks, dtype=np.int64)
        if blocks.ndim != 2 or blocks.shape[1] != self.T:
            raise ValueError(f"need {self.T} blocks per input")
        if np.any(blocks < 0) or np.any(blocks >= 1 << self.D):
            raise ValueError("block value out of range")
        state = np.full(len(blocks), self.start, dtype=np.int64)
        for t in range(self.T):
            state = self.transitions[t, state, blocks[:, t]]
        return self.labels[state]

    def eval_bits(self, bits: int) -> complex:
        """Input given as a (D*T)-bit integer, block 0 most significant."""
        blocks = [(bits >> (self.D * (self.T - 1 - t))) & ((1 << self.D) - 1)
                  for t in range(self.T)]
        return self.eval(blocks)

    def to_dict(self) -> dict:
        return {
            "width": self.width, "D": self.D, "T": self.T,
            "start": self.start,
            "transitions": self.transitions.tolist(),
            "labels": [[z.real, z.imag] for z in self.labels],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ROBP":
        labels = np.array([complex(re, im) for re, im in d["labels"]])
        return cls(d["width"], d["D"], d["T"], d["transitions"], labels,
                   d["start"])


def robp_eval(p: ROBP, blocks) -> complex:
    return p.eval(blocks)


def parity_robp(nbits: int) -> ROBP:
    """Reads nbits 1-bit blocks; label (-1)^parity."""
    trans = np.zeros((nbits, 2, 2), dtype=np.int64)
    trans[:, 0] = [0, 1]
    trans[:, 1] = [1, 0]
    return ROBP(2, 1, nbits, trans, np.array([1.0, -1.0]))


@register_plan("inw")
class INWGenerator(Generator):
    """Recycling generator: T blocks of D bits from a seed of
    state_bits + levels * 2*state_bits bits.

    The seed is (x, hL, ..., h1) where each hi encodes an affine map
    y -> a*y + b over GF(2^state_bits) (a pairwise independent hash).
    Level i+1 emits (expand(x), expand(hi(x))); each block is the D
    most significant bits of its state.
    """

    def __init__(self, D: int, T: int, state_bits: int):
        if T < 1 or T & (T - 1):
            raise ValueError("T must be a power of two")
        if state_bits < D:
            raise ValueError("state must hold at least one block")
        self.D = D
        self.T = T
        self.levels = T.bit_length() - 1
        self.state_bits = state_bits
        self.field = gf2(state_bits)
        self.seed_bits = state_bits + self.levels * 2 * state_bits
        # generator view: alphabet [2^D], dimension T
        self.m = 1 << D
        self.n = T

    def expand_batch(self, seeds) -> np.ndarray:
        """(len(seeds), T) blocks of D bits."""
        seeds = np.asarray(seeds)
        w = self.state_bits
        mask = (1 << w) - 1
        # split off x then the per-level hash coefficients, MSB first
        shift = self.seed_bits - w
        x = ((seeds >> shift) & mask).astype(np.int64)
        hashes = []
        for _ in range(self.levels):
            shift -= w
            a = ((seeds >> shift) & mask).astype(np.int64)
            shift -= w
            b = ((seeds >> shift) & mask).astype(np.int64)
            hashes.append((a, b))
        states = x[:, None]
        for a, b in hashes:
            mapped = self.field.mul_vec(a[:, None], states) ^ b[:, None]
            merged = np.empty((states.shape[0], 2 * states.shape[1]),
                              dtype=np.int64)
            merged[:, 0::2] = states
            merged[:, 1::2] = mapped
            states = merged
        return states >> (w - self.D)

    generate_batch = expand_batch

    def expand(self, seed: int) -> np.ndarray:
        check_seed(seed, self.seed_bits)
        return self.expand_batch(np.asarray([seed], dtype=object))[0]

    def plan(self) -> dict:
        return {"type": "inw", "D": self.D, "T": self.T,
                "state_bits": self.state_bits,
                "local_seed_bits": self.seed_bits,
                "seed_bits": self.seed_bits}

    @classmethod
    def from_plan(cls, d):
        return cls(d["D"], d["T"], d["state_bits"])


def inw_expand(g: INWGenerator, seed: int) -> np.ndarray:
    return g.expand(seed)


def inw_for_robp(S: int, D: int, T: int, delta: float,
                 state_extra: int = -2) -> INWGenerator:
    """INW instance sized for (S, D, T)-ROBPs.

    The state carries the block plus max(1, S + state_extra) recycled
    bits, a desk-scale substitution for the asymptotic parameterization.
    state_extra is a calibrated knob (default -2, validated by the
    width-16 ROBP fooling campaign at delta = 0.1); delta itself enters
    only through that empirical validation, not a formula.
    """
    Tp = 1 << max(0, (T - 1).bit_length())
    w = D + max(1, S + state_extra)
    return INWGenerator(D, Tp, w)


def shape_to_robp(f, precision_bits: int) -> ROBP:
    """Width grows with the number of reachable accumulator states.

    States are pairs (quantized phase in turns, quantized -log magnitude),
    both in units of 2^-precision_bits, built layer by layer over the
    reachable set only. A dedicated absorbing state handles zero-magnitude
    table entries.
    """
    m, n = f.m, f.n
    D = (m - 1).bit_length()
    if m != 1 << D:
        raise ValueError("alphabet must be a power of two")
    p = precision_bits
    scale = 1 << p
    # cap -log|f| so the magnitude accumulator stays bounded; beyond this
    # the label underflows double precision anyway
    mlog_cap = 64 * scale

    def quantize(z: complex):
        if abs(z) == 0.0:
            return None  # absorbing zero state
        phase = (cmath.phase(z) / (2 * math.pi)) % 1.0
        qp = round(phase * scale) % scale
        qm = min(round(-math.log(abs(min(abs(z), 1.0))) * scale), mlog_cap)
        return qp, qm

    steps = [[quantize(f.table[j][x]) for x in range(m)] for j in range(n)]

    # breadth-first construction over reachable (phase, mlog) pairs
    ZERO = "zero"
    layer = {(0, 0): 0}
    transitions = []
    all_widths = [1]
    for j in range(n):
        nxt: dict = {}
        table = []
        # index map for this layer in insertion order
        for state in layer:
            row = []
            for x in range(m):
                if state == ZERO or steps[j][x] is None:
                    succ = ZERO
                else:
                    qp, qm = steps[j][x]
                    succ = ((state[0] + qp) % scale,
                            min(state[1] + qm, mlog_cap))
                if succ not in nxt:
                    nxt[succ] = len(nxt)
                row.append(nxt[succ])
            table.append(row)
        transitions.append(table)
        layer = nxt
        all_widths.append(len(nxt))

    width = max(all_widths)
    trans = np.zeros((n, width, m), dtype=np.int64)
    for j, table in enumerate(transitions):
        for s, row in enumerate(table):
            trans[j, s, :] = row
    labels = np.zeros(width, dtype=complex)
    for state, idx in layer.items():
        if state == ZERO:
            labels[idx] = 0.0
        else:
            qp, qm = state
            labels[idx] = cmath.exp(2j * math.pi * qp / scale - qm / scale)
    return ROBP(width, D, n, trans, labels)


def default_precision_bits(n: int, delta: float) -> int:
    """Discretization rule: 2*ceil(log2(n/delta)) bits."""
    return 2 * max(1, math.ceil(math.log2(max(n, 2) / delta)))
