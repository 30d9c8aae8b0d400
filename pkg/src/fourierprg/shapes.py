"""Fourier shapes: product tests f(x) = prod_j f_j(x_j) with each f_j
mapping [m] into the complex unit disk, stored as explicit n x m tables."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import Generator, sample_seeds

_DISK_TOL = 1e-12


@dataclass(frozen=True)
class FourierShape:
    table: np.ndarray  # (n, m) complex

    def __post_init__(self):
        t = np.asarray(self.table, dtype=complex)
        if t.ndim != 2 or t.shape[1] < 1:
            raise ValueError("table must be n x m")
        if np.any(np.abs(t) > 1 + _DISK_TOL):
            raise ValueError("table entries must lie in the unit disk")
        object.__setattr__(self, "table", t)

    @property
    def n(self) -> int:
        return self.table.shape[0]

    @property
    def m(self) -> int:
        return self.table.shape[1]

    def to_json(self) -> str:
        return json.dumps({
            "m": self.m, "n": self.n,
            "table": [[[z.real, z.imag] for z in row] for row in self.table],
        })

    @classmethod
    def from_json(cls, text: str) -> "FourierShape":
        d = json.loads(text)
        t = np.array([[complex(re, im) for re, im in row]
                      for row in d["table"]])
        if t.shape != (d["n"], d["m"]):
            raise ValueError("table shape disagrees with declared (n, m)")
        return cls(t)


@dataclass(frozen=True)
class ShapeStats:
    means: np.ndarray        # per-coordinate complex means
    variances: np.ndarray    # per-coordinate real variances
    tvar: float


def shape_stats(f: FourierShape) -> ShapeStats:
    means = f.table.mean(axis=1)
    second = (np.abs(f.table) ** 2).mean(axis=1)
    var = np.maximum(second - np.abs(means) ** 2, 0.0)
    return ShapeStats(means, var, float(var.sum()))


def tvar(f: FourierShape) -> float:
    return shape_stats(f).tvar


def uniform_expectation(f: FourierShape) -> complex:
    return complex(np.prod(f.table.mean(axis=1)))


def eval_shape(f: FourierShape, x) -> complex:
    x = np.asarray(x, dtype=np.int64)
    if x.shape != (f.n,):
        raise ValueError(f"input must have length {f.n}")
    if np.any(x < 0) or np.any(x >= f.m):
        raise ValueError("symbol out of range")
    return complex(np.prod(f.table[np.arange(f.n), x]))


def eval_shape_batch(f: FourierShape, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64)
    vals = f.table[np.arange(f.n)[None, :], xs]
    return np.prod(vals, axis=1)


def linear_shape(w, alpha: float, m: int) -> FourierShape:
    """f_j(x) = exp(2 pi i * alpha * w_j * x)."""
    w = np.asarray(w, dtype=float)
    x = np.arange(m)
    return FourierShape(np.exp(2j * math.pi * alpha * w[:, None] * x[None, :]))


def constant_shape(n: int, m: int, value: complex = 1.0) -> FourierShape:
    return FourierShape(np.full((n, m), value, dtype=complex))


def random_shape(rng: np.random.Generator, n: int, m: int) -> FourierShape:
    """Uniform modulus in [0,1], uniform phase."""
    r = rng.random((n, m))
    phi = rng.random((n, m)) * 2 * math.pi
    return FourierShape(r * np.exp(1j * phi))


def random_phase_shape(rng: np.random.Generator, n: int, m: int) -> FourierShape:
    """Unit-modulus entries: per-coordinate variance close to 1."""
    phi = rng.random((n, m)) * 2 * math.pi
    return FourierShape(np.exp(1j * phi))


def scale_toward_mean(f: FourierShape, s: float) -> FourierShape:
    """f_j <- mu_j + s*(f_j - mu_j); variances scale by s^2 and the table
    stays in the unit disk for 0 <= s <= 1."""
    mu = f.table.mean(axis=1, keepdims=True)
    return FourierShape(mu + s * (f.table - mu))


def values_on_all_patterns(f: FourierShape) -> np.ndarray:
    """f evaluated on every point of [m]^n, indexed by the base-m code
    with coordinate 0 most significant."""
    out = np.ones(1, dtype=complex)
    for j in range(f.n):
        out = np.kron(out, f.table[j])
    return out


@dataclass(frozen=True)
class EnumerateMode:
    pass


@dataclass(frozen=True)
class SampleMode:
    n_samples: int
    rng_seed: int = 0


@dataclass(frozen=True)
class EmpiricalResult:
    estimate: complex
    std_err: float
    seeds_used: int


def empirical_expectation(f: FourierShape, g: Generator, mode,
                          enumerate_cap: int = 26,
                          pattern_cap: int = 1 << 22) -> EmpiricalResult:
    """E[f(G(seed))] under a uniform seed: exact over all 2^r seeds in
    enumerate mode, Monte-Carlo with a standard error in sample mode."""
    if g.m != f.m or g.n != f.n:
        raise ValueError("generator and shape disagree on (m, n)")
    if isinstance(mode, EnumerateMode):
        npat = f.m ** f.n
        if npat <= pattern_cap:
            pmf = g.output_pmf(pattern_cap, enumerate_cap)
            est = complex(pmf @ values_on_all_patterns(f))
            total = 1 << g.seed_bits
            return EmpiricalResult(est, 0.0, total)
        if g.seed_bits > enumerate_cap:
            raise ValueError(
                f"seed length {g.seed_bits} exceeds enumeration cap "
                f"{enumerate_cap}")
        total = 1 << g.seed_bits
        acc = 0j
        chunk = 1 << 16
        for lo in range(0, total, chunk):
            seeds = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
            acc += eval_shape_batch(f, g.generate_batch(seeds)).sum()
        return EmpiricalResult(acc / total, 0.0, total)
    if isinstance(mode, SampleMode):
        rng = np.random.default_rng(mode.rng_seed)
        acc = 0j
        acc2 = 0.0
        done = 0
        while done < mode.n_samples:
            batch = min(1 << 15, mode.n_samples - done)
            seeds = sample_seeds(rng, g.seed_bits, batch)
            vals = eval_shape_batch(f, g.generate_batch(seeds))
            acc += vals.sum()
            acc2 += float(np.sum(np.abs(vals) ** 2))
            done += batch
        mean = acc / done
        var = max(acc2 / done - abs(mean) ** 2, 0.0)
        stderr = math.sqrt(var / done)
        return EmpiricalResult(complex(mean), stderr, done)
    raise TypeError(f"unknown mode {mode!r}")


def fooling_error(f: FourierShape, g: Generator, mode, **kw) -> tuple[float, float]:
    """|empirical - uniform| and the standard error of the estimate."""
    res = empirical_expectation(f, g, mode, **kw)
    return abs(res.estimate - uniform_expectation(f)), res.std_err
