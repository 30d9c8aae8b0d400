"""Seed handling.

Seeds are conceptually bit strings. Internally they are held as
non-negative ints together with an explicit length; bit 0 is the MSB of
byte 0 of the serialized form (big-endian bit order), so the int value of
a seed of length r is simply the r-bit big-endian reading of its bytes.
"""

from __future__ import annotations


def bit_slice(seed: int, nbits: int, start: int, stop: int) -> int:
    """Bits [start, stop) of an nbits-long seed, as an int."""
    if not (0 <= start <= stop <= nbits):
        raise ValueError(f"slice [{start},{stop}) out of range for {nbits} bits")
    return (seed >> (nbits - stop)) & ((1 << (stop - start)) - 1)


def seed_to_bytes(seed: int, nbits: int) -> bytes:
    nbytes = (nbits + 7) // 8
    # pad on the right: bit 0 is the MSB of byte 0
    return (seed << (nbytes * 8 - nbits)).to_bytes(nbytes, "big")


def seed_from_bytes(data: bytes, nbits: int) -> int:
    nbytes = (nbits + 7) // 8
    if len(data) != nbytes:
        raise ValueError(f"expected {nbytes} bytes for {nbits} bits, got {len(data)}")
    return int.from_bytes(data, "big") >> (nbytes * 8 - nbits)


def seed_to_hex(seed: int, nbits: int) -> str:
    return seed_to_bytes(seed, nbits).hex()


def seed_from_hex(text: str, nbits: int) -> int:
    return seed_from_bytes(bytes.fromhex(text), nbits)


def check_seed(seed: int, nbits: int) -> None:
    if seed < 0 or seed >> nbits:
        raise ValueError(f"seed does not fit in {nbits} bits")
