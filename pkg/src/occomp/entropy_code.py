"""Zero-delay prefix-free Shannon code matched to a single distribution.

Codeword lengths are ``ceil(-log2 p)``; codewords are assigned canonically
after sorting symbols by (descending probability, ascending index), so an
encoder and a decoder holding the same distribution rebuild the same code
without exchanging it. A one-symbol support gets the empty codeword.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np


class CorruptStreamError(ValueError):
    pass


@dataclass(frozen=True)
class Message:
    bits: str = ""

    @property
    def length(self) -> int:
        return len(self.bits)


def shannon_lengths(p: np.ndarray) -> np.ndarray:
    """Smallest integer ``L >= 0`` with ``2**-L <= p`` (exact in floating point)."""
    lengths = np.ceil(-np.log2(p)).astype(np.int64)
    np.maximum(lengths, 0, out=lengths)
    # correct the rare off-by-one left by log2 rounding
    too_long = np.ldexp(1.0, -lengths) > p
    while np.any(too_long):
        lengths[too_long] += 1
        too_long = np.ldexp(1.0, -lengths) > p
    shorter = (lengths > 0) & (np.ldexp(1.0, -(lengths - 1)) <= p)
    while np.any(shorter):
        lengths[shorter] -= 1
        shorter = (lengths > 0) & (np.ldexp(1.0, -(lengths - 1)) <= p)
    return lengths


def _canonical_blocks(lens: np.ndarray):
    """Canonical code as (length, first code, first position, count) blocks, or None if Kraft fails."""
    blocks = []
    code = 0
    prev = None
    start = 0
    for i, length in enumerate(lens.tolist()):
        if length != prev:
            if prev is not None:
                blocks.append((prev, code, start, i - start))
                code = (code + i - start) << (length - prev)
            start, prev = i, length
    blocks.append((prev, code, start, lens.size - start))
    for length, first, _, count in blocks:
        if first + count > (1 << length):
            return None
    return blocks


class Codebook:
    """Canonical Shannon code over the indices of ``probs`` with ``p > 0``."""

    def __init__(self, probs):
        p = np.asarray(probs, dtype=np.float64)
        support = np.flatnonzero(p > 0)
        if support.size == 0:
            raise ValueError("cannot build a code for an all-zero distribution")
        self.size = p.shape[0]
        # descending probability, ties by ascending index (stable sort)
        order = support[np.argsort(-p[support], kind="stable")]
        if order.size == 1:
            lens = np.zeros(1, dtype=np.int64)
            blocks = _canonical_blocks(lens)
        else:
            lens = shannon_lengths(p[order])
            blocks = _canonical_blocks(lens)
            if blocks is None:
                # only inputs whose float sum exceeds 1 get here (e.g. 1.0 next to 1e-170);
                # shrink them just below unit mass and take the Shannon lengths of that
                shrunk = p[order] * ((1.0 - 2.0 ** -30) / p[order].sum())
                lens = shannon_lengths(shrunk)
                blocks = _canonical_blocks(lens)
            if blocks is None:
                raise ValueError("codeword lengths violate the Kraft inequality")
        self._order = order
        self._sorted_lengths = lens
        self._blocks = blocks
        pos = np.full(self.size, -1, dtype=np.int64)
        pos[order] = np.arange(order.size)
        self._pos = pos

    @property
    def support(self) -> frozenset:
        return frozenset(self._order.tolist())

    @property
    def max_length(self) -> int:
        return int(self._sorted_lengths[-1])

    def length(self, symbol: int) -> int:
        i = self._position(symbol)
        return int(self._sorted_lengths[i])

    @cached_property
    def lengths(self) -> dict:
        return {int(s): int(n) for s, n in zip(self._order, self._sorted_lengths)}

    @cached_property
    def codewords(self) -> dict:
        return {s: self.codeword(s) for s in self._order.tolist()}

    def kraft_sum(self) -> float:
        return float(np.sum(np.ldexp(1.0, -self._sorted_lengths)))

    def _position(self, symbol: int) -> int:
        if not 0 <= symbol < self.size or self._pos[symbol] < 0:
            raise KeyError(f"symbol {symbol} is outside the code support")
        return int(self._pos[symbol])

    def codeword(self, symbol: int) -> str:
        i = self._position(symbol)
        for length, first, start, count in self._blocks:
            if start <= i < start + count:
                return format(first + i - start, f"0{length}b") if length else ""
        raise AssertionError("unreachable")

    def decode_prefix(self, bits: str) -> tuple[int, int]:
        for length, first, start, count in self._blocks:
            if length > len(bits):
                break
            value = int(bits[:length], 2) if length else 0
            if first <= value < first + count:
                return int(self._order[start + value - first]), length
        raise CorruptStreamError("no codeword is a prefix of the received bits")


@lru_cache(maxsize=8192)
def _cached_codebook(key: bytes) -> Codebook:
    return Codebook(np.frombuffer(key, dtype=np.float64))


def build_codebook(probs) -> Codebook:
    """Codebook for ``probs``; identical inputs share one immutable instance."""
    p = np.ascontiguousarray(probs, dtype=np.float64)
    return _cached_codebook(p.tobytes())


def encode(book: Codebook, symbol: int) -> Message:
    return Message(book.codeword(int(symbol)))


def decode(book: Codebook, bits) -> tuple[int, int]:
    """Return ``(symbol, bits consumed)`` for the codeword at the head of ``bits``."""
    if isinstance(bits, Message):
        bits = bits.bits
    return book.decode_prefix(bits)


def ideal_code_length(probs, symbol: int) -> float:
    return float(-np.log2(probs[symbol]))


def bits_to_bytes(bits: str) -> bytes:
    """Pack a bit string MSB-first, zero-padding the last byte."""
    if not bits:
        return b""
    padded = bits + "0" * (-len(bits) % 8)
    return int(padded, 2).to_bytes(len(padded) // 8, "big")
