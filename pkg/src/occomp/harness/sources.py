"""Seeded synthetic symbol sources."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np


class MarkovSource:
    """Order-``k`` Markov chain with Dirichlet-drawn transition rows.

    Small ``concentration`` gives peaked, predictable transitions. With
    ``unigram_weight > 0`` every row is mixed with one shared Zipf-shaped
    unigram law, as in text where frequent tokens are likely in any context.
    The transition law depends only on ``model_seed``; sample paths take
    their own generator.
    """

    def __init__(self, size: int, order: int = 2, concentration: float = 0.1, model_seed: int = 0,
                 unigram_weight: float = 0.0, zipf_exponent: float = 1.1):
        if order < 0:
            raise ValueError("order must be non-negative")
        if not 0 <= unigram_weight <= 1:
            raise ValueError("unigram_weight must lie in [0, 1]")
        self.size = size
        self.order = order
        self.concentration = concentration
        self.model_seed = model_seed
        self.unigram_weight = unigram_weight
        rng = np.random.default_rng(model_seed)
        rows = rng.dirichlet(np.full(size, concentration), size=size ** order)
        if unigram_weight > 0:
            zipf = 1.0 / np.arange(1, size + 1) ** zipf_exponent
            unigram = rng.permutation(zipf / zipf.sum())
            rows = (1 - unigram_weight) * rows + unigram_weight * unigram
        self.transitions = rows
        self._cum = np.cumsum(rows, axis=1)
        self._cum[:, -1] = 1.0
        self._cum_list = None

    def sample(self, n: int, rng) -> np.ndarray:
        k, m = self.order, self.size
        u = rng.random(n).tolist()
        start = rng.integers(0, m, size=k)
        modulus = m ** k if k else 1
        ctx = 0
        for s in start.tolist():
            ctx = (ctx * m + s) % modulus
        cum = self._cum_rows
        out = [0] * n
        last = m - 1
        for i in range(n):
            s = bisect_right(cum[ctx], u[i])
            if s > last:
                s = last
            out[i] = s
            ctx = (ctx * m + s) % modulus
        return np.asarray(out, dtype=np.int64)

    @property
    def _cum_rows(self) -> list:
        if self._cum_list is None:
            self._cum_list = self._cum.tolist()
        return self._cum_list


@dataclass
class SourceSample:
    symbols: np.ndarray
    boundaries: list = field(default_factory=list)  # start index of every segment after the first


def nonstationary_source(sources, lengths, seed: int = 0) -> SourceSample:
    """Concatenate samples from several sources, recording the segment boundaries."""
    if len(sources) != len(lengths):
        raise ValueError("need one length per source")
    rng = np.random.default_rng(seed)
    parts, boundaries, pos = [], [], 0
    for i, (src, n) in enumerate(zip(sources, lengths)):
        if i:
            boundaries.append(pos)
        parts.append(src.sample(int(n), rng))
        pos += int(n)
    symbols = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    return SourceSample(symbols, boundaries)


def adversarial_script(size: int, T: int, seed: int = 0, alpha: float = 0.05,
                       concentration: float = 0.05, mix: float = 0.5):
    """Spiky predictor script plus a source that often picks the least likely symbol.

    Returns ``(dists, symbols)``. Every distribution is smoothed with weight
    ``alpha`` so its entries stay positive; with probability ``mix`` the
    source emits the argmin of the current distribution, otherwise a draw
    from it.
    """
    rng = np.random.default_rng(seed)
    raw = rng.dirichlet(np.full(size, concentration), size=T)
    dists = (1.0 - alpha) * raw + alpha / size
    dists /= dists.sum(axis=1, keepdims=True)
    symbols = np.empty(T, dtype=np.int64)
    for t in range(T):
        if rng.random() < mix:
            symbols[t] = int(np.argmin(dists[t]))
        else:
            symbols[t] = min(int(np.searchsorted(np.cumsum(dists[t]), rng.random(), side="right")), size - 1)
    return dists, symbols
