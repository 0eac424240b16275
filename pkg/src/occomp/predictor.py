"""Sequence predictors mapping a reconstructed history to a next-symbol distribution.

All predictors expose ``predict(history)`` and ``update(history, observed)``;
``history`` is the reconstructed prefix shared by encoder and decoder.
Smoothed predictors mix their estimate with the uniform distribution, which
floors every probability at ``alpha / size`` and gives a finite worst-case
code length ``L = log2(size / alpha)``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core import validate_distribution

DEFAULT_ALPHA = 0.05


class Predictor:
    size: int

    def predict(self, history) -> np.ndarray:
        raise NotImplementedError

    def update(self, history, observed: int) -> None:
        """Online adaptation hook; a no-op unless the predictor learns."""

    def min_probability(self) -> float | None:
        """Guaranteed floor on every predicted probability, if one exists."""
        return None


class UniformPredictor(Predictor):
    def __init__(self, size: int):
        self.size = size
        self._p = np.full(size, 1.0 / size)
        self._p.setflags(write=False)

    def predict(self, history) -> np.ndarray:
        return self._p

    def min_probability(self) -> float:
        return 1.0 / self.size


class MarkovPredictor(Predictor):
    """Order-``k`` count model smoothed towards uniform.

    Unseen (or too short) contexts fall back to the order-0 marginal, and to
    uniform if no symbol has been counted yet. The result is
    ``(1 - alpha) * empirical + alpha / size``.
    """

    def __init__(self, size: int, order: int = 2, alpha: float = DEFAULT_ALPHA):
        if not 0 < alpha <= 1:
            raise ValueError("smoothing alpha must lie in (0, 1]")
        if order < 0:
            raise ValueError("Markov order must be non-negative")
        self.size = size
        self.order = order
        self.alpha = alpha
        self.counts: dict[tuple, np.ndarray] = {}
        self.marginal = np.zeros(size)
        self._cache: dict[tuple, np.ndarray] = {}

    @classmethod
    def from_counts(cls, counts, alpha: float = DEFAULT_ALPHA) -> "MarkovPredictor":
        """Order-0 predictor with the given symbol counts."""
        counts = np.asarray(counts, dtype=np.float64)
        model = cls(counts.shape[0], order=0, alpha=alpha)
        model.marginal = counts.copy()
        model.counts[()] = counts.copy()
        return model

    def fit(self, sequence) -> "MarkovPredictor":
        seq = [int(s) for s in sequence]
        k = self.order
        for i, s in enumerate(seq):
            self.marginal[s] += 1
            if i >= k:
                ctx = tuple(seq[i - k:i])
                row = self.counts.get(ctx)
                if row is None:
                    row = self.counts[ctx] = np.zeros(self.size)
                row[s] += 1
        self._cache.clear()
        return self

    def _context(self, history) -> tuple | None:
        k = self.order
        if k == 0:
            return ()
        if len(history) < k:
            return None
        return tuple(history[-k:])

    def predict(self, history) -> np.ndarray:
        ctx = self._context(history)
        cached = self._cache.get(ctx)
        if cached is not None:
            return cached
        row = self.counts.get(ctx) if ctx is not None else None
        if row is None or row.sum() == 0:
            row = self.marginal
        total = row.sum()
        if total > 0:
            p = (1.0 - self.alpha) * (row / total) + self.alpha / self.size
        else:
            p = np.full(self.size, 1.0 / self.size)
        p.setflags(write=False)
        self._cache[ctx] = p
        return p

    def update(self, history, observed: int) -> None:
        ctx = self._context(history)
        if ctx is not None:
            row = self.counts.get(ctx)
            if row is None:
                row = self.counts[ctx] = np.zeros(self.size)
            row[observed] += 1
        self.marginal[observed] += 1
        # the marginal feeds every unseen context, so the whole cache is stale
        self._cache.clear()

    def min_probability(self) -> float:
        return self.alpha / self.size

    def table(self, ctx: tuple) -> np.ndarray:
        return self.counts.get(tuple(ctx), np.zeros(self.size)).copy()


class ScriptedPredictor(Predictor):
    """Replays a fixed sequence of distributions, one per time step.

    The step index is the history length, so the script is independent of
    what was reconstructed; useful for adversarial predictor sequences.
    """

    def __init__(self, dists, floor: float | None = None):
        arr = np.asarray(dists, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("scripted predictor needs a (T, size) array")
        for row in arr:
            validate_distribution(row)
        if floor is not None and np.any(arr < floor * (1 - 1e-12)):
            raise ValueError("scripted distributions fall below the declared floor")
        self.size = arr.shape[1]
        self.dists = arr
        self.dists.setflags(write=False)
        self.floor = floor

    def predict(self, history) -> np.ndarray:
        t = len(history)
        if t >= len(self.dists):
            raise IndexError(f"script holds {len(self.dists)} steps, asked for step {t + 1}")
        return self.dists[t]

    def min_probability(self) -> float | None:
        return self.floor

    @classmethod
    def from_jsonl(cls, path, floor: float | None = None) -> "ScriptedPredictor":
        rows = [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]
        return cls(rows, floor=floor)


def predict(predictor: Predictor, history) -> np.ndarray:
    return predictor.predict(history)


def online_update(predictor: Predictor, history, observed: int) -> Predictor:
    predictor.update(history, observed)
    return predictor


def assumption_bound_L(predictor: Predictor) -> float:
    """Bits ``L`` with ``-log2 p(x) <= L`` for every prediction; ``inf`` if unbounded."""
    floor = predictor.min_probability()
    if floor is None or floor <= 0:
        return math.inf
    return -math.log2(floor)


def smoothed(dists, alpha: float) -> np.ndarray:
    """Mix each row of ``dists`` with the uniform distribution."""
    arr = np.asarray(dists, dtype=np.float64)
    return (1.0 - alpha) * arr + alpha / arr.shape[-1]


def load_symbols(path) -> np.ndarray:
    """Training corpus: JSON array of indices, or raw little-endian uint16."""
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix == ".json" or raw.lstrip()[:1] == b"[":
        return np.asarray(json.loads(raw), dtype=np.int64)
    return np.frombuffer(raw, dtype="<u2").astype(np.int64)
