"""Alphabets, predictive distributions and per-symbol distortion measures.

Symbols are plain integer indices ``0 .. size-1``; distributions are 1-D
float64 numpy arrays. Nothing here knows about tokenization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

PROB_ATOL = 1e-9


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if int(self.size) < 2:
            raise ValueError(f"alphabet needs at least 2 symbols, got {self.size}")

    def __contains__(self, x) -> bool:
        return 0 <= int(x) < self.size

    def __len__(self) -> int:
        return self.size


def validate_distribution(probs, size: int | None = None) -> np.ndarray:
    """Return ``probs`` as a float64 array after checking it lies on the simplex."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError("distribution must be a 1-D vector")
    if size is not None and p.shape[0] != size:
        raise ValueError(f"distribution has {p.shape[0]} entries, expected {size}")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError("distribution entries must be finite and non-negative")
    total = p.sum()
    if abs(total - 1.0) > PROB_ATOL:
        raise ValueError(f"distribution sums to {total!r}, not 1")
    return p


def argmax_first(values) -> int:
    """Index of the maximum, ties resolved to the smallest index."""
    return int(np.argmax(values))


def outage_distortion(x: int, x_hat: int) -> float:
    return 0.0 if int(x) == int(x_hat) else 1.0


@dataclass(frozen=True, eq=False)
class DistortionMeasure:
    """Bounded per-symbol distortion ``d(x, x_hat)``.

    ``kind`` is ``"outage"`` (0-1 loss, no matrix stored) or ``"matrix"``
    (explicit ``size x size`` table). Rows are indexed by the source symbol.
    """

    kind: str
    size: int
    matrix: np.ndarray | None = None
    d_max: float = 1.0
    _rows: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind == "outage":
            table = 1.0 - np.eye(self.size)
        elif self.kind == "matrix":
            if self.matrix is None:
                raise ValueError("matrix distortion needs a matrix")
            table = np.asarray(self.matrix, dtype=np.float64)
            if table.shape != (self.size, self.size):
                raise ValueError(f"matrix must be {self.size}x{self.size}")
            if np.any(np.diag(table) != 0.0):
                raise ValueError("distortion matrix must have a zero diagonal")
            if np.any(table < 0) or np.any(table > self.d_max):
                raise ValueError("distortion values must lie in [0, d_max]")
        else:
            raise ValueError(f"unknown distortion kind {self.kind!r}")
        table.setflags(write=False)
        object.__setattr__(self, "_rows", table)

    def __call__(self, x: int, x_hat: int) -> float:
        if self.kind == "outage":
            return outage_distortion(x, x_hat)
        return float(self._rows[x, x_hat])

    def row(self, x: int) -> np.ndarray:
        """Vector ``d(x, .)`` over all reconstructions (read-only view)."""
        return self._rows[x]

    def as_matrix(self) -> np.ndarray:
        return self._rows


def outage_measure(size: int) -> DistortionMeasure:
    return DistortionMeasure("outage", size, d_max=1.0)


def matrix_distortion(measure: DistortionMeasure, x: int, x_hat: int) -> float:
    if measure.kind != "matrix":
        raise ValueError("matrix_distortion needs a matrix measure")
    return measure(x, x_hat)


def cosine_matrix_from_embeddings(embeddings) -> DistortionMeasure:
    """Semantic distortion ``(1 - cos(phi(x_hat), phi(x))) / 2`` from an embedding table."""
    emb = np.asarray(embeddings, dtype=np.float64)
    if emb.ndim != 2 or emb.shape[0] < 2:
        raise ValueError("embeddings must be a (size, dim) table with size >= 2")
    norms = np.linalg.norm(emb, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero-norm embedding cannot define a cosine distortion")
    unit = emb / norms[:, None]
    d = 0.5 * (1.0 - unit @ unit.T)
    # rounding can leave tiny negatives or a non-zero diagonal
    np.clip(d, 0.0, 1.0, out=d)
    np.fill_diagonal(d, 0.0)
    d = 0.5 * (d + d.T)
    return DistortionMeasure("matrix", emb.shape[0], matrix=d, d_max=1.0)


def random_embeddings(size: int, dim: int = 16, seed: int = 0) -> np.ndarray:
    """Synthetic Gaussian embedding table standing in for model token embeddings."""
    rng = np.random.default_rng(seed)
    return rng.standard_normal((size, dim))


def load_embeddings(path) -> np.ndarray:
    """Load a JSON array of ``size`` embedding vectors."""
    data = json.loads(Path(path).read_text())
    emb = np.asarray(data, dtype=np.float64)
    if emb.ndim != 2:
        raise ValueError(f"{path}: expected an array of equal-length vectors")
    return emb
