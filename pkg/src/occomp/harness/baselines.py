"""Reference schemes: random-dropout lossless coding and offline fixed-parameter search."""

from __future__ import annotations

import numpy as np

from .. import entropy_code as ec
from ..ca_controller import ml_fallback


def dropout_baseline_step(probs, D: float, rng):
    """One dropout round: ``(declared, codebook or None)``.

    With probability ``D`` the round is declared an outage, nothing is sent
    and both ends output the most likely symbol; otherwise the symbol is coded
    losslessly under ``probs``.
    """
    declared = bool(rng.random() < D)
    return declared, None if declared else ec.build_codebook(probs)


class DropoutEncoder:
    """Lossless coding with outages declared independently of the data.

    Encoder and decoder draw the outage decisions from generators with the
    same seed, so no signalling is needed.
    """

    scheme = "llmzip-dropout"

    def __init__(self, D: float, seed: int = 0):
        if not 0 <= D <= 1:
            raise ValueError("dropout rate D must lie in [0, 1]")
        self.D = D
        self.rng = np.random.default_rng(seed)
        self.lam = 0.0
        self.s = 0.0
        self.delta_tgt = 0.0
        self.controller = None

    def encode(self, probs, x):
        self._probs = probs
        self._x = x
        self.declared, book = dropout_baseline_step(probs, self.D, self.rng)
        if self.declared:
            self._x_tilde = ml_fallback(probs)
            self.set_miss = 1
            self.coded_prob = 1.0
            return None, -1
        self._x_tilde = x
        self.set_miss = 0
        self.coded_prob = float(probs[x])
        return ec.encode(book, x), x

    def erasure_free_output(self) -> int:
        return self._x_tilde

    def feedback(self, erased: int) -> int:
        self.delta_ch_bound = float(erased and not self.declared)
        if self.declared or erased:
            return ml_fallback(self._probs)
        return self._x


class DropoutDecoder:
    def __init__(self, D: float, seed: int = 0):
        self.D = D
        self.rng = np.random.default_rng(seed)

    def decode(self, probs, delivered):
        declared = self.rng.random() < self.D
        if declared or delivered is None:
            return ml_fallback(probs)
        symbol, _ = ec.decode(ec.build_codebook(probs), delivered)
        return symbol

    def feedback(self, erased: int) -> None:
        pass


def default_grid(scheme: str, n: int = 40, s_min: float | None = None, s_max: float | None = None):
    """Geometric grid of fixed thresholds (Block-CSC) or slopes (Block-CRDC), with 0 prepended."""
    if scheme == "block-csc":
        lo, hi = s_min or 1e-4, s_max or 1.0
    else:
        lo, hi = s_min or 1e-2, s_max or 1e3
    return np.concatenate(([0.0], np.geomspace(lo, hi, n)))


def select_block_parameter(scheme: str, grid, distortions, D: float):
    """Largest feasible threshold (Block-CSC) or smallest feasible slope (Block-CRDC).

    Returns ``None`` when no grid point meets ``D``.
    """
    grid = np.asarray(grid, dtype=np.float64)
    ok = np.asarray(distortions) <= D + 1e-12
    if not ok.any():
        return None
    feasible = grid[ok]
    return float(feasible.max() if scheme == "block-csc" else feasible.min())
