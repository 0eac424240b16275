"""Online conformal rate-distortion compression for any bounded distortion.

The encoder sends ``argmin_y -log2 p(y) + s * d(x, y)`` coded under the full
predictive distribution; the slope ``s = max(0, lam)`` follows
``lam <- lam + eta * (d(x, x_tilde) - D)``. Only the encoder needs ``s``; the
decoder simply inverts the code. ``D = 0`` runs a lossless mode (``s = inf``).
"""

from __future__ import annotations

import math

import numpy as np

from . import entropy_code as ec
from .ca_controller import ChannelAdaptiveController, ml_fallback


def rd_costs(probs: np.ndarray, x: int, s: float, measure) -> np.ndarray:
    with np.errstate(divide="ignore"):
        rate = -np.log2(probs)
    if s == 0.0:
        return rate
    return rate + s * measure.row(x)


def rd_select(probs: np.ndarray, x: int, s: float, measure) -> int:
    """Minimizer of the bit-rate plus slope-weighted distortion, ties to the smallest index."""
    if math.isinf(s):
        return int(x)
    return int(np.argmin(rd_costs(probs, x, s, measure)))


def update_lambda_ocrdc(lam: float, eta: float, dist_val: float, D: float) -> float:
    return lam + eta * (dist_val - D)


def lemma1_bound(L: float, eta: float, D: float, d_max: float) -> float:
    """Ceiling on the OCRDC parameter when every code length stays below ``L`` bits."""
    if D <= 0:
        raise ValueError("the slope ceiling needs D > 0 (D = 0 is the lossless mode)")
    return L / D + eta * (d_max - D)


class OCRDCEncoder:
    scheme = "ocrdc"

    def __init__(self, D, measure, eta=0.1, lambda0=0.1, epsilon=None, adaptive=False):
        if not 0.0 <= D <= measure.d_max:
            raise ValueError("OCRDC target D must lie in [0, d_max]")
        self.D = D
        self.measure = measure
        self.eta = eta
        self.lam = lambda0
        self.lossless = D == 0.0
        self.controller = ChannelAdaptiveController(D, epsilon) if adaptive else None
        self.delta_tgt = 0.0

    @property
    def s(self) -> float:
        return math.inf if self.lossless else max(0.0, self.lam)

    def encode(self, probs: np.ndarray, x: int) -> tuple[ec.Message, int]:
        x_tilde = rd_select(probs, x, self.s, self.measure)
        self._probs = probs
        self._x = x
        self._x_tilde = x_tilde
        self.set_miss = int(x_tilde != x)
        self.coded_prob = float(probs[x_tilde])
        return ec.encode(ec.build_codebook(probs), x_tilde), x_tilde

    def erasure_free_output(self) -> int:
        return self._x_tilde

    def feedback(self, erased: int) -> int:
        x, x_tilde = self._x, self._x_tilde
        x_hat = ml_fallback(self._probs) if erased else x_tilde
        d_sent = self.measure(x, x_tilde)
        self.delta_ch_bound = (self.measure(x, x_hat) - d_sent) if erased else 0.0
        if self.controller is None:
            self.delta_tgt = 0.0
            if not self.lossless:
                self.lam = update_lambda_ocrdc(self.lam, self.eta, d_sent, self.D)
        else:
            self.delta_tgt = self.controller.delta_tgt
            self.lam = self.lam + self.eta * (d_sent - self.D + self.delta_tgt)
            self.controller.observe(self.delta_ch_bound)
        return x_hat


class OCRDCDecoder:
    """Stateless apart from the shared predictor: inverts the code or falls back to ML."""

    def decode(self, probs: np.ndarray, delivered) -> int:
        if delivered is None:
            return ml_fallback(probs)
        symbol, _ = ec.decode(ec.build_codebook(probs), delivered)
        return symbol

    def feedback(self, erased: int) -> None:
        pass
