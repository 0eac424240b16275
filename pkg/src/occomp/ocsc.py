"""Online conformal sparse compression (threshold coding for the outage distortion).

At each step only the symbols whose predicted probability reaches the
threshold ``s = max(0, lam)`` are coded; everything else is mapped to a
reserved outage symbol ``x_o`` (index ``size``) carrying mass ``D``. After an
outage both ends reconstruct the most likely symbol outside the coded set.
The threshold follows ``lam <- lam - eta * (outage - D)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import entropy_code as ec
from .ca_controller import ChannelAdaptiveController, ml_fallback

# coding mass for x_o when D = 0 and nothing else can be borrowed
ESCAPE_MASS = 2.0 ** -32


def high_prob_set(probs: np.ndarray, s: float) -> np.ndarray:
    """Boolean mask of symbols with ``p >= s``; zero-probability symbols never qualify."""
    p = np.asarray(probs)
    return (p >= s) & (p > 0)


@dataclass(frozen=True)
class SparseEncodingPlan:
    in_set: np.ndarray  # bool mask over the alphabet
    augmented: np.ndarray  # truncated distribution, last entry is x_o
    coding: np.ndarray  # distribution the entropy code is built from
    fallback: int = -1  # reconstruction after an outage: argmax outside the set

    @property
    def outage_symbol(self) -> int:
        return self.in_set.shape[0]

    @property
    def high_prob_set(self) -> frozenset:
        return frozenset(np.flatnonzero(self.in_set).tolist())

    def codebook(self) -> ec.Codebook:
        return ec.build_codebook(self.coding)


@lru_cache(maxsize=4096)
def _ascending(key: bytes) -> np.ndarray:
    return np.sort(np.frombuffer(key, dtype=np.float64))


@lru_cache(maxsize=4096)
def _cached_plan(key: bytes, k: int, D: float) -> SparseEncodingPlan:
    p = np.frombuffer(key, dtype=np.float64)
    if k == 0:
        return _make_plan(p, np.inf, D)
    return _make_plan(p, _ascending(key)[p.shape[0] - k], D)


def build_plan(probs: np.ndarray, s: float, D: float) -> SparseEncodingPlan:
    """Coded set, augmented distribution and coding distribution for one step.

    The set only depends on how many probabilities reach ``s``, so plans are
    memoized per (distribution, set size, D).
    """
    if not 0.0 <= D <= 1.0:
        raise ValueError("OCSC target D must lie in [0, 1]")
    p = np.ascontiguousarray(probs, dtype=np.float64)
    key = p.tobytes()
    asc = _ascending(key)
    # number of entries with p >= s and p > 0
    k = p.shape[0] - int(np.searchsorted(asc, s, side="left")) if s > 0 else int(np.count_nonzero(asc))
    return _cached_plan(key, k, float(D))


def _make_plan(p: np.ndarray, s: float, D: float) -> SparseEncodingPlan:
    mask = high_prob_set(p, s)
    n = p.shape[0]
    aug = np.zeros(n + 1)
    kept = p[mask].sum()
    if kept == 0:
        aug[n] = 1.0
        mask.setflags(write=False)
        aug.setflags(write=False)
        return SparseEncodingPlan(mask, aug, aug, _outside_argmax(p, mask))
    aug[:n][mask] = (1.0 - D) * p[mask] / kept
    aug[n] = D
    coding = aug
    if D == 0.0 and not mask.all():
        # x_o must stay codable; borrow the predictor's mass outside the set
        escape = max(1.0 - kept, 0.0) or ESCAPE_MASS
        coding = np.zeros(n + 1)
        coding[:n][mask] = (1.0 - escape) * p[mask] / kept
        coding[n] = escape
    for arr in (mask, aug, coding):
        arr.setflags(write=False)
    return SparseEncodingPlan(mask, aug, coding, _outside_argmax(p, mask))


def _outside_argmax(p: np.ndarray, mask: np.ndarray) -> int:
    if mask.all():
        return int(np.argmax(p))
    return int(np.argmax(np.where(mask, -1.0, p)))


def encode_step(plan: SparseEncodingPlan, x: int) -> tuple[ec.Message, int]:
    """Return the message and the coded symbol (``x`` or the outage symbol)."""
    x_tilde = x if plan.in_set[x] else plan.outage_symbol
    return ec.encode(plan.codebook(), x_tilde), x_tilde


def reconstruct(probs: np.ndarray, plan: SparseEncodingPlan, decoded: int) -> int:
    if decoded != plan.outage_symbol:
        return decoded
    if plan.fallback >= 0:
        return plan.fallback
    outside = ~plan.in_set
    if not outside.any():
        return ml_fallback(probs)
    return int(np.argmax(np.where(outside, probs, -1.0)))


def decode_step(probs: np.ndarray, plan: SparseEncodingPlan, message) -> int:
    decoded, _ = ec.decode(plan.codebook(), message)
    return reconstruct(probs, plan, decoded)


def update_lambda_ocsc(lam: float, eta: float, outage: int, D: float) -> float:
    return lam - eta * (outage - D)


class _OCSCSide:
    """Threshold state shared by the encoder and its decoder replica."""

    def __init__(self, D, eta=0.1, lambda0=0.1, epsilon=None, adaptive=False):
        if not 0.0 <= D <= 1.0:
            raise ValueError("OCSC target D must lie in [0, 1]")
        self.D = D
        self.eta = eta
        self.lam = lambda0
        self.lossless = D == 0.0
        self.controller = ChannelAdaptiveController(D, epsilon) if adaptive else None
        self.plan: SparseEncodingPlan | None = None
        self.delta_tgt = 0.0

    @property
    def s(self) -> float:
        return 0.0 if self.lossless else max(0.0, self.lam)

    def _advance(self, erased: int, set_miss: int) -> None:
        outage = (1 - erased) * set_miss
        if self.controller is None:
            self.delta_tgt = 0.0
            self.lam = update_lambda_ocsc(self.lam, self.eta, outage, self.D)
            return
        self.delta_tgt = self.controller.delta_tgt
        self.lam = self.lam - self.eta * (outage - self.D + self.delta_tgt)
        self.controller.observe(float(erased))


class OCSCEncoder(_OCSCSide):
    scheme = "ocsc"

    def encode(self, probs: np.ndarray, x: int) -> tuple[ec.Message, int]:
        self.plan = build_plan(probs, self.s, self.D)
        self._probs = probs
        self._x = x
        msg, x_tilde = encode_step(self.plan, x)
        self.set_miss = int(x_tilde == self.plan.outage_symbol)
        self.coded_prob = float(self.plan.coding[x_tilde])
        return msg, x_tilde

    def erasure_free_output(self) -> int:
        return reconstruct(self._probs, self.plan, self.plan.outage_symbol if self.set_miss else self._x)

    def feedback(self, erased: int) -> int:
        """Consume the ACK/NACK bit; return the decoder's reconstruction as mirrored here."""
        if erased:
            x_hat = ml_fallback(self._probs)
        else:
            x_hat = self.erasure_free_output()
        self.delta_ch_bound = float(erased)
        self._advance(erased, self.set_miss)
        return x_hat


class OCSCDecoder(_OCSCSide):
    def decode(self, probs: np.ndarray, delivered) -> int:
        self.plan = build_plan(probs, self.s, self.D)
        if delivered is None:
            self._seen_outage = 0
            return ml_fallback(probs)
        decoded, _ = ec.decode(self.plan.codebook(), delivered)
        self._seen_outage = int(decoded == self.plan.outage_symbol)
        return reconstruct(probs, self.plan, decoded)

    def feedback(self, erased: int) -> None:
        self._advance(erased, self._seen_outage)
