"""Channel-adaptive layer: erasure-induced distortion accounting and target adjustment.

Upper bounds on the channel-induced distortion arrive in a residual queue
``Q = sum(arrivals) - sum(adjustments)``; the queue is served by lowering the
effective target by ``min(D - eps, Q)`` at the following step. The doubly
adaptive updates themselves live with the OCSC and OCRDC state machines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def ml_fallback(probs) -> int:
    """Most likely symbol under the predictor, ties to the smallest index."""
    return int(np.argmax(probs))


def default_epsilon(D: float) -> float:
    return min(0.05, D / 2)


def channel_distortion_bound(scheme: str, erased: int, measure=None, x=None, x_tilde=None, x_hat=None) -> float:
    """Controller-usable bound on the distortion caused by this step's erasure.

    ``erasure`` for the OCSC family; ``d(x, x_hat) - d(x, x_tilde)`` for OCRDC.
    """
    if scheme.endswith("ocsc"):
        return float(erased)
    if not erased:
        return 0.0
    return measure(x, x_hat) - measure(x, x_tilde)


def true_channel_distortion(scheme: str, erased: int, x: int, probs, erasure_free_x_hat: int,
                            x_hat: int, measure=None, x_tilde=None) -> float:
    """Exact extra distortion due to the erasure (diagnostic only).

    For OCSC it is 1 iff the symbol was erased, would have been recovered
    without the erasure, and differs from the most likely symbol.
    """
    if not erased:
        return 0.0
    if scheme.endswith("ocsc"):
        return float(erasure_free_x_hat == x and x != ml_fallback(probs))
    return measure(x, x_hat) - measure(x, x_tilde)


@dataclass
class DistortionQueue:
    epsilon: float
    delta_ch_cum: float = 0.0
    delta_tgt_cum: float = 0.0
    q: float = 0.0

    def step(self, arrival: float, service: float) -> "DistortionQueue":
        # rate-distortion ties can leave an arrival at -1e-17
        if -1e-12 < arrival < 0:
            arrival = 0.0
        if arrival < 0 or service < 0:
            raise ValueError("queue arrivals and services must be non-negative")
        self.delta_ch_cum += arrival
        self.delta_tgt_cum += service
        self.q = self.q + arrival - service
        # float drift around an empty queue
        if -1e-9 < self.q < 0:
            self.q = 0.0
        if self.q < 0:
            raise RuntimeError(f"residual distortion queue went negative ({self.q})")
        return self


def step_queue(queue: DistortionQueue, delta_ch_bound: float, delta_tgt_applied: float) -> DistortionQueue:
    return queue.step(delta_ch_bound, delta_tgt_applied)


def next_adjustment(queue: DistortionQueue, D: float) -> float:
    if D - queue.epsilon <= 0:
        raise ValueError("need D > epsilon for a positive service rate")
    return min(D - queue.epsilon, queue.q)


def ca_update_lambda(scheme: str, lam: float, eta: float, D: float, erased: int,
                     outage_or_dist: float, delta_tgt: float) -> float:
    """One doubly adaptive step.

    CA-OCSC takes the raw membership miss and masks it with the erasure bit;
    CA-OCRDC takes ``d(x, x_tilde)``.
    """
    if scheme.endswith("ocsc"):
        return lam - eta * ((1 - erased) * outage_or_dist - D + delta_tgt)
    return lam + eta * (outage_or_dist - D + delta_tgt)


class ChannelAdaptiveController:
    """Queue plus the adjustment ``delta_tgt`` to apply at the current step.

    ``delta_tgt`` starts at 0; ``observe`` serves it, enqueues the new arrival
    and computes the adjustment for the next step.
    """

    def __init__(self, D: float, epsilon: float | None = None):
        eps = default_epsilon(D) if epsilon is None else epsilon
        if eps <= 0 or D - eps <= 0:
            raise ValueError(f"need 0 < epsilon < D, got epsilon={eps}, D={D}")
        self.D = D
        self.epsilon = eps
        self.queue = DistortionQueue(eps)
        self.delta_tgt = 0.0

    def observe(self, delta_ch_bound: float) -> float:
        self.queue.step(delta_ch_bound, self.delta_tgt)
        self.delta_tgt = next_adjustment(self.queue, self.D)
        return self.delta_tgt

    @property
    def q(self) -> float:
        return self.queue.q
