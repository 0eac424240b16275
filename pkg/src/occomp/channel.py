"""Packet erasure channels with perfect one-step-delayed ACK/NACK feedback.

Three erasure processes are provided: a fixed pattern, independent
Bernoulli draws with a constant or scheduled probability, and the two-state
Gilbert-Elliott chain. Each stochastic channel owns its own seeded
generator. The module also carries the envelope-process analytics used to
certify deterministic patterns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GOOD, BAD = "G", "B"


@dataclass(frozen=True)
class ChannelStep:
    erased: int
    delivered: object  # the message, or None for an erasure
    hidden_state: str | None = None


def _step(erased: int, msg, state=None) -> ChannelStep:
    return ChannelStep(erased, None if erased else msg, state)


class Channel:
    deterministic = False

    def erasure(self, t: int) -> tuple[int, str | None]:
        raise NotImplementedError

    def transmit(self, t: int, msg) -> ChannelStep:
        erased, state = self.erasure(t)
        return _step(erased, msg, state)

    def erasures(self, T: int) -> np.ndarray:
        """Draw the next ``T`` erasure bits (advances the channel)."""
        return np.array([self.erasure(t)[0] for t in range(1, T + 1)], dtype=np.int64)


class IdealChannel(Channel):
    deterministic = True

    def erasure(self, t):
        return 0, None


class DeterministicChannel(Channel):
    """Erasure ``pattern[t-1]`` at step ``t``; optionally wraps around."""

    deterministic = True

    def __init__(self, pattern, wrap: bool = True):
        self.pattern = np.asarray(pattern, dtype=np.int64)
        if self.pattern.ndim != 1 or self.pattern.size == 0:
            raise ValueError("erasure pattern must be a non-empty bit sequence")
        if np.any((self.pattern != 0) & (self.pattern != 1)):
            raise ValueError("erasure pattern must contain only 0 and 1")
        self.wrap = wrap

    def erasure(self, t):
        i = t - 1
        if i >= self.pattern.size:
            if not self.wrap:
                raise IndexError(f"erasure pattern exhausted at t={t}")
            i %= self.pattern.size
        return int(self.pattern[i]), None


def periodic_pattern(period: int, length: int, phase: int = 0) -> np.ndarray:
    """One erasure every ``period`` slots, the first at index ``phase``."""
    e = np.zeros(length, dtype=np.int64)
    e[phase % period::period] = 1
    return e


class BernoulliChannel(Channel):
    """Memoryless erasures with probability ``e`` or ``schedule[t-1]``."""

    def __init__(self, e=0.0, schedule=None, seed: int = 0):
        if schedule is not None:
            sched = np.asarray(schedule, dtype=np.float64)
            if np.any((sched < 0) | (sched > 1)):
                raise ValueError("erasure probabilities must lie in [0, 1]")
            self.schedule = sched
        else:
            if not 0 <= e <= 1:
                raise ValueError("erasure probability must lie in [0, 1]")
            self.schedule = None
        self.e = e
        self.rng = np.random.default_rng(seed)

    def prob(self, t: int) -> float:
        if self.schedule is None:
            return self.e
        return float(self.schedule[(t - 1) % self.schedule.size])

    def erasure(self, t):
        return int(self.rng.random() < self.prob(t)), None


class GilbertElliottChannel(Channel):
    """Two-state bursty erasure channel.

    ``a`` is P(B -> G) and ``b`` is P(G -> B). The state moves first, then the
    erasure is drawn with the probability of the new state. The initial state
    is drawn from the stationary law unless given.
    """

    def __init__(self, a: float, b: float, e_B: float = 1.0, e_G: float = 0.0,
                 initial_state: str | None = None, seed: int = 0):
        for name, v in (("a", a), ("b", b), ("e_B", e_B), ("e_G", e_G)):
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        self.a, self.b, self.e_B, self.e_G = a, b, e_B, e_G
        self.rng = np.random.default_rng(seed)
        if initial_state is None:
            pi_B = steady_state(a, b, e_B, e_G)[0] if a + b > 0 else 1.0
            initial_state = BAD if self.rng.random() < pi_B else GOOD
        if initial_state not in (GOOD, BAD):
            raise ValueError("initial_state must be 'G' or 'B'")
        self.state = initial_state

    @property
    def transition_matrix(self) -> np.ndarray:
        """Rows/columns ordered (B, G)."""
        return np.array([[1 - self.a, self.a], [self.b, 1 - self.b]])

    def erasure(self, t):
        u = self.rng.random()
        if self.state == BAD:
            if u < self.a:
                self.state = GOOD
        elif u < self.b:
            self.state = BAD
        e = self.e_B if self.state == BAD else self.e_G
        return int(self.rng.random() < e), self.state


def feedback(step: ChannelStep) -> int:
    return step.erased


def steady_state(a: float, b: float, e_B: float, e_G: float) -> tuple[float, float, float]:
    """Stationary ``(pi_B, pi_G, e_bar)`` of the Gilbert-Elliott chain."""
    if a + b <= 0:
        raise ValueError("a = b = 0 gives a reducible chain with no unique steady state")
    pi_B = b / (a + b)
    pi_G = a / (a + b)
    return pi_B, pi_G, pi_B * e_B + pi_G * e_G


def spectral_gap(a: float, b: float) -> float:
    return 1.0 - abs(1.0 - a - b)


def envelope(seq, tau: int) -> float:
    """Largest sum over ``tau + 1`` consecutive terms of a finite sequence."""
    z = np.asarray(seq, dtype=np.float64)
    if tau < 1:
        raise ValueError("tau must be >= 1")
    w = tau + 1
    if w > z.size:
        raise ValueError(f"window of {w} terms exceeds sequence length {z.size}")
    c = np.concatenate(([0.0], np.cumsum(z)))
    return float(np.max(c[w:] - c[:-w]))


def envelope_curve(seq, max_tau: int | None = None) -> np.ndarray:
    """``envelope(seq, tau)`` for ``tau = 1 .. max_tau`` (index 0 is tau = 1)."""
    z = np.asarray(seq, dtype=np.float64)
    if max_tau is None:
        max_tau = z.size - 1
    c = np.concatenate(([0.0], np.cumsum(z)))
    return np.array([np.max(c[t + 1:] - c[:-(t + 1)]) for t in range(1, max_tau + 1)])


def make_psi(kind: str, c: float):
    """Sublinear margin families: ``constant``, ``sqrt`` (c*sqrt(tau)) and ``log`` (c*log(1+tau))."""
    if kind == "constant":
        return lambda tau: c
    if kind == "sqrt":
        return lambda tau: c * math.sqrt(tau)
    if kind == "log":
        return lambda tau: c * math.log1p(tau)
    raise ValueError(f"unknown psi family {kind!r}")


def _psi_fn(psi):
    if callable(psi):
        return psi
    if isinstance(psi, (int, float)):
        return lambda tau: float(psi)
    kind, c = psi
    return make_psi(kind, c)


def check_assumption3(pattern, A: float, psi, D: float, epsilon: float, d_max: float,
                      T: int | None = None) -> bool:
    """True iff ``envelope(E, tau) < A * tau + psi(tau)`` for every ``tau`` in ``[1, T-1]``."""
    if not A < (D - epsilon) / d_max:
        raise ValueError(f"need A < (D - eps)/d_max = {(D - epsilon) / d_max}, got A={A}")
    e = np.asarray(pattern, dtype=np.float64)
    if T is not None:
        e = e[:T]
    psi = _psi_fn(psi)
    if e.size < 2:
        return True
    curve = envelope_curve(e)
    taus = np.arange(1, e.size)
    margin = A * taus + np.array([psi(int(t)) for t in taus])
    return bool(np.all(curve < margin))


def tau_max(A: float, psi, D: float, epsilon: float, d_max: float, cap: int = 10**7) -> int:
    """Smallest ``tau >= 1`` with ``psi(tau)/tau <= (D - eps)/d_max - A``."""
    margin = (D - epsilon) / d_max - A
    if margin <= 0:
        raise ValueError("need A < (D - eps)/d_max")
    psi = _psi_fn(psi)
    for tau in range(1, cap + 1):
        # tolerate the rounding in margin itself, e.g. 0.3 - 0.05 - 0.1 != 0.15
        if psi(tau) / tau <= margin + 1e-12:
            return tau
    raise ValueError(f"psi is not sublinear enough: no tau <= {cap} meets the margin")
