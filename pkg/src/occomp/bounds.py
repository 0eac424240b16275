"""Closed-form right-hand sides of the distortion guarantees, and verdicts on traces.

Every guarantee has the shape ``avg distortion <= D + C/T``; the functions
below return the full right-hand side. ``verify`` binds one of them to a
finished episode.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .channel import check_assumption3, tau_max as _tau_max

HOLDS, VIOLATED, NOT_APPLICABLE = "holds", "violated", "not-applicable"
COMPARISON_TOL = 1e-9


def theorem1_rhs(D, eta, lambda0, T):
    """Outage-rate bound for OCSC over an ideal channel."""
    return D + (eta * (1 - D) + lambda0) / (eta * T)


def theorem2_rhs(D, eta, lambda0, L, d_max, T):
    """Distortion bound for OCRDC over an ideal channel (needs D > 0 and finite L)."""
    if D <= 0:
        raise ValueError("no finite bound for D = 0 (lossless mode)")
    return D + (L / D + eta * (d_max - D) - lambda0) / (eta * T)


def lemma1_ceiling(L, eta, D, d_max):
    return L / D + eta * (d_max - D)


def lemma2_bound(scheme, eta, epsilon, L=None, d_max=1.0):
    """CA-OCSC floor ``-eta(1-eps)`` or CA-OCRDC ceiling ``L/eps + eta(d_max-eps)``."""
    if _family(scheme) == "ocsc":
        return -eta * (1 - epsilon)
    return L / epsilon + eta * (d_max - epsilon)


def k_constant(scheme, eta, lambda0, epsilon, L=None, d_max=1.0):
    if _family(scheme) == "ocsc":
        return eta * (1 - epsilon) + lambda0
    return L / epsilon + eta * (d_max - epsilon) - lambda0


def prop1_rhs(scheme, D, eta, lambda0, L, d_max, epsilon, T, Q_T):
    K = k_constant(scheme, eta, lambda0, epsilon, L, d_max)
    return D + K / (eta * T) + Q_T / T


def queue_bound(tau_max, D, epsilon, d_max):
    """Ceiling on the residual queue under a certified deterministic erasure pattern."""
    return tau_max * (d_max - D + epsilon) + D - epsilon


def theorem3_rhs(scheme, D, eta, lambda0, L, d_max, epsilon, T, tau_max):
    K = k_constant(scheme, eta, lambda0, epsilon, L, d_max)
    return D + K / (T * eta) + queue_bound(tau_max, D, epsilon, d_max) / T


def _family(scheme: str) -> str:
    s = scheme.lower().replace("-", "").replace("_", "")
    if s.endswith("ocsc"):
        return "ocsc"
    if s.endswith("ocrdc"):
        return "ocrdc"
    raise ValueError(f"no guarantee is defined for scheme {scheme!r}")


@dataclass
class Verdict:
    theorem: str
    status: str
    lhs: float = math.nan
    rhs: float = math.nan
    slack: float = math.nan
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_dict(self) -> dict:
        return asdict(self)


def _judge(theorem, lhs, rhs, note="") -> Verdict:
    slack = rhs - lhs
    status = HOLDS if slack >= -COMPARISON_TOL else VIOLATED
    return Verdict(theorem, status, float(lhs), float(rhs), float(slack), note)


def _na(theorem, why) -> Verdict:
    return Verdict(theorem, NOT_APPLICABLE, note=why)


def verify(trace, theorem: str, config) -> Verdict:
    """Check one guarantee on a finished episode.

    ``trace`` needs ``T``, ``outage``, ``d``, ``E``, ``lam`` and ``Q`` arrays plus
    ``lambda_final``; ``config`` supplies ``scheme, D, eta, lambda0, epsilon,
    L, d_max`` and, for the periodic-erasure bound, ``A`` and ``psi``. The OCSC family is judged
    on its outage rate (unit maximum distortion).
    """
    theorem = theorem.lower()
    try:
        fam = _family(config.scheme)
    except ValueError:
        return _na(theorem, f"scheme {config.scheme} carries no guarantee")
    adaptive = config.scheme.lower().startswith("ca")
    T = trace.T
    erasure_free = not np.any(trace.E)
    d_max = 1.0 if fam == "ocsc" else config.d_max
    lhs = float(np.mean(trace.outage if fam == "ocsc" else trace.d))
    D, eta, lam0, eps, L = config.D, config.eta, config.lambda0, config.epsilon, config.L

    if theorem in ("thm1", "theorem1"):
        if fam != "ocsc" or not erasure_free:
            return _na(theorem, "needs OCSC over an erasure-free channel")
        return _judge(theorem, lhs, theorem1_rhs(D, eta, lam0, T))

    if theorem in ("thm2", "theorem2"):
        if fam != "ocrdc" or not erasure_free or D <= 0 or not math.isfinite(L):
            return _na(theorem, "needs OCRDC, D > 0, finite L, erasure-free channel")
        return _judge(theorem, lhs, theorem2_rhs(D, eta, lam0, L, d_max, T))

    if theorem in ("lemma1",):
        if fam != "ocrdc" or adaptive or not erasure_free or D <= 0 or not math.isfinite(L):
            return _na(theorem, "needs OCRDC, D > 0, finite L, erasure-free channel")
        ceiling = lemma1_ceiling(L, eta, D, d_max)
        return _judge(theorem, max(float(np.max(trace.lam)), trace.lambda_final), ceiling)

    if theorem in ("lemma2",):
        if not adaptive or (fam == "ocrdc" and not math.isfinite(L)):
            return _na(theorem, "needs a channel-adaptive scheme (and finite L for OCRDC)")
        lams = np.append(trace.lam, trace.lambda_final)
        bound = lemma2_bound(fam, eta, eps, L, d_max)
        if fam == "ocsc":
            # floor: judged as bound - min(lambda) <= 0
            return _judge(theorem, bound, float(np.min(lams)))
        return _judge(theorem, float(np.max(lams)), bound)

    if theorem in ("prop1", "proposition1"):
        if not adaptive or (fam == "ocrdc" and not math.isfinite(L)) or D <= 0:
            return _na(theorem, "needs a channel-adaptive scheme (and finite L for OCRDC)")
        Q_T = float(trace.Q[-1])
        return _judge(theorem, lhs, prop1_rhs(fam, D, eta, lam0, L, d_max, eps, T, Q_T))

    if theorem in ("thm3", "theorem3", "queue"):
        if not adaptive or (fam == "ocrdc" and not math.isfinite(L)):
            return _na(theorem, "needs a channel-adaptive scheme (and finite L for OCRDC)")
        if not getattr(config, "channel_deterministic", False) or config.A is None or config.psi is None:
            return _na(theorem, "needs a deterministic channel with a declared envelope (A, psi)")
        if not config.A < (D - eps) / d_max:
            return _na(theorem, "declared envelope slope A is not below (D - eps)/d_max")
        if not check_assumption3(trace.E, config.A, config.psi, D, eps, d_max):
            return _na(theorem, "erasure pattern breaks the declared envelope")
        tm = _tau_max(config.A, config.psi, D, eps, d_max)
        if theorem == "queue":
            return _judge(theorem, float(np.max(trace.Q)), queue_bound(tm, D, eps, d_max),
                          note=f"tau_max={tm}")
        return _judge(theorem, lhs, theorem3_rhs(fam, D, eta, lam0, L, d_max, eps, T, tm),
                      note=f"tau_max={tm}")

    raise ValueError(f"unknown theorem id {theorem!r}")


def verify_stochastic(avg_distortions, D: float, slack: float, delta: float) -> Verdict:
    """Empirical high-probability check across seeds.

    Passes when the fraction of seeds whose average distortion exceeds
    ``D + slack`` is at most ``delta``.
    """
    x = np.asarray(avg_distortions, dtype=np.float64)
    if x.size == 0:
        return _na("stochastic", "no episodes")
    frac = float(np.mean(x > D + slack + COMPARISON_TOL))
    status = HOLDS if frac <= delta else VIOLATED
    return Verdict("stochastic", status, frac, delta, delta - frac,
                   note=f"{x.size} seeds, threshold D+{slack}")
