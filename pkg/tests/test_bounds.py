import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occomp.bounds import (HOLDS, NOT_APPLICABLE, VIOLATED, k_constant, lemma1_ceiling, lemma2_bound, prop1_rhs,
                           queue_bound, theorem1_rhs, theorem2_rhs, theorem3_rhs, verify, verify_stochastic)
from occomp.channel import periodic_pattern


def test_ideal_outage_bound_rhs():
    assert theorem1_rhs(0.2, 0.1, 0.1, 1000) == pytest.approx(0.2018)
    assert theorem1_rhs(0.2, 0.1, 0.1, 10**6) == pytest.approx(0.2, abs=1e-5)
    assert theorem1_rhs(1.0, 0.5, 0.0, 10) == 1.0


def test_ideal_distortion_bound_rhs():
    assert theorem2_rhs(0.3, 0.1, 0.1, 6, 1.0, 3000) == pytest.approx(0.3 + 19.97 / 300)
    assert theorem2_rhs(0.3, 0.1, 0.1, 0, 1.0, 100) == pytest.approx(0.3 + (0.07 - 0.1) / 10)
    assert theorem2_rhs(0.3, 0.1, 0.1, 6, 1, 100) > theorem2_rhs(0.3, 0.1, 0.1, 6, 1, 200)
    with pytest.raises(ValueError):
        theorem2_rhs(0.0, 0.1, 0.1, 6, 1.0, 10)


def test_queue_augmented_rhs():
    assert prop1_rhs("ca-ocsc", 0.3, 0.1, 0.1, None, 1.0, 0.05, 1000, 0) == pytest.approx(0.30195)
    base = prop1_rhs("ca-ocsc", 0.3, 0.1, 0.1, None, 1.0, 0.05, 1000, 0)
    assert prop1_rhs("ca-ocsc", 0.3, 0.1, 0.1, None, 1.0, 0.05, 1000, 3) == pytest.approx(base + 0.003)
    rd = prop1_rhs("ca-ocrdc", 0.3, 0.1, 0.1, 6, 1.0, 0.05, 1000, 0)
    assert rd == pytest.approx(0.3 + (6 / 0.05 + 0.1 * 0.95 - 0.1) / 100)


def test_periodic_erasure_rhs_and_queue_ceiling():
    K = k_constant("ca-ocsc", 0.1, 0.1, 0.05)
    rhs = theorem3_rhs("ca-ocsc", 0.3, 0.1, 0.1, None, 1.0, 0.05, 2000, 8)
    assert rhs == pytest.approx(0.3 + K / 200 + 0.003125)
    assert queue_bound(1, 0.3, 0.05, 1.0) == pytest.approx(1.0)
    prop = prop1_rhs("ca-ocsc", 0.3, 0.1, 0.1, None, 1.0, 0.05, 2000, 0)
    assert rhs >= prop


def test_parameter_ceilings():
    assert lemma1_ceiling(6, 0.1, 0.3, 1.0) == pytest.approx(20.07)
    assert lemma2_bound("ca-ocsc", 0.1, 0.05) == pytest.approx(-0.095)
    assert lemma2_bound("ca-ocrdc", 0.1, 0.05, L=6) == pytest.approx(120.095)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10**5), st.integers(1, 10**5), st.floats(0.05, 0.95), st.floats(0.01, 1), st.floats(0, 2))
def test_slack_nonincreasing_in_T(T1, T2, D, eta, lam0):
    lo, hi = sorted((T1, T2))
    assert theorem1_rhs(D, eta, lam0, hi) <= theorem1_rhs(D, eta, lam0, lo) + 1e-15
    assert theorem2_rhs(D, eta, lam0, 6, 1, hi) <= theorem2_rhs(D, eta, lam0, 6, 1, lo) + 1e-15
    assert (theorem3_rhs("ca-ocrdc", D, eta, lam0, 6, 1, D / 2, hi, 5)
            <= theorem3_rhs("ca-ocrdc", D, eta, lam0, 6, 1, D / 2, lo, 5) + 1e-15)


def _trace(outage, E=None, lam=None, Q=None, lam_final=0.0):
    T = len(outage)
    return SimpleNamespace(T=T, outage=np.asarray(outage), d=np.asarray(outage, dtype=float),
                           E=np.zeros(T) if E is None else np.asarray(E),
                           lam=np.zeros(T) if lam is None else np.asarray(lam),
                           Q=np.zeros(T) if Q is None else np.asarray(Q), lambda_final=lam_final)


def _cfg(scheme, **kw):
    base = dict(scheme=scheme, D=0.2, eta=0.1, lambda0=0.1, epsilon=0.05, L=6.0, d_max=1.0,
                A=None, psi=None, channel_deterministic=True)
    base.update(kw)
    return SimpleNamespace(**base)


def test_verify_outage_bound():
    ok = verify(_trace([1, 0, 0, 0, 0] * 20), "thm1", _cfg("ocsc"))
    assert ok.status == HOLDS and ok.slack >= 0
    bad = verify(_trace([1, 1, 0, 0, 0] * 20), "thm1", _cfg("ocsc"))
    assert bad.status == VIOLATED and bad.slack < 0
    erased = verify(_trace([0] * 10, E=[1] + [0] * 9), "thm1", _cfg("ocsc"))
    assert erased.status == NOT_APPLICABLE


def test_verify_not_applicable_cases():
    t = _trace([0] * 10)
    assert verify(t, "thm1", _cfg("llmzip-dropout")).status == NOT_APPLICABLE
    assert verify(t, "thm2", _cfg("ocrdc", L=math.inf)).status == NOT_APPLICABLE
    assert verify(t, "thm3", _cfg("ca-ocsc")).status == NOT_APPLICABLE
    heavy = _trace([0] * 50, E=np.ones(50))
    assert verify(heavy, "thm3", _cfg("ca-ocsc", D=0.3, A=0.1, psi=("constant", 2))).status == NOT_APPLICABLE
    with pytest.raises(ValueError):
        verify(t, "thm9", _cfg("ocsc"))


def test_verify_periodic_erasures():
    E = periodic_pattern(10, 400)
    t = _trace([0] * 400, E=E, Q=np.where(E == 1, 1.0, 0.0))
    cfg = _cfg("ca-ocsc", D=0.3, A=0.1, psi=("constant", 2))
    v = verify(t, "thm3", cfg)
    assert v.status == HOLDS and "tau_max=14" in v.note
    assert verify(t, "queue", cfg).status == HOLDS


def test_verify_parameter_floor():
    cfg = _cfg("ca-ocsc")
    assert verify(_trace([0] * 3, lam=[0.0, -0.09, 0.0]), "lemma2", cfg).status == HOLDS
    assert verify(_trace([0] * 3, lam=[0.0, -0.2, 0.0]), "lemma2", cfg).status == VIOLATED


def test_verify_never_holds_with_negative_slack():
    rng = np.random.default_rng(0)
    for _ in range(200):
        out = rng.integers(0, 2, 50)
        v = verify(_trace(out), "thm1", _cfg("ocsc", D=float(rng.uniform(0, 1))))
        assert (v.status == HOLDS) == (v.slack >= -1e-9)


def test_verify_stochastic():
    assert verify_stochastic([0.29, 0.31, 0.30, 0.35], 0.3, 0.02, 0.3).status == HOLDS
    assert verify_stochastic([0.4, 0.4, 0.3], 0.3, 0.02, 0.5).status == VIOLATED
    assert verify_stochastic([], 0.3, 0.02, 0.05).status == NOT_APPLICABLE
