import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occomp import entropy_code as ec
from occomp.ocsc import (OCSCDecoder, OCSCEncoder, build_plan, decode_step, encode_step, high_prob_set,
                         update_lambda_ocsc)

P = np.array([0.5, 0.3, 0.15, 0.05])


def members(mask):
    return set(np.flatnonzero(mask).tolist())


@pytest.mark.parametrize("s, want", [(0.2, {0, 1}), (0.0, {0, 1, 2, 3}), (0.6, set()), (0.3, {0, 1})])
def test_high_prob_set(s, want):
    assert members(high_prob_set(P, s)) == want


def test_zero_probability_never_in_set():
    assert members(high_prob_set([0.7, 0.0, 0.3], 0.0)) == {0, 2}


def test_plan_augmented():
    plan = build_plan(P, 0.2, 0.1)
    assert np.allclose(plan.augmented, [0.5625, 0.3375, 0, 0, 0.1])
    assert plan.outage_symbol == 4
    assert plan.high_prob_set == frozenset({0, 1})


def test_plan_lossless_corner():
    plan = build_plan(P, 0.2, 0.0)
    assert np.allclose(plan.augmented, [0.625, 0.375, 0, 0, 0])


def test_plan_empty_set():
    plan = build_plan(P, 0.6, 0.3)
    assert np.array_equal(plan.augmented, [0, 0, 0, 0, 1.0])
    msg, x_tilde = encode_step(plan, 2)
    assert x_tilde == 4 and msg.length == 0
    assert decode_step(P, plan, msg) == 0


def test_plan_rejects_bad_target():
    with pytest.raises(ValueError):
        build_plan(P, 0.2, 1.5)


def test_encode_lengths():
    plan = build_plan(P, 0.2, 0.1)
    assert encode_step(plan, 0)[0].length == 1
    msg, x_tilde = encode_step(plan, 3)
    assert x_tilde == 4 and msg.length == 4


def test_decode_in_set_and_outage():
    plan = build_plan(P, 0.2, 0.1)
    assert decode_step(P, plan, encode_step(plan, 1)[0]) == 1
    assert decode_step(P, plan, encode_step(plan, 3)[0]) == 2


def test_decode_tie_goes_to_smallest_index():
    p = np.array([0.4, 0.3, 0.15, 0.15])
    plan = build_plan(p, 0.2, 0.1)
    assert decode_step(p, plan, encode_step(plan, 3)[0]) == 2


@pytest.mark.parametrize("outage, want", [(1, 0.92), (0, 1.02)])
def test_update(outage, want):
    assert update_lambda_ocsc(1.0, 0.1, outage, 0.2) == pytest.approx(want)


def test_zero_target_keeps_everything_codable():
    p = np.array([0.6, 0.4, 0.0])
    plan = build_plan(p, 0.0, 0.0)
    for x in (0, 1):
        msg, x_tilde = encode_step(plan, x)
        assert x_tilde == x and decode_step(p, plan, msg) == x


def test_zero_target_outage_still_decodable():
    # set smaller than the support with D = 0: the outage symbol borrows the mass outside
    plan = build_plan(P, 0.2, 0.0)
    msg, x_tilde = encode_step(plan, 3)
    assert x_tilde == 4 and decode_step(P, plan, msg) == 2


def test_plans_are_read_only():
    plan = build_plan(P, 0.2, 0.1)
    with pytest.raises(ValueError):
        plan.augmented[0] = 0.0


def _dist(raw):
    p = np.asarray(raw, dtype=np.float64)
    return p / p.sum()


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.001, 1.0), min_size=2, max_size=20), st.floats(0, 0.6), st.floats(0, 1))
def test_roundtrip_and_plan_invariants(raw, s, D):
    p = _dist(raw)
    plan = build_plan(p, s, D)
    in_set = plan.in_set
    assert np.array_equal(in_set, p >= s)
    assert plan.augmented.sum() == pytest.approx(1.0)
    if in_set.any():
        assert plan.augmented[-1] == pytest.approx(D)
        kept = p[in_set].sum()
        assert np.allclose(plan.augmented[:-1][in_set], (1 - D) * p[in_set] / kept)
    for x in range(p.size):
        msg, x_tilde = encode_step(plan, x)
        decoded, used = ec.decode(plan.codebook(), msg.bits)
        assert decoded == x_tilde and used == msg.length
        x_hat = decode_step(p, plan, msg)
        if in_set[x]:
            assert x_hat == x
        else:
            outside = np.where(in_set, -1.0, p)
            assert x_hat == int(np.argmax(outside))


def test_replicas_stay_in_step():
    rng = np.random.default_rng(3)
    enc = OCSCEncoder(0.2, eta=0.1, lambda0=0.1)
    dec = OCSCDecoder(0.2, eta=0.1, lambda0=0.1)
    lams = []
    for _ in range(500):
        p = rng.dirichlet(np.full(8, 0.3))
        x = int(rng.choice(8, p=p))
        msg, _ = enc.encode(p, x)
        x_hat = dec.decode(p, msg)
        dec.feedback(0)
        assert enc.feedback(0) == x_hat
        assert enc.lam == dec.lam
        lams.append(enc.lam)
    assert min(lams) >= -0.1 * (1 - 0.2) - 1e-12


def test_telescoping():
    rng = np.random.default_rng(8)
    eta, lam0, D, T = 0.1, 0.1, 0.3, 2000
    enc = OCSCEncoder(D, eta=eta, lambda0=lam0)
    misses = 0
    for _ in range(T):
        p = rng.dirichlet(np.ones(6))
        enc.encode(p, int(rng.integers(6)))
        misses += enc.set_miss
        enc.feedback(0)
    assert misses / T - D - (lam0 - enc.lam) / (eta * T) == pytest.approx(0, abs=1e-7)
