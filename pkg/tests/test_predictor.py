import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occomp.predictor import (MarkovPredictor, ScriptedPredictor, UniformPredictor, assumption_bound_L,
                              load_symbols, online_update, predict, smoothed)


def test_uniform():
    p = predict(UniformPredictor(4), [1, 2, 3])
    assert np.allclose(p, 0.25)
    assert assumption_bound_L(UniformPredictor(4)) == pytest.approx(2.0)


def test_order0_mixture_example():
    model = MarkovPredictor.from_counts([3, 1, 0, 0], alpha=0.4)
    assert np.allclose(model.predict([]), [0.55, 0.25, 0.1, 0.1])


def test_order1_tables_match_oracle(frozen):
    ref = frozen["markov_order1"]
    model = MarkovPredictor(ref["size"], order=1, alpha=ref["alpha"]).fit(ref["train"])
    for ctx, want in ref["tables"].items():
        assert np.allclose(model.predict([int(ctx)]), want, atol=1e-15)


def test_online_counts_match_offline_recount(frozen):
    ref = frozen["markov_stream"]
    model = MarkovPredictor(ref["size"], order=1)
    hist = []
    for s in ref["stream"]:
        online_update(model, hist, s)
        hist.append(s)
    for ctx, counts in ref["counts"].items():
        assert model.table((int(ctx),)).tolist() == counts


def test_order0_online_update():
    model = MarkovPredictor.from_counts([0, 0], alpha=0.1)
    model.update([], 1)
    model.update([1], 1)
    assert model.table(()).tolist() == [0, 2]


def test_uniform_update_is_noop():
    u = UniformPredictor(3)
    before = u.predict([]).copy()
    assert online_update(u, [0], 2) is u
    assert np.array_equal(u.predict([0, 2]), before)


@pytest.mark.parametrize("size, alpha, L", [(4, 1.0, 2.0), (32, 0.5, 6.0)])
def test_bound_L(size, alpha, L):
    assert assumption_bound_L(MarkovPredictor(size, alpha=alpha)) == pytest.approx(L)


def test_bound_L_large_vocabulary():
    L = assumption_bound_L(MarkovPredictor(50257, alpha=1.0))
    assert L == pytest.approx(15.617, abs=1e-3) and math.ceil(L) == 16


def test_scripted_without_floor_is_unbounded():
    s = ScriptedPredictor([[0.5, 0.5], [1.0, 0.0]])
    assert assumption_bound_L(s) == math.inf
    assert np.array_equal(s.predict([0]), [1.0, 0.0])
    with pytest.raises(IndexError):
        s.predict([0, 0])


def test_scripted_floor_is_checked():
    with pytest.raises(ValueError):
        ScriptedPredictor([[0.9, 0.1]], floor=0.2)
    assert assumption_bound_L(ScriptedPredictor([[0.75, 0.25]], floor=0.25)) == pytest.approx(2.0)


def test_scripted_jsonl(tmp_path):
    path = tmp_path / "script.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in [[0.2, 0.8], [0.6, 0.4]]) + "\n")
    s = ScriptedPredictor.from_jsonl(path)
    assert np.array_equal(s.predict([5]), [0.6, 0.4])


def test_unseen_context_falls_back_to_marginal():
    model = MarkovPredictor(3, order=2, alpha=0.0 + 0.3).fit([0, 0, 1, 0, 0, 1])
    marginal = model.predict([2, 2])
    assert np.allclose(marginal, 0.7 * np.array([4, 2, 0]) / 6 + 0.1)
    assert np.allclose(model.predict([1]), marginal)


def test_empty_model_is_uniform():
    assert np.allclose(MarkovPredictor(5, order=1).predict([3]), 0.2)


def test_load_symbols(tmp_path):
    j = tmp_path / "s.json"
    j.write_text("[1, 2, 3]")
    b = tmp_path / "s.bin"
    b.write_bytes(np.array([7, 300, 0], dtype="<u2").tobytes())
    assert load_symbols(j).tolist() == [1, 2, 3]
    assert load_symbols(b).tolist() == [7, 300, 0]


def test_smoothed_rows():
    out = smoothed([[1.0, 0.0], [0.5, 0.5]], 0.2)
    assert np.allclose(out, [[0.9, 0.1], [0.5, 0.5]])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.integers(0, 3), st.floats(0.01, 1.0),
       st.lists(st.integers(0, 11), max_size=80), st.lists(st.integers(0, 11), max_size=6))
def test_floor_and_normalization(size, order, alpha, train, ctx):
    train = [s % size for s in train]
    ctx = [s % size for s in ctx]
    model = MarkovPredictor(size, order=order, alpha=alpha).fit(train)
    p = model.predict(ctx)
    assert abs(p.sum() - 1.0) <= 1e-9
    assert p.min() >= alpha / size * (1 - 1e-12)
    assert np.max(-np.log2(p)) <= assumption_bound_L(model) + 1e-9
    # determinism: a fresh model with the same state gives the same bits
    again = MarkovPredictor(size, order=order, alpha=alpha).fit(train).predict(ctx)
    assert np.array_equal(p, again)


def test_only_last_k_symbols_matter():
    rng = np.random.default_rng(1)
    model = MarkovPredictor(6, order=2).fit(rng.integers(0, 6, 500))
    assert np.array_equal(model.predict([0, 1, 4, 2]), model.predict([5, 5, 4, 2]))
