"""Episode runner: source -> predictor -> encoder -> channel -> decoder, with feedback.

Encoder and decoder each hold their own predictor copy and their own
reconstructed history; the encoder learns the erasure bit only after the
decoder has produced its output, and mirrors that output from the feedback.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .. import bounds
from ..ca_controller import true_channel_distortion
from ..channel import (BernoulliChannel, DeterministicChannel, GilbertElliottChannel, IdealChannel,
                       periodic_pattern)
from ..core import cosine_matrix_from_embeddings, load_embeddings, outage_measure, random_embeddings
from ..core import DistortionMeasure
from ..entropy_code import bits_to_bytes
from ..ocrdc import OCRDCDecoder, OCRDCEncoder
from ..ocsc import OCSCDecoder, OCSCEncoder
from ..predictor import (MarkovPredictor, ScriptedPredictor, UniformPredictor, assumption_bound_L,
                         load_symbols)
from .baselines import DropoutDecoder, DropoutEncoder, default_grid, select_block_parameter
from .config import RunConfig, finite_or_none
from .sources import MarkovSource, SourceSample, adversarial_script, nonstationary_source

OUTAGE_MARK = -1

TRACE_FIELDS = ("t", "x", "x_tilde", "x_hat", "b", "ideal_bits", "E", "lam", "s", "delta_ch",
                "delta_ch_bound", "delta_tgt", "Q", "d", "outage", "set_miss", "masked_miss", "sync")

_INT_FIELDS = {"t", "x", "x_tilde", "x_hat", "b", "E", "outage", "set_miss", "masked_miss", "sync"}


@dataclass
class EpisodeTrace:
    """Per-step records stored column-wise; ``steps()`` yields one dict per step."""

    T: int
    columns: dict
    lambda_final: float
    decoder_lambda_mismatches: int = 0
    messages: list | None = None

    def __getattr__(self, name):
        cols = self.__dict__.get("columns")
        if cols is not None and name in cols:
            return cols[name]
        raise AttributeError(name)

    def steps(self):
        cols = [(k, self.columns[k]) for k in TRACE_FIELDS]
        for i in range(self.T):
            row = {}
            for k, arr in cols:
                v = arr[i]
                if k in _INT_FIELDS:
                    row[k] = int(v)
                else:
                    # the lossless slope is infinite; JSON has no literal for it
                    row[k] = float(v) if math.isfinite(v) else None
            if self.messages is not None:
                row["msg"] = self.messages[i]
            yield row

    def write_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            for row in self.steps():
                fh.write(json.dumps(row, separators=(",", ":")) + "\n")

    @classmethod
    def read_jsonl(cls, path, lambda_final: float | None = None) -> "EpisodeTrace":
        rows = [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]
        if not rows:
            raise ValueError(f"{path}: empty trace")
        missing = [k for k in TRACE_FIELDS if k not in rows[0]]
        if missing:
            raise ValueError(f"{path}: trace lacks fields {missing}")
        cols = {k: np.array([math.inf if r[k] is None else r[k] for r in rows],
                            dtype=np.int64 if k in _INT_FIELDS else np.float64)
                for k in TRACE_FIELDS}
        if lambda_final is None:
            lambda_final = float(cols["lam"][-1])
        return cls(len(rows), cols, lambda_final)


@dataclass
class Components:
    symbols: np.ndarray
    boundaries: list
    predictor: object
    measure: DistortionMeasure
    L: float
    extra: dict = field(default_factory=dict)


def _child_seeds(seed: int, n: int = 4) -> list:
    return [int(c.generate_state(1)[0]) for c in np.random.SeedSequence(seed).spawn(n)]


_SOURCE_DEFAULTS = {"order": 2, "concentration": 0.05, "model_seed": 0, "unigram_weight": 0.6,
                    "zipf_exponent": 2.0}


def _source_params(spec: dict) -> tuple:
    return tuple(spec.get(k, v) for k, v in _SOURCE_DEFAULTS.items())


@lru_cache(maxsize=16)
def _trained_markov(size, src_params, order, alpha, train_length, train_seed):
    src = MarkovSource(size, *src_params)
    corpus = src.sample(train_length, np.random.default_rng(train_seed))
    return MarkovPredictor(size, order=order, alpha=alpha).fit(corpus)


def _markov_source(spec: dict, size: int) -> MarkovSource:
    return MarkovSource(size, *_source_params(spec))


def build_source(cfg: RunConfig, seed: int) -> SourceSample:
    spec = cfg.source
    kind = spec.get("kind", "markov")
    rng = np.random.default_rng(seed)
    if kind == "markov":
        return SourceSample(_markov_source(spec, cfg.alphabet_size).sample(cfg.T, rng))
    if kind == "concat":
        parts = [_markov_source(p, cfg.alphabet_size) for p in spec["parts"]]
        lengths = spec.get("lengths") or [cfg.T // len(parts)] * len(parts)
        if sum(lengths) != cfg.T:
            raise ValueError("concatenated source lengths must sum to T")
        return nonstationary_source(parts, lengths, seed)
    if kind == "file":
        symbols = load_symbols(spec["path"])[: cfg.T]
        if symbols.size < cfg.T:
            raise ValueError(f"source file holds {symbols.size} symbols, need T={cfg.T}")
        return SourceSample(symbols)
    raise ValueError(f"unknown source kind {kind!r}")


def build_predictor(cfg: RunConfig):
    spec = cfg.predictor
    kind = spec.get("kind", "markov")
    size = cfg.alphabet_size
    if kind == "uniform":
        return UniformPredictor(size)
    if kind == "markov":
        alpha = spec.get("alpha", 0.05)
        order = spec.get("order", 2)
        if spec.get("train_path"):
            return MarkovPredictor(size, order, alpha).fit(load_symbols(spec["train_path"]))
        src = cfg.source if cfg.source.get("kind", "markov") == "markov" else cfg.source.get("parts", [{}])[0]
        if spec.get("train_length", 0) <= 0:
            return MarkovPredictor(size, order, alpha)
        return _trained_markov(size, _source_params(src), order, alpha, spec["train_length"],
                               spec.get("train_seed", 12345))
    if kind == "scripted":
        return ScriptedPredictor.from_jsonl(spec["path"], floor=spec.get("floor"))
    raise ValueError(f"unknown predictor kind {kind!r}")


def build_measure(cfg: RunConfig) -> DistortionMeasure:
    spec = cfg.distortion
    kind = spec.get("kind", "outage")
    size = cfg.alphabet_size
    if kind == "outage":
        return outage_measure(size)
    if kind == "cosine":
        if spec.get("path"):
            emb = load_embeddings(spec["path"])
        else:
            emb = random_embeddings(size, spec.get("dim", 16), spec.get("seed", 0))
        if emb.shape[0] != size:
            raise ValueError("embedding table size differs from the alphabet size")
        return cosine_matrix_from_embeddings(emb)
    if kind == "matrix":
        mat = np.asarray(json.loads(Path(spec["path"]).read_text()), dtype=np.float64)
        return DistortionMeasure("matrix", size, matrix=mat, d_max=spec.get("d_max", float(mat.max())))
    raise ValueError(f"unknown distortion kind {kind!r}")


def build_channel(cfg: RunConfig, seed: int):
    spec = cfg.channel
    kind = spec.get("kind", "ideal")
    if kind == "ideal":
        return IdealChannel()
    if kind == "bernoulli":
        sched = spec.get("schedule")
        if spec.get("schedule_path"):
            sched = json.loads(Path(spec["schedule_path"]).read_text())
        return BernoulliChannel(spec.get("e", 0.0), schedule=sched, seed=seed)
    if kind == "deterministic":
        if "pattern" in spec:
            pattern = spec["pattern"]
        elif "pattern_path" in spec:
            pattern = json.loads(Path(spec["pattern_path"]).read_text())
        else:
            pattern = periodic_pattern(int(spec["period"]), cfg.T, int(spec.get("phase", 0)))
        return DeterministicChannel(pattern, wrap=spec.get("wrap", True))
    if kind in ("gilbert_elliott", "gilbert-elliott", "ge"):
        return GilbertElliottChannel(spec["a"], spec["b"], spec.get("e_B", 1.0), spec.get("e_G", 0.0),
                                     initial_state=spec.get("initial_state"), seed=seed)
    raise ValueError(f"unknown channel kind {kind!r}")


def build_components(cfg: RunConfig) -> Components:
    src_seed = _child_seeds(cfg.seed)[0]
    measure = build_measure(cfg)
    if cfg.source.get("kind") == "adversarial" or cfg.predictor.get("kind") == "adversarial":
        alpha = cfg.predictor.get("alpha", 0.05)
        dists, symbols = adversarial_script(cfg.alphabet_size, cfg.T, seed=src_seed, alpha=alpha,
                                            concentration=cfg.predictor.get("concentration", 0.05),
                                            mix=cfg.source.get("mix", 0.5))
        pred = ScriptedPredictor(dists, floor=alpha / cfg.alphabet_size * (1 - 1e-9))
        return Components(symbols, [], pred, measure, assumption_bound_L(pred))
    sample = build_source(cfg, src_seed)
    pred = build_predictor(cfg)
    return Components(sample.symbols, sample.boundaries, pred, measure, assumption_bound_L(pred))


def build_scheme(cfg: RunConfig, measure, dropout_seed: int = 0, fixed_s: float | None = None):
    """Encoder/decoder pair for the configured scheme.

    Block schemes run with a frozen parameter ``fixed_s`` (no adaptation).
    """
    scheme, D, eta, lam0 = cfg.scheme, cfg.D, cfg.eta, cfg.lambda0
    eps = cfg.resolved_epsilon
    if scheme in ("ocsc", "ca-ocsc"):
        ca = scheme == "ca-ocsc"
        kw = dict(D=D, eta=eta, lambda0=lam0, epsilon=eps if ca else None, adaptive=ca)
        return OCSCEncoder(**kw), OCSCDecoder(**kw)
    if scheme in ("ocrdc", "ca-ocrdc"):
        ca = scheme == "ca-ocrdc"
        return (OCRDCEncoder(D, measure, eta, lam0, epsilon=eps if ca else None, adaptive=ca),
                OCRDCDecoder())
    if scheme == "llmzip-dropout":
        return DropoutEncoder(D, dropout_seed), DropoutDecoder(D, dropout_seed)
    if scheme == "block-csc":
        return (OCSCEncoder(D, eta=0.0, lambda0=fixed_s), OCSCDecoder(D, eta=0.0, lambda0=fixed_s))
    if scheme == "block-crdc":
        return OCRDCEncoder(D, measure, eta=0.0, lambda0=fixed_s), OCRDCDecoder()
    raise ValueError(scheme)


def simulate(symbols, encoder, decoder, predictor, channel, measure, *, online: bool = False,
             decoder_predictor=None, keep_bits: bool = False) -> EpisodeTrace:
    """Run the zero-delay feedback loop over ``symbols`` and record every step."""
    T = len(symbols)
    pred_e = predictor
    if decoder_predictor is not None:
        pred_d = decoder_predictor
    else:
        # a frozen predictor is a pure function of the history and can be shared
        pred_d = copy.deepcopy(predictor) if online else predictor
    hist_e: list = []
    hist_d: list = []
    rows = []
    messages = [] if keep_bits else None
    lam_mismatch = 0
    replica = hasattr(decoder, "lam")
    fam = "ocsc" if isinstance(encoder, OCSCEncoder) else "ocrdc"
    mrow = measure.row
    size = measure.size
    log2 = math.log2

    for i in range(T):
        x = int(symbols[i])
        lam, s = encoder.lam, encoder.s
        p_e = pred_e.predict(hist_e)
        p_d = pred_d.predict(hist_d)
        msg, x_tilde = encoder.encode(p_e, x)
        step = channel.transmit(i + 1, msg)
        erased = step.erased
        x_hat = decoder.decode(p_d, step.delivered)
        decoder.feedback(erased)
        x_free = encoder.erasure_free_output()
        x_mirror = encoder.feedback(erased)
        if replica and decoder.lam != encoder.lam:
            lam_mismatch += 1
        ctrl = encoder.controller
        if msg is None:
            b, ideal = 0, 0.0
        else:
            b, ideal = msg.length, -log2(encoder.coded_prob)
        miss = encoder.set_miss
        rows.append((
            i + 1, x, OUTAGE_MARK if x_tilde < 0 or x_tilde >= size else x_tilde, x_hat, b, ideal, erased,
            lam, s, true_channel_distortion(fam, erased, x, p_e, x_free, x_hat, measure, x_free),
            encoder.delta_ch_bound, encoder.delta_tgt, ctrl.q if ctrl is not None else 0.0,
            mrow(x)[x_hat], int(x_hat != x), miss, (1 - erased) * miss, int(x_mirror == x_hat)))
        if keep_bits:
            messages.append(None if msg is None else bits_to_bytes(msg.bits).hex() + f"/{b}")

        if online:
            pred_e.update(hist_e, x_mirror)
            pred_d.update(hist_d, x_hat)
        hist_e.append(x_mirror)
        hist_d.append(x_hat)

    cols = list(zip(*rows)) if rows else [()] * len(TRACE_FIELDS)
    f = {k: np.array(c, dtype=np.int64 if k in _INT_FIELDS else np.float64)
         for k, c in zip(TRACE_FIELDS, cols)}
    return EpisodeTrace(T, f, float(encoder.lam), lam_mismatch, messages)


@dataclass
class GuaranteeParams:
    scheme: str
    D: float
    eta: float
    lambda0: float
    epsilon: float
    L: float
    d_max: float
    A: float | None = None
    psi: object = None
    channel_deterministic: bool = False


def guarantee_params(cfg: RunConfig, L: float, d_max: float) -> GuaranteeParams:
    env = cfg.envelope or {}
    psi = env.get("psi")
    if isinstance(psi, list):
        psi = tuple(psi)
    return GuaranteeParams(cfg.scheme, cfg.D, cfg.eta, cfg.lambda0, cfg.resolved_epsilon, L, d_max,
                           env.get("A"), psi, cfg.channel.get("kind", "ideal") in ("ideal", "deterministic"))


THEOREMS = {
    "ocsc": ("thm1",),
    "ocrdc": ("thm2", "lemma1"),
    "ca-ocsc": ("prop1", "lemma2", "thm3", "queue"),
    "ca-ocrdc": ("prop1", "lemma2", "thm3", "queue"),
}


def evaluate_verdicts(trace: EpisodeTrace, params: GuaranteeParams) -> dict:
    return {name: bounds.verify(trace, name, params).to_dict() for name in THEOREMS.get(params.scheme, ())}


def moving_average(x, window: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if window < 1 or x.size < window:
        return np.zeros(0)
    c = np.concatenate(([0.0], np.cumsum(x)))
    return (c[window:] - c[:-window]) / window


def summarize(trace: EpisodeTrace, cfg: RunConfig, comp: Components, extra: dict | None = None) -> dict:
    params = guarantee_params(cfg, comp.L, comp.measure.d_max)
    verdicts = evaluate_verdicts(trace, params)
    b = trace.b
    summary = {
        "scheme": cfg.scheme,
        "seed": cfg.seed,
        "T": trace.T,
        "D": cfg.D,
        "R_T": float(b.sum()) / trace.T,
        "bits_total": int(b.sum()),
        "ideal_rate": float(trace.ideal_bits.mean()),
        "avg_distortion": float(trace.d.mean()),
        "outage_rate": float(trace.outage.mean()),
        "set_miss_rate": float(trace.set_miss.mean()),
        "masked_miss_rate": float(trace.masked_miss.mean()),
        "erasure_rate": float(trace.E.mean()),
        "lambda_final": trace.lambda_final,
        "lambda_max": float(max(trace.lam.max(), trace.lambda_final)),
        "lambda_min": float(min(trace.lam.min(), trace.lambda_final)),
        "Q_T": float(trace.Q[-1]),
        "Q_max": float(trace.Q.max()),
        "L": finite_or_none(comp.L),
        "d_max": comp.measure.d_max,
        "epsilon": cfg.resolved_epsilon if cfg.scheme.startswith("ca-") else None,
        "divergences": int(trace.T - trace.sync.sum()),
        "decoder_lambda_mismatches": trace.decoder_lambda_mismatches,
        "segment_boundaries": list(comp.boundaries),
        "verdicts": verdicts,
        "config": cfg.to_dict(),
    }
    if comp.boundaries:
        edges = [0, *comp.boundaries, trace.T]
        summary["segments"] = [
            {"start": a, "end": z, "avg_distortion": float(trace.d[a:z].mean()),
             "outage_rate": float(trace.outage[a:z].mean()), "R": float(trace.b[a:z].mean())}
            for a, z in zip(edges[:-1], edges[1:])]
    if extra:
        summary.update(extra)
    return summary


def block_search(cfg: RunConfig, comp: Components | None = None, grid=None) -> dict:
    """Offline search of the fixed threshold/slope over the whole sequence (ideal channel)."""
    if cfg.scheme not in ("block-csc", "block-crdc"):
        raise ValueError("block search applies to block-csc and block-crdc")
    comp = comp or build_components(cfg)
    if grid is None:
        grid = default_grid(cfg.scheme, cfg.block.get("grid_size", 40), cfg.block.get("s_min"),
                            cfg.block.get("s_max"))
    dists, rates = [], []
    for s in grid:
        enc, dec = build_scheme(cfg, comp.measure, fixed_s=float(s))
        tr = simulate(comp.symbols, enc, dec, comp.predictor, IdealChannel(), comp.measure)
        dists.append(float(tr.outage.mean() if cfg.scheme == "block-csc" else tr.d.mean()))
        rates.append(float(tr.b.mean()))
    s_star = select_block_parameter(cfg.scheme, grid, dists, cfg.D)
    return {"s_star": s_star, "grid": [float(g) for g in grid], "distortion": dists, "rate": rates}


def run_episode(cfg: RunConfig, comp: Components | None = None, write: bool = True):
    """Run one configured episode; returns ``(trace, summary)`` and writes outputs if asked."""
    comp = comp or build_components(cfg)
    seeds = _child_seeds(cfg.seed)
    channel = build_channel(cfg, seeds[1])
    extra = {}
    fixed_s = None
    if cfg.scheme in ("block-csc", "block-crdc"):
        search = block_search(cfg, comp)
        fixed_s = search["s_star"]
        extra["block_search"] = search
        if fixed_s is None:
            raise RuntimeError(f"{cfg.scheme}: no grid parameter meets D={cfg.D}")
    enc, dec = build_scheme(cfg, comp.measure, dropout_seed=seeds[2], fixed_s=fixed_s)
    out = cfg.output or {}
    online = cfg.predictor.get("online", False)
    predictor = copy.deepcopy(comp.predictor) if online else comp.predictor
    trace = simulate(comp.symbols, enc, dec, predictor, channel, comp.measure, online=online,
                     keep_bits=out.get("trace_bits", False))
    summary = summarize(trace, cfg, comp, extra)
    if write and out.get("dir"):
        d = Path(out["dir"])
        d.mkdir(parents=True, exist_ok=True)
        stem = f"{cfg.scheme}_D{cfg.D:g}_seed{cfg.seed}"
        if out.get("trace", True):
            trace.write_jsonl(d / f"{stem}.trace.jsonl")
        (d / f"{stem}.summary.json").write_text(json.dumps(summary, indent=2))
    return trace, summary


def any_violation(summary: dict) -> bool:
    return any(v["status"] == bounds.VIOLATED for v in summary.get("verdicts", {}).values())
