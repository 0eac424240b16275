"""Run configuration: JSON file sections plus flat overrides."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

SCHEMES = ("ocsc", "ocrdc", "ca-ocsc", "ca-ocrdc", "llmzip-dropout", "block-csc", "block-crdc")

_ALIASES = {
    "llmzipdropout": "llmzip-dropout",
    "dropout": "llmzip-dropout",
    "blockcsc": "block-csc",
    "blockcrdc": "block-crdc",
    "caocsc": "ca-ocsc",
    "caocrdc": "ca-ocrdc",
}


def normalize_scheme(name: str) -> str:
    key = name.strip().lower().replace("_", "-")
    if key in SCHEMES:
        return key
    key = _ALIASES.get(key.replace("-", ""))
    if key is None:
        raise ValueError(f"unknown scheme {name!r}; choose from {', '.join(SCHEMES)}")
    return key


def _default_source():
    return {"kind": "markov", "order": 2, "concentration": 0.05, "unigram_weight": 0.6,
            "zipf_exponent": 2.0, "model_seed": 0}


def _default_predictor():
    return {"kind": "markov", "order": 2, "alpha": 0.05, "train_length": 200000,
            "train_seed": 12345, "online": False}


@dataclass
class RunConfig:
    scheme: str = "ocsc"
    alphabet_size: int = 64
    T: int = 3000
    D: float = 0.2
    eta: float = 0.1
    lambda0: float = 0.1
    epsilon: float | None = None
    seed: int = 0
    source: dict = field(default_factory=_default_source)
    predictor: dict = field(default_factory=_default_predictor)
    distortion: dict = field(default_factory=lambda: {"kind": "outage"})
    channel: dict = field(default_factory=lambda: {"kind": "ideal"})
    envelope: dict | None = None  # {"A": float, "psi": [family, c]} for deterministic channels
    block: dict = field(default_factory=lambda: {"grid_size": 40})
    window: int = 250
    output: dict = field(default_factory=lambda: {"dir": None, "trace": True, "trace_bits": False})

    def __post_init__(self):
        self.scheme = normalize_scheme(self.scheme)
        if self.T < 1:
            raise ValueError("horizon T must be positive")
        if self.alphabet_size < 2:
            raise ValueError("alphabet needs at least 2 symbols")
        if self.eta < 0:
            raise ValueError("step size eta must be non-negative")
        if self.scheme in ("ocsc", "block-csc") and self.distortion.get("kind", "outage") != "outage":
            raise ValueError(f"{self.scheme} is defined for the outage distortion only")
        if self.scheme.startswith("ca-"):
            eps = self.resolved_epsilon
            if not 0 < eps < self.D:
                raise ValueError(f"channel-adaptive schemes need 0 < epsilon < D (epsilon={eps}, D={self.D})")

    @property
    def resolved_epsilon(self) -> float:
        return min(0.05, self.D / 2) if self.epsilon is None else self.epsilon

    def to_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> "RunConfig":
        data = copy.deepcopy(self.to_dict())
        data.update(changes)
        return RunConfig(**data)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        hyper = data.pop("hyperparameters", None) or {}
        data.update(hyper)
        scheme = data.get("scheme")
        if isinstance(scheme, dict):
            data["scheme"] = scheme["name"]
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def parse_channel(spec: str) -> dict:
    """Short channel syntax for the command line.

    ``ideal``, ``bernoulli:E``, ``periodic:PERIOD[,PHASE]``,
    ``ge:A,B[,E_B,E_G]``, or an inline JSON object.
    """
    spec = spec.strip()
    if spec.startswith("{"):
        return json.loads(spec)
    kind, _, args = spec.partition(":")
    vals = [float(v) for v in args.split(",") if v]
    kind = kind.lower()
    if kind == "ideal":
        return {"kind": "ideal"}
    if kind == "bernoulli":
        return {"kind": "bernoulli", "e": vals[0]}
    if kind == "periodic":
        out = {"kind": "deterministic", "period": int(vals[0])}
        if len(vals) > 1:
            out["phase"] = int(vals[1])
        return out
    if kind in ("ge", "gilbert-elliott", "gilbert_elliott"):
        e_B, e_G = (vals[2], vals[3]) if len(vals) >= 4 else (1.0, 0.0)
        return {"kind": "gilbert_elliott", "a": vals[0], "b": vals[1], "e_B": e_B, "e_G": e_G}
    raise ValueError(f"cannot parse channel spec {spec!r}")


def finite_or_none(x: float):
    return x if math.isfinite(x) else None
