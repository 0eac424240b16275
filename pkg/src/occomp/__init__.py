"""Prediction-powered zero-delay lossy compression with long-term distortion control.

Two online schemes adapt a single parameter from the running distortion:
threshold coding for the outage distortion (``ocsc``) and slope-based
rate-distortion coding for general bounded distortions (``ocrdc``). Both have
channel-adaptive variants that stay synchronized over an erasure channel with
one-bit feedback.
"""

from .core import Alphabet, DistortionMeasure, cosine_matrix_from_embeddings, outage_measure
from .entropy_code import Codebook, Message, build_codebook, decode, encode
from .ocrdc import OCRDCDecoder, OCRDCEncoder
from .ocsc import OCSCDecoder, OCSCEncoder
from .predictor import MarkovPredictor, ScriptedPredictor, UniformPredictor

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "DistortionMeasure", "cosine_matrix_from_embeddings", "outage_measure",
    "Codebook", "Message", "build_codebook", "decode", "encode",
    "OCRDCDecoder", "OCRDCEncoder", "OCSCDecoder", "OCSCEncoder",
    "MarkovPredictor", "ScriptedPredictor", "UniformPredictor",
]
