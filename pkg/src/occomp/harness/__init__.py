"""Simulation harness: configs, episode runner, baselines, sweeps and the CLI."""

from .config import RunConfig, parse_channel
from .runner import EpisodeTrace, block_search, run_episode, simulate
from .sweep import sweep

__all__ = ["RunConfig", "parse_channel", "EpisodeTrace", "block_search", "run_episode", "simulate", "sweep"]
