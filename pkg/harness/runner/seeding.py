"""
Per-trial reseeding.

Every trial gets fresh generator streams derived from (seed, task, model):

    stream_key = fnv1a_64(task) ^ fnv1a_64(model) ^ (seed mod 2**64)

Each stream is a Philox generator over SeedSequence(entropy=stream_key, spawn_key=(tag,)),
so streams are independent of each other, of scheduling order and of the platform.
"""

import random

import numpy as np
from pydantic import BaseModel, ConfigDict

from bench_sdk.utils import fnv1a_64

__all__ = ["STREAM_TAGS", "MASK_64", "GeneratorBundle", "stream_key", "make_stream", "reseed_all"]

MASK_64 = (1 << 64) - 1

STREAM_TAGS = {
    "model_init": 1,
    "data": 2,
    "trial_noise": 3,
    "py_random": 4,
}


class GeneratorBundle(BaseModel):
    """Seeded generator streams handed to one trial."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    key: int
    model_init: np.random.Generator
    data: np.random.Generator
    trial_noise: np.random.Generator
    py_random: random.Random


def stream_key(task: str, model: str, seed: int) -> int:
    return fnv1a_64(task) ^ fnv1a_64(model) ^ (seed & MASK_64)


def make_stream(key: int, tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=key, spawn_key=(tag,))))


def reseed_all(seed: int, task: str, model: str) -> GeneratorBundle:
    """
    Return deterministic generator streams for one (task, model, seed) trial.

    Identical inputs give identical streams; the model name enters the key, so two models
    on the same seed draw different noise.
    """
    key = stream_key(task, model, seed)
    py_seed = int(make_stream(key, STREAM_TAGS["py_random"]).integers(0, 2**63 - 1))
    return GeneratorBundle(
        key=key,
        model_init=make_stream(key, STREAM_TAGS["model_init"]),
        data=make_stream(key, STREAM_TAGS["data"]),
        trial_noise=make_stream(key, STREAM_TAGS["trial_noise"]),
        py_random=random.Random(py_seed),
    )
