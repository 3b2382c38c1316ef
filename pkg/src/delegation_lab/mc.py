"""Seeded Monte Carlo plumbing.

Streams come from a counter-based generator (Philox4x64-10) keyed by a
``SeedSequence`` with spawn key ``(stream, 0, chunk)`` for trials and
``(stream, 1, j)`` for auxiliary draws such as random instances.  Trials are cut into
fixed-size chunks, so a result depends only on (seed, stream, trials) and not
on how many workers ran the chunks.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

RNG_ID = "numpy-philox4x64-10/seedsequence-spawnkey(stream,0,chunk)/chunk=8192"
CHUNK = 8192
THREADS_ENV = "DELEGATION_LAB_THREADS"


def generator(seed: int, *key: int) -> np.random.Generator:
    """Independent stream for ``(seed, *key)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def aux_generator(seed: int, stream: int, j: int = 0) -> np.random.Generator:
    """Stream for non-trial randomness, disjoint from every trial chunk."""
    return generator(seed, stream, 1, j)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    n = int(raw)
    return n if n > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float = 0.0
    trials: int = 0

    @property
    def exact(self) -> bool:
        return self.trials == 0


def mean_stderr(values: np.ndarray) -> tuple[float, float]:
    """Mean and standard error with compensated summation."""
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def run_trials(draw: Callable[[np.random.Generator, int], np.ndarray], trials: int,
               seed: int, stream: int = 0) -> Estimate:
    """Run ``draw(rng, size)`` chunk by chunk and pool the per-trial values.

    ``draw`` must return one value per trial.  Chunks are concatenated in
    chunk order whatever the worker count.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    sizes = [CHUNK] * (trials // CHUNK)
    if trials % CHUNK:
        sizes.append(trials % CHUNK)

    def job(k: int) -> np.ndarray:
        out = np.asarray(draw(generator(seed, stream, 0, k), sizes[k]), dtype=float)
        if out.shape != (sizes[k],):
            raise ValueError("draw must return one value per trial")
        return out

    workers = min(worker_count(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(k) for k in range(len(sizes))]
    value, se = mean_stderr(np.concatenate(parts))
    return Estimate(value, se, trials)
