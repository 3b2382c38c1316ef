"""Binary search with at most n of the m options inspected.

The adaptive optimum is computed exactly by a memoised recursion over the
set of unopened boxes and the best feasible value found so far.  The
mechanism fixes a non-adaptive set T of n boxes and runs the best M(X) on T.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .boxsearch import (BoxInstance, Interval, best_threshold_mechanism, expected_max_kappa,
                        weitzman_value)
from .prophet import CapabilityError

MAX_BOXES = 14


@dataclass(frozen=True)
class BudgetedInstance:
    base: BoxInstance
    budget: int

    def __post_init__(self):
        if not 1 <= self.budget < self.base.m:
            raise ValueError(f"budget must satisfy 1 <= n < m = {self.base.m}, got {self.budget}")


def adaptive_value(base: BoxInstance, budget: int) -> float:
    """Optimal expected net value of an adaptive search opening at most ``budget`` boxes."""
    boxes, m, n = base.boxes, base.m, int(budget)
    if m > MAX_BOXES:
        raise CapabilityError(f"exact adaptive optimum limited to {MAX_BOXES} boxes")
    levels = sorted({0.0} | {b.x for b in boxes})
    rank = {v: k for k, v in enumerate(levels)}
    up = [[rank[max(levels[k], b.x)] for k in range(len(levels))] for b in boxes]

    @lru_cache(maxsize=None)
    def V(avail: int, k: int) -> float:
        best = levels[k]
        # the remaining budget follows from how many boxes are already open
        if m - bin(avail).count("1") >= n:
            return best
        for i in range(m):
            if avail >> i & 1:
                b, rest = boxes[i], avail & ~(1 << i)
                v = -b.c + b.p * V(rest, up[i][k]) + (1.0 - b.p) * V(rest, k)
                best = max(best, v)
        return best

    return V((1 << m) - 1, 0)


def adaptive_opt(inst: BudgetedInstance) -> float:
    return adaptive_value(inst.base, inst.budget)


def _positive(inst: BudgetedInstance) -> list[int]:
    return [i for i, b in enumerate(inst.base.boxes) if b.z > 0]


def best_nonadaptive_set(inst: BudgetedInstance, method: str = "brute"):
    """Size-n set T maximising E[max kappa over T]; boxes with z <= 0 are dropped first.

    Returns ``(T, score)`` with T sorted.
    """
    pos = _positive(inst)
    size = min(inst.budget, len(pos))
    if method == "brute":
        if inst.base.m > MAX_BOXES:
            raise CapabilityError(f"brute-force set search limited to {MAX_BOXES} boxes")
        best, score = (), -math.inf
        for T in itertools.combinations(pos, size):
            s = expected_max_kappa(inst.base, T)
            if s > score:
                best, score = T, s
        return list(best), (0.0 if not best else score)
    if method == "greedy":
        T: list[int] = []
        for _ in range(size):
            gains = [(expected_max_kappa(inst.base, T + [i]), -i) for i in pos if i not in T]
            _, neg = max(gains)
            T.append(-neg)
        return sorted(T), expected_max_kappa(inst.base, T)
    raise ValueError(f"unknown method {method!r}")


def budgeted_mechanism_value(inst: BudgetedInstance):
    """Best M(X) restricted to the brute-force set T.  Returns ``(value, T, X)``."""
    T, _ = best_nonadaptive_set(inst, "brute")
    if not T:
        return 0.0, T, Interval(0.0, True)
    X, value, _, _ = best_threshold_mechanism(inst.base.restrict(T))
    return value, T, X


def restricted_weitzman(inst: BudgetedInstance, T: Sequence[int]) -> float:
    return weitzman_value(inst.base.restrict(T))
