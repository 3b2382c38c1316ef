"""Binary search model: each option is feasible with probability p and worth
(x, y) if so; learning feasibility costs c.

The principal's own optimal search opens options in decreasing
``z = x - c/p``.  Under a threshold mechanism the agent opens the eligible
options in decreasing ``w = y - c/p`` and proposes the first feasible one.
Values here are exact closed forms, cross-checked by enumerating all 2^m
feasibility outcomes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import mc
from .distributions import Dist1D
from .prophet import Pool, ThresholdRule, evaluate_rule, median_of_max_threshold

FEAS_TOL = 1e-12
MAX_ENUM = 16


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    c: float
    p: float

    def __post_init__(self):
        for name in ("x", "y", "c"):
            if not getattr(self, name) >= 0.0:
                raise ValueError(f"{name} must be non-negative")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if self.c > self.p * self.y + FEAS_TOL:
            raise ValueError(f"cost {self.c} exceeds p*y = {self.p * self.y}")

    @property
    def z(self) -> float:
        return self.x - self.c / self.p

    @property
    def w(self) -> float:
        # c <= p*y up to rounding; clamp so w stays non-negative
        return max(0.0, self.y - self.c / self.p)

    @property
    def net(self) -> float:
        """Expected value of opening this box and taking it if feasible."""
        return -self.c + self.p * self.x


@dataclass(frozen=True)
class BoxInstance:
    boxes: tuple

    def __post_init__(self):
        object.__setattr__(self, "boxes", tuple(b if isinstance(b, Box) else Box(**b) for b in self.boxes))

    @classmethod
    def from_rows(cls, rows) -> "BoxInstance":
        return cls(tuple(Box(*r) for r in rows))

    @property
    def m(self) -> int:
        return len(self.boxes)

    def restrict(self, idx: Sequence[int]) -> "BoxInstance":
        return BoxInstance(tuple(self.boxes[i] for i in idx))


@dataclass(frozen=True)
class Interval:
    """Half-line (theta, inf) when strict, [theta, inf) otherwise."""

    theta: float
    strict: bool = False

    def __contains__(self, v: float) -> bool:
        return v > self.theta if self.strict else v >= self.theta

    def __str__(self) -> str:
        return f"{'(' if self.strict else '['}{self.theta:.12g},inf)"


def priorities(inst: BoxInstance):
    return [b.z for b in inst.boxes], [b.w for b in inst.boxes]


def _chain_value(inst: BoxInstance, order: Sequence[int], net: bool = True) -> float:
    """Open boxes in ``order``, stop at the first feasible one."""
    survive, terms = 1.0, []
    for i in order:
        b = inst.boxes[i]
        terms.append(survive * ((-b.c if net else 0.0) + b.p * b.x))
        survive *= 1.0 - b.p
    return math.fsum(terms)


def weitzman_order(inst: BoxInstance) -> list[int]:
    pos = [i for i, b in enumerate(inst.boxes) if b.z > 0]
    return sorted(pos, key=lambda i: (-inst.boxes[i].z, i))


def weitzman_value(inst: BoxInstance) -> float:
    """Principal's optimal autonomous net value.

    The first feasible box in z-order is always taken: its x is at least its
    z, which is at least every remaining z.
    """
    return _chain_value(inst, weitzman_order(inst))


def expected_max_kappa(inst: BoxInstance, T: Optional[Sequence[int]] = None) -> float:
    """E[max over T of the positive part of min(prize, z)]; prize is x or 0."""
    T = range(inst.m) if T is None else T
    order = sorted((i for i in T if inst.boxes[i].z > 0), key=lambda i: -inst.boxes[i].z)
    survive, terms = 1.0, []
    for i in order:
        b = inst.boxes[i]
        terms.append(survive * b.p * b.z)
        survive *= 1.0 - b.p
    return math.fsum(terms)


def agent_order(inst: BoxInstance, X: Interval) -> list[int]:
    """Eligible boxes by w descending, then z descending, then index."""
    elig = [i for i, b in enumerate(inst.boxes) if b.z > 0 and b.z in X]
    return sorted(elig, key=lambda i: (-inst.boxes[i].w, -inst.boxes[i].z, i))


def mechanism_value_mx(inst: BoxInstance, X: Interval, order: Optional[Sequence[int]] = None,
                       net: bool = True) -> float:
    """Principal's expected value under M(X), minus all inspection costs.

    ``order`` overrides the agent's tie-breaking; ``net=False`` leaves the
    costs out.
    """
    if X.theta < 0:
        raise ValueError("threshold must be non-negative")
    return _chain_value(inst, agent_order(inst, X) if order is None else order, net)


def tie_orders(inst: BoxInstance, X: Interval):
    """Every agent order consistent with non-increasing w."""
    groups = itertools.groupby(agent_order(inst, X), key=lambda i: inst.boxes[i].w)
    blocks = [list(g) for _, g in groups]
    for perm in itertools.product(*(itertools.permutations(b) for b in blocks)):
        yield [i for block in perm for i in block]


def kappa_dist(b: Box) -> Dist1D:
    """Law of min(prize, z): z if feasible, min(0, z) otherwise."""
    lo = min(0.0, b.z)
    if b.p >= 1.0 or lo == b.z:
        return Dist1D.point(b.z)
    return Dist1D(atoms=((b.z, b.p), (lo, 1.0 - b.p)))


def kappa_threshold_value(inst: BoxInstance, X: Interval) -> float:
    """Expected kappa picked by the first-in-X rule, boxes taken in the agent's order."""
    order = sorted(range(inst.m), key=lambda i: (-inst.boxes[i].w, -inst.boxes[i].z, i))
    if not order:
        return 0.0
    pool = Pool(tuple(kappa_dist(inst.boxes[i]) for i in order), (1,) * len(order))
    return evaluate_rule(ThresholdRule(X.theta, X.strict), pool).value


@dataclass(frozen=True)
class Enumeration:
    value: float
    opened: np.ndarray
    selected: np.ndarray
    feasible: np.ndarray
    prob: np.ndarray


def enumerate_outcomes(inst: BoxInstance, order: Sequence[int], net: bool = True) -> Enumeration:
    """Walk ``order`` on every feasibility vector; record opened and selected boxes."""
    m = inst.m
    if m > MAX_ENUM:
        raise ValueError(f"enumeration limited to {MAX_ENUM} boxes")
    feas = ((np.arange(2 ** m)[:, None] >> np.arange(m)) & 1).astype(bool)
    p = np.array([b.p for b in inst.boxes])
    prob = np.prod(np.where(feas, p, 1.0 - p), axis=1)
    rows = 2 ** m
    opened = np.zeros((rows, m), dtype=bool)
    selected = np.full(rows, -1)
    value = np.zeros(rows)
    active = np.ones(rows, dtype=bool)
    for i in order:
        b = inst.boxes[i]
        opened[:, i] = active
        if net:
            value -= np.where(active, b.c, 0.0)
        hit = active & feas[:, i]
        value += np.where(hit, b.x, 0.0)
        selected[hit] = i
        active &= ~hit
    return Enumeration(math.fsum(prob * value), opened, selected, feas, prob)


def best_threshold_mechanism(inst: BoxInstance):
    """Best M(X) over all distinct eligible sets, plus the median-of-max-kappa choice.

    Returns ``(X*, value, X_constructive, value_constructive)``.
    """
    # weak forms first so ties report the closed interval at the smallest eligible z
    zs = sorted({b.z for b in inst.boxes if b.z > 0})
    cands = [Interval(z, False) for z in zs] + [Interval(0.0, True), Interval(0.0, False)]
    cands += [Interval(z, True) for z in zs]
    vals = [mechanism_value_mx(inst, X) for X in cands]
    k = int(np.argmax(vals))
    pos = [b for b in inst.boxes if b.z > 0]
    if not pos:
        return cands[0], 0.0, cands[0], 0.0
    theta = median_of_max_threshold([kappa_dist(b) for b in pos], [1] * len(pos))[0]
    theta = max(theta, 0.0)
    strict, weak = Interval(theta, True), Interval(theta, False)
    vs, vw = mechanism_value_mx(inst, strict), mechanism_value_mx(inst, weak)
    cx, cv = (strict, vs) if vs > vw else (weak, vw)
    return cands[k], vals[k], cx, cv


Policy = Union[str, Interval]


def simulate_policy(inst: BoxInstance, policy: Policy, trials: int, seed: int,
                    stream: int = 0) -> mc.Estimate:
    """Monte Carlo net value of ``"weitzman"`` or M(X) for an Interval."""
    if trials < 1:
        raise ValueError("trials must be positive")
    order = weitzman_order(inst) if policy == "weitzman" else agent_order(inst, policy)
    p = np.array([b.p for b in inst.boxes])

    def draw(rng, size):
        feas = rng.random((size, inst.m)) < p
        value = np.zeros(size)
        active = np.ones(size, dtype=bool)
        for i in order:
            b = inst.boxes[i]
            value -= np.where(active, b.c, 0.0)
            hit = active & feas[:, i]
            value += np.where(hit, b.x, 0.0)
            active &= ~hit
        return value

    return mc.run_trials(draw, trials, seed, stream)


def random_instance(rng: np.random.Generator, m: int, hi: float = 10.0) -> BoxInstance:
    """x, y uniform on [0, hi], p uniform on [0.1, 1], c uniform on [0, p*y]."""
    x, y = rng.uniform(0, hi, m), rng.uniform(0, hi, m)
    p = rng.uniform(0.1, 1.0, m)
    c = rng.uniform(0, 1, m) * p * y
    return BoxInstance(tuple(Box(*map(float, r)) for r in zip(x, y, c, p)))
