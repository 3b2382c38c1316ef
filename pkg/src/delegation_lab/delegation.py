"""Single-proposal mechanisms and their link to stopping rules.

The agent samples n solutions ``(x, y)`` and proposes the eligible one he
likes best; the principal adopts it iff it lies in the eligible set R.
Mapping y to time through t = exp(-y) turns this into an oblivious stopping
rule: the agent's favourite is the earliest point.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import mc
from .distributions import DiscreteJoint, Dist1D, JointDist, ProductDist
from .numerics import DomainError, alpha_n, solve_alpha
from .prophet import (CapabilityError, JointPool, OdeRule, RegionRule, StoppingRule,
                      ThresholdRule, TimedPoint, better_of, discrete_pick_value, evaluate_rule, iid_threshold,
                      median_of_max_threshold, mixture_value, ode_rule, run_stopping_rule)


@dataclass(frozen=True)
class SolutionPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (self.x >= 0.0 and self.y >= 0.0):
            raise DomainError(f"utilities must be non-negative, got {(self.x, self.y)}")


# --------------------------------------------------------------------------
# eligible sets


@dataclass(frozen=True)
class XThreshold:
    theta: float
    strict: bool = True

    def contains(self, x, y):
        x = np.asarray(x, dtype=float)
        return x > self.theta if self.strict else x >= self.theta


@dataclass(frozen=True)
class Curve:
    """x > theta(y) (or >=), with theta non-decreasing in y."""

    theta_of_y: Callable[[np.ndarray], np.ndarray]
    strict: bool = True

    def contains(self, x, y):
        x = np.asarray(x, dtype=float)
        th = np.asarray(self.theta_of_y(np.asarray(y, dtype=float)), dtype=float)
        return x > th if self.strict else x >= th


@dataclass(frozen=True)
class Explicit:
    points: frozenset = field(default_factory=frozenset)

    def contains(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = np.zeros(x.shape, dtype=bool)
        for px, py in self.points:
            out |= (x == px) & (y == py)
        return out if out.ndim else bool(out)


@dataclass(frozen=True)
class _Constant:
    value: bool

    def contains(self, x, y):
        return np.full(np.broadcast_shapes(np.shape(x), np.shape(y)), self.value)


ALL = _Constant(True)
NONE = _Constant(False)

EligibleSet = Union[XThreshold, Curve, Explicit, _Constant]


def agent_best_response(samples: Sequence[SolutionPoint], R: EligibleSet) -> Optional[int]:
    """Index of the eligible sample with the largest y (lowest index on ties)."""
    best = None
    for i, s in enumerate(samples):
        if bool(R.contains(s.x, s.y)) and (best is None or s.y > samples[best].y):
            best = i
    return best


def run_spm(R: EligibleSet, samples: Sequence[SolutionPoint]) -> Optional[SolutionPoint]:
    i = agent_best_response(samples, R)
    return None if i is None else samples[i]


# --------------------------------------------------------------------------
# the time map


def y_to_time(y):
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("agent utility must be non-negative")
    t = np.exp(-y)
    return float(t) if t.ndim == 0 else t


def time_to_y(t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or np.any(t > 1):
        raise DomainError("time must lie in (0, 1]")
    y = -np.log(t)
    return float(y) if y.ndim == 0 else y


@dataclass(frozen=True)
class TimeLaw:
    """Law of exp(-Y): G(t) = P(Y >= -ln t)."""

    y: Dist1D

    @property
    def is_atomless(self) -> bool:
        return self.y.is_atomless

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            ly = -np.log(np.clip(t, 0.0, 1.0))
        out = np.where(t <= 0, 0.0, 1.0 - np.asarray(self.y.cdf_left(ly)))
        out = np.where(t >= 1, 1.0, out)
        return float(out) if out.ndim == 0 else out


def mechanism_from_rule(rule: StoppingRule) -> EligibleSet:
    """Eligible set {(x, y): (x, exp(-y)) accepted by the rule}."""
    if isinstance(rule, ThresholdRule):
        if rule.theta == -math.inf:
            return ALL
        if rule.theta == math.inf:
            return NONE
        return XThreshold(rule.theta, rule.strict)
    if isinstance(rule, (RegionRule, OdeRule)):
        return Curve(lambda y, r=rule: r.x_threshold(y_to_time(y)), rule.strict)
    raise TypeError(f"no eligible set for {type(rule).__name__}")


def bridge_equivalence_check(rule: StoppingRule, samples: Sequence[SolutionPoint],
                             R: Optional[EligibleSet] = None) -> bool:
    """Stopping rule on the timed samples picks the image of the mechanism's pick."""
    R = mechanism_from_rule(rule) if R is None else R
    timed = [TimedPoint(s.x, y_to_time(s.y)) for s in samples]
    picked = run_stopping_rule(rule, timed)
    proposal = run_spm(R, samples)
    if picked is None or proposal is None:
        return picked is None and proposal is None
    return picked == TimedPoint(proposal.x, y_to_time(proposal.y))


# --------------------------------------------------------------------------
# general mechanisms over a finite outcome set


class NotBestResponse(ValueError):
    """The supplied strategy leaves the agent a profitable deviation."""

    def __init__(self, sequence, signal, gain):
        super().__init__(f"on samples {sequence} sending {signal!r} gains {gain}")
        self.sequence, self.signal, self.gain = sequence, signal, gain


@dataclass(frozen=True)
class GeneralMechanism:
    """Signals, an allocation ``signal -> outcome index or None``, and a
    strategy ``sample-index tuple -> signal`` over ``omega``."""

    omega: tuple
    signals: tuple
    alloc: dict
    strategy: dict

    def utility(self, seq: tuple, signal) -> float:
        """Agent utility: y of a sampled outcome, 0 for None, -1 if unsampled."""
        out = self.alloc[signal]
        if out is None:
            return 0.0
        return self.omega[out].y if out in seq else -1.0

    def outcome(self, seq: tuple) -> Optional[int]:
        """Adopted outcome; an unsampled allocation leaves the status quo."""
        out = self.alloc[self.strategy[seq]]
        return out if out is not None and out in seq else None

    def deviation(self, seq: tuple):
        """Best strictly profitable (signal, gain) on ``seq``, or None."""
        base = self.utility(seq, self.strategy[seq])
        gains = [(self.utility(seq, s) - base, s) for s in self.signals]
        gain, sig = max(gains, key=lambda g: g[0])
        return (sig, gain) if gain > 0 else None


def sequences(m: int, n: int):
    return itertools.product(range(m), repeat=n)


def best_response_strategy(omega, signals, alloc, n: int) -> dict:
    """Per sequence, the first signal (in listed order) maximising agent utility."""
    probe = GeneralMechanism(tuple(omega), tuple(signals), dict(alloc), {})
    strat = {}
    for seq in sequences(len(omega), n):
        utils = [probe.utility(seq, s) for s in signals]
        strat[seq] = signals[int(np.argmax(utils))]
    return strat


def random_general_mechanism(rng: np.random.Generator, m: int, n: int,
                             signals: int) -> GeneralMechanism:
    """Random outcomes with distinct positive y, random allocation, best-response strategy."""
    ys = rng.permutation(m) + 1.0 + rng.random(m) * 0.5
    omega = tuple(SolutionPoint(float(rng.integers(0, 10)), float(y)) for y in ys)
    sig = tuple(f"s{k}" for k in range(signals))
    alloc = {s: (None if rng.random() < 0.2 else int(rng.integers(0, m))) for s in sig}
    return GeneralMechanism(omega, sig, alloc, best_response_strategy(omega, sig, alloc, n))


@dataclass(frozen=True)
class SpmReport:
    eligible: Explicit
    sequences_checked: int
    mismatches: tuple

    @property
    def passed(self) -> bool:
        return not self.mismatches


def spm_of_general(M: GeneralMechanism, n: int) -> SpmReport:
    """Single-proposal mechanism whose eligible set is the range of M's outcomes,
    checked against M on every sample sequence of length n."""
    seqs = list(sequences(len(M.omega), n))
    for seq in seqs:
        dev = M.deviation(seq)
        if dev is not None:
            raise NotBestResponse(seq, *dev)
    adopted = {seq: M.outcome(seq) for seq in seqs}
    R = Explicit(frozenset((M.omega[o].x, M.omega[o].y) for o in adopted.values() if o is not None))
    bad = []
    for seq in seqs:
        mine = run_spm(R, [M.omega[i] for i in seq])
        theirs = None if adopted[seq] is None else M.omega[adopted[seq]]
        if mine != theirs:
            bad.append((seq, theirs, mine))
    return SpmReport(R, len(seqs), tuple(bad))


# --------------------------------------------------------------------------
# mechanism payoff and the distributional guarantees


def _spm_payoff(R: EligibleSet, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    ok = np.asarray(R.contains(xs, ys), dtype=bool)
    j = np.argmax(np.where(ok, ys, -np.inf), axis=1)
    rows = np.arange(xs.shape[0])
    return np.where(ok.any(axis=1), xs[rows, j], 0.0)


def mechanism_value(R: EligibleSet, joint: JointDist, n: int, mode: str = "exact",
                    trials: int = 0, seed: int = 0, stream: int = 0) -> mc.Estimate:
    """Principal's expected x under the single-proposal mechanism with set R."""
    if mode == "mc":
        return mc.run_trials(lambda rng, k: _spm_payoff(R, *joint.sample(rng, (k, n))),
                             trials, seed, stream)
    if isinstance(joint, DiscreteJoint):
        pts = np.array(joint.points)
        return mc.Estimate(discrete_pick_value(joint, n, R.contains(pts[:, 0], pts[:, 1])))
    if isinstance(joint, ProductDist) and isinstance(R, XThreshold):
        return evaluate_rule(ThresholdRule(R.theta, R.strict), JointPool(joint, n))
    raise CapabilityError(f"no exact payoff for {type(R).__name__} on {type(joint).__name__}")


BOUND_NAMES = {1: "half", 2: "one_minus_inv_e", 3: "ode"}


@dataclass(frozen=True)
class BoundReport:
    part: int
    descriptor: str
    value: float
    stderr: float
    benchmark: float
    bound: float
    trials: int
    extras: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        return self.value / self.benchmark if self.benchmark > 0 else math.inf

    @property
    def margin(self) -> float:
        return self.ratio - self.bound

    @property
    def exact(self) -> bool:
        return self.trials == 0

    @property
    def passed(self) -> bool:
        if self.exact:
            return self.margin >= -1e-9
        return self.margin >= -4.0 * self.stderr / self.benchmark


def _evaluate(R, joint, n, trials, seed, stream) -> mc.Estimate:
    try:
        return mechanism_value(R, joint, n)
    except NotImplementedError:
        if trials < 1:
            raise
        return mechanism_value(R, joint, n, "mc", trials, seed, stream)


def _require_product(joint: JointDist, part: int) -> ProductDist:
    if not isinstance(joint, ProductDist):
        raise DomainError(f"part {part} needs independent x and y")
    if not joint.x.is_atomless:
        raise DomainError(f"part {part} needs an atomless x law")
    if not joint.y.is_atomless:
        raise DomainError(f"part {part} needs an atomless y law")
    return joint


def verify_distributional_bound(part: int, joint: JointDist, n: int, trials: int = 0,
                                seed: int = 0, stream: int = 0) -> BoundReport:
    """Build the mechanism the guarantee prescribes and measure it against E[max x]."""
    fx = joint.x_marginal()
    benchmark = JointPool(joint, n).expected_max()
    if part == 1:
        theta, p0, p1, q = median_of_max_threshold([fx], [n])
        strict = _evaluate(XThreshold(theta, True), joint, n, trials, seed, stream)
        weak = _evaluate(XThreshold(theta, False), joint, n, trials, seed, stream)
        keep_strict = better_of(strict, weak)
        pick = strict if keep_strict else weak
        return BoundReport(1, f"x {'>' if keep_strict else '>='} {theta:.12g}", pick.value,
                           pick.stderr, benchmark, 0.5, pick.trials,
                           {"q": q, "mixture": mixture_value(q, strict.value, weak.value)})
    if part == 2:
        _require_product(joint, 2)
        theta = iid_threshold(fx, n)
        est = _evaluate(XThreshold(theta, True), joint, n, trials, seed, stream)
        return BoundReport(2, f"x > {theta:.12g}", est.value, est.stderr, benchmark,
                           1.0 - math.exp(-1.0), est.trials)
    if part == 3:
        prod = _require_product(joint, 3)
        if not 3 <= n <= 500:
            raise DomainError("the curve mechanism is defined for 3 <= n <= 500")
        if trials < 1:
            raise DomainError("the curve mechanism is evaluated by simulation; trials must be positive")
        rule = ode_rule(n, prod.x, TimeLaw(prod.y), polish=False)
        est = mechanism_value(mechanism_from_rule(rule), joint, n, "mc", trials, seed, stream)
        return BoundReport(3, f"x > F^-1(1 - z(G(exp(-y)))/{n})", est.value, est.stderr,
                           benchmark, (1.0 - 6.0 / n) * solve_alpha(), est.trials,
                           {"alpha_n": alpha_n(n)})
    raise ValueError(f"part must be 1, 2 or 3, got {part}")
