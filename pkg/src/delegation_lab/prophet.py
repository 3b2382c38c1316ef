"""Oblivious stopping rules on timed points and their expected payoff.

A rule sees a finite set of points ``(x, t)`` and keeps the earliest one in
its acceptance region.  Three regions are supported: a fixed value threshold,
a time-varying threshold curve, and the curve driven by the z-ODE.  Payoffs
are compared with E[max x].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence, Union

import numpy as np

from . import mc
from .distributions import Dist1D, DiscreteJoint, JointDist, ProductDist, expected_max, max_cdf
from .numerics import DomainError, ZCurve, find_root_monotone, z_curve


class CapabilityError(NotImplementedError):
    """The requested evaluation mode is not available for this rule/instance."""


class CdfLike(Protocol):
    def cdf(self, v): ...


@dataclass(frozen=True)
class TimedPoint:
    x: float
    t: float

    def __post_init__(self):
        if not (self.x >= 0.0):
            raise DomainError(f"x must be non-negative, got {self.x}")
        if not (0.0 <= self.t <= 1.0):
            raise DomainError(f"t must lie in [0, 1], got {self.t}")


# --------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class ThresholdRule:
    """Accept x > theta (strict) or x >= theta, at any time."""

    theta: float
    strict: bool = True

    def accepts(self, x, t=None):
        x = np.asarray(x, dtype=float)
        return x > self.theta if self.strict else x >= self.theta

    def x_threshold(self, t):
        return np.full(np.shape(t), float(self.theta)) if np.ndim(t) else float(self.theta)


@dataclass(frozen=True)
class RegionRule:
    """Accept x above a non-increasing time-dependent threshold."""

    theta_of_t: Callable[[np.ndarray], np.ndarray]
    strict: bool = True

    def accepts(self, x, t):
        x = np.asarray(x, dtype=float)
        th = np.asarray(self.theta_of_t(np.asarray(t, dtype=float)), dtype=float)
        return x > th if self.strict else x >= th

    def x_threshold(self, t):
        return self.theta_of_t(t)


@dataclass(frozen=True)
class OdeRule:
    """Accept (x, t) when 1 - F(x) < z(G(t)) / n."""

    n: int
    F: Dist1D
    G: CdfLike
    curve: ZCurve = field(repr=False)
    polish: bool = True
    strict = True

    def level(self, t):
        """z(G(t)) / n, the tail mass allowed at time t."""
        return self.curve.z(np.clip(self.G.cdf(t), 0.0, 1.0), polish=self.polish) / self.n

    def accepts(self, x, t):
        # same inequality as F(x) > 1 - level, which keeps precision for small F(x)
        return np.asarray(self.F.cdf(x)) > 1.0 - self.level(t)

    def x_threshold(self, t):
        """Smallest-x boundary: for atomless F, accepts(x, t) iff x > x_threshold(t)."""
        return self.F.upper_quantile(1.0 - self.level(t))


StoppingRule = Union[ThresholdRule, RegionRule, OdeRule]

ACCEPT_ALL = ThresholdRule(-math.inf, strict=False)
ACCEPT_NONE = ThresholdRule(math.inf, strict=True)


def run_stopping_rule(rule: StoppingRule, points: Sequence[TimedPoint]) -> Optional[TimedPoint]:
    """Earliest accepted point, or None.  Equal times go to the lower index."""
    best = None
    for p in points:
        if bool(rule.accepts(p.x, p.t)) and (best is None or p.t < best.t):
            best = p
    return best


# --------------------------------------------------------------------------
# threshold choices


def median_of_max_threshold(ds: Sequence[Dist1D], counts: Sequence[int]):
    """Median theta of the pool maximum, with p0 = P(max > theta),
    p1 = P(max >= theta) and the weight q solving q p0 + (1 - q) p1 = 1/2."""
    if not ds or len(ds) != len(counts) or any(c < 1 for c in counts):
        raise ValueError("pool must be non-empty with positive counts")
    pts = np.unique(np.concatenate([d.breakpoints for d in ds]))
    right = [max_cdf(ds, counts, v) for v in pts]
    j = next(k for k, r in enumerate(right) if r >= 0.5)
    theta = float(pts[j])
    if j > 0 and max_cdf(ds, counts, theta, left=True) > 0.5 and right[j - 1] < 0.5:
        # the crossing is inside the continuous stretch (pts[j-1], pts[j])
        theta = find_root_monotone(lambda v: max_cdf(ds, counts, v) - 0.5,
                                   float(pts[j - 1]), theta, tol=1e-15)
    p0 = 1.0 - max_cdf(ds, counts, theta)
    p1 = 1.0 - max_cdf(ds, counts, theta, left=True)
    q = 0.5 if p1 == p0 else (p1 - 0.5) / (p1 - p0)
    return theta, p0, p1, min(max(q, 0.0), 1.0)


def iid_threshold(F: Dist1D, n: int) -> float:
    """Theta with F(theta) = exp(-1/n)."""
    if not F.is_atomless:
        raise DomainError("the exp(-1/n) quantile rule needs an atomless law")
    if n < 1:
        raise ValueError("n must be positive")
    return F.quantile(math.exp(-1.0 / n))


def ode_rule(n: int, F: Dist1D, G: CdfLike, polish: bool = True) -> OdeRule:
    """``polish=False`` reads z off the knot interpolant, for bulk simulation."""
    if not F.is_atomless:
        raise DomainError("value law must be atomless")
    if not getattr(G, "is_atomless", True):
        raise DomainError("time law must be atomless")
    return OdeRule(int(n), F, G, z_curve(n), polish)


# --------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Pool:
    """Independent draws, ``counts[i]`` of them from ``dists[i]``.

    With ``time_dist`` None the draws arrive in listed order; otherwise each
    draw gets an independent time from ``time_dist``.
    """

    dists: tuple
    counts: tuple
    time_dist: Optional[Dist1D] = None

    def __post_init__(self):
        object.__setattr__(self, "dists", tuple(self.dists))
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if not self.dists or len(self.dists) != len(self.counts) or min(self.counts) < 1:
            raise ValueError("pool must be non-empty with positive counts")

    @classmethod
    def iid(cls, F: Dist1D, n: int, time_dist: Optional[Dist1D] = None) -> "Pool":
        return cls((F,), (n,), time_dist)

    @property
    def size(self) -> int:
        return sum(self.counts)

    def expected_max(self) -> float:
        return expected_max(self.dists, self.counts)

    def draw(self, rng: np.random.Generator, trials: int):
        xs = np.concatenate([d.sample(rng, (trials, c)) for d, c in zip(self.dists, self.counts)], axis=1)
        if self.time_dist is None:
            ts = np.broadcast_to(np.arange(self.size, dtype=float) / self.size, xs.shape)
        else:
            ts = self.time_dist.sample(rng, xs.shape)
        return xs, ts


@dataclass(frozen=True)
class JointPool:
    """``n`` independent (x, y) draws; time is the decreasing image of y."""

    joint: JointDist
    n: int

    def expected_max(self) -> float:
        return expected_max([self.joint.x_marginal()], [self.n])

    def draw(self, rng: np.random.Generator, trials: int):
        from .delegation import y_to_time

        xs, ys = self.joint.sample(rng, (trials, self.n))
        return xs, y_to_time(ys)


Instance = Union[Pool, JointPool]


def select(rule: StoppingRule, xs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Vectorised rule payoff for rows of points; 0 when nothing is accepted."""
    ok = np.asarray(rule.accepts(xs, ts), dtype=bool)
    j = np.argmin(np.where(ok, ts, np.inf), axis=1)
    rows = np.arange(xs.shape[0])
    return np.where(ok.any(axis=1), xs[rows, j], 0.0)


def _exact_listed(rule: ThresholdRule, dists, counts) -> float:
    survive, terms = 1.0, []
    for d, c in zip(dists, counts):
        p, tm = d.prob_above(rule.theta, rule.strict), d.tail_mean(rule.theta, rule.strict)
        for _ in range(c):
            terms.append(survive * tm)
            survive *= 1.0 - p
    return math.fsum(terms)


def discrete_pick_value(joint: DiscreteJoint, n: int, accepted: np.ndarray) -> float:
    """Exact E[x] of the accepted draw with the largest y among n draws.

    ``accepted`` flags each support point of ``joint``.  Among equal y the
    lowest index wins, so inside a y-level the kept outcome is distributed in
    proportion to mass.
    """
    levels: dict[float, list] = {}
    for p, good in zip(joint.points, np.atleast_1d(accepted)):
        if good and p[2] > 0:
            levels.setdefault(p[1], []).append(p)
    above, terms = 0.0, []
    for y in sorted(levels, reverse=True):
        mass = math.fsum(p[2] for p in levels[y])
        xbar = math.fsum(p[0] * p[2] for p in levels[y]) / mass
        # no draw from higher accepted levels, at least one from this level
        terms.append(xbar * ((1.0 - above) ** n - max(0.0, 1.0 - above - mass) ** n))
        above += mass
    return math.fsum(terms)


def evaluate_rule(rule: StoppingRule, instance: Instance, mode: str = "exact",
                  trials: int = 0, seed: int = 0, stream: int = 0) -> mc.Estimate:
    """Expected x of the rule's pick.  ``mode`` is ``"exact"`` or ``"mc"``."""
    if mode == "mc":
        return mc.run_trials(lambda rng, k: select(rule, *instance.draw(rng, k)), trials, seed, stream)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(instance, JointPool) and isinstance(instance.joint, DiscreteJoint):
        from .delegation import y_to_time

        pts = np.array(instance.joint.points)
        ok = rule.accepts(pts[:, 0], y_to_time(pts[:, 1]))
        return mc.Estimate(discrete_pick_value(instance.joint, instance.n, ok))
    if not isinstance(rule, ThresholdRule):
        raise CapabilityError("exact payoff needs a time-independent threshold")
    if isinstance(instance, Pool):
        if instance.time_dist is not None and len(instance.dists) > 1:
            raise CapabilityError("exact payoff for a mixed pool needs listed order")
        return mc.Estimate(_exact_listed(rule, instance.dists, instance.counts))
    if isinstance(instance.joint, ProductDist):
        return mc.Estimate(_exact_listed(rule, (instance.joint.x,), (instance.n,)))
    raise CapabilityError(f"no exact payoff for {type(instance.joint).__name__}")


def mixture_value(q: float, strict_value: float, weak_value: float) -> float:
    """Payoff of the strict threshold w.p. q and the weak one otherwise."""
    return q * strict_value + (1.0 - q) * weak_value


def better_of(strict: mc.Estimate, weak: mc.Estimate, sigmas: float = 4.0) -> bool:
    """True if the strict threshold should be kept over the weak one.

    Exact values compare directly; estimates need a gap beyond ``sigmas``
    combined standard errors.  Ties go to the weak threshold.
    """
    if strict.exact and weak.exact:
        return strict.value > weak.value
    return strict.value - weak.value > sigmas * math.hypot(strict.stderr, weak.stderr)
