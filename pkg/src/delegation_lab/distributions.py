"""Finite mixtures of atoms and uniform segments, joint utility laws, and the
hard instances used to show the mechanism bounds are tight.

Every distribution here is bounded and piecewise linear in its CDF, so the
CDF, quantiles, partial expectations and E[max of n] are exact up to
floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .numerics import DomainError, gauss_nodes

MASS_TOL = 1e-12


def _as_tuple(rows, width):
    out = tuple(tuple(float(v) for v in r) for r in rows)
    for r in out:
        if len(r) != width:
            raise ValueError(f"expected {width} fields per entry, got {r}")
    return out


@dataclass(frozen=True)
class Dist1D:
    """Mixture of point masses ``(value, mass)`` and uniform pieces ``(lo, hi, mass)``."""

    atoms: tuple = ()
    segments: tuple = ()

    def __post_init__(self):
        atoms = _as_tuple(self.atoms, 2)
        segments = _as_tuple(self.segments, 3)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "segments", segments)
        masses = [m for _, m in atoms] + [m for _, _, m in segments]
        if not masses:
            raise ValueError("distribution has no components")
        if any(m < 0 or not math.isfinite(m) for m in masses):
            raise ValueError("masses must be finite and non-negative")
        if abs(math.fsum(masses) - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {math.fsum(masses)!r}, not 1")
        if len({v for v, _ in atoms}) != len(atoms):
            raise ValueError("atom values must be distinct")
        for lo, hi, _ in segments:
            if not lo < hi:
                raise ValueError(f"segment [{lo}, {hi}] needs lo < hi")

    # -- constructors ----------------------------------------------------
    @classmethod
    def uniform(cls, lo: float = 0.0, hi: float = 1.0) -> "Dist1D":
        return cls(segments=((lo, hi, 1.0),))

    @classmethod
    def point(cls, value: float) -> "Dist1D":
        return cls(atoms=((value, 1.0),))

    # -- structure -------------------------------------------------------
    @property
    def is_atomless(self) -> bool:
        return not any(m > 0 for _, m in self.atoms)

    @property
    def lower(self) -> float:
        vals = [v for v, m in self.atoms if m > 0] + [lo for lo, _, m in self.segments if m > 0]
        return min(vals)

    @property
    def upper(self) -> float:
        vals = [v for v, m in self.atoms if m > 0] + [hi for _, hi, m in self.segments if m > 0]
        return max(vals)

    @cached_property
    def breakpoints(self) -> np.ndarray:
        pts = [v for v, _ in self.atoms]
        for lo, hi, _ in self.segments:
            pts += [lo, hi]
        return np.unique(np.array(pts, dtype=float))

    @cached_property
    def _arrays(self):
        av = np.array([v for v, _ in self.atoms], dtype=float)
        am = np.array([m for _, m in self.atoms], dtype=float)
        sl = np.array([lo for lo, _, _ in self.segments], dtype=float)
        sh = np.array([hi for _, hi, _ in self.segments], dtype=float)
        sm = np.array([m for _, _, m in self.segments], dtype=float)
        return av, am, sl, sh, sm

    # -- CDF family --------------------------------------------------------
    def cdf(self, v):
        """P(X <= v); accepts scalars or arrays."""
        av, am, sl, sh, sm = self._arrays
        v = np.asarray(v, dtype=float)
        vv = v[..., None]
        out = np.sum(am * (av <= vv), axis=-1) if len(av) else np.zeros(v.shape)
        if len(sl):
            out = out + np.sum(sm * np.clip((vv - sl) / (sh - sl), 0.0, 1.0), axis=-1)
        out = np.minimum(out, 1.0)
        return float(out) if out.ndim == 0 else out

    def cdf_left(self, v):
        """P(X < v)."""
        av, am, sl, sh, sm = self._arrays
        v = np.asarray(v, dtype=float)
        vv = v[..., None]
        out = np.sum(am * (av < vv), axis=-1) if len(av) else np.zeros(v.shape)
        if len(sl):
            out = out + np.sum(sm * np.clip((vv - sl) / (sh - sl), 0.0, 1.0), axis=-1)
        out = np.minimum(out, 1.0)
        return float(out) if out.ndim == 0 else out

    def prob_above(self, theta: float, strict: bool = True) -> float:
        """P(X > theta) if strict else P(X >= theta)."""
        return 1.0 - (self.cdf(theta) if strict else self.cdf_left(theta))

    def tail_mean(self, theta: float, strict: bool = True) -> float:
        """E[X; X > theta] (strict) or E[X; X >= theta]."""
        terms = [v * m for v, m in self.atoms if (v > theta if strict else v >= theta)]
        for lo, hi, m in self.segments:
            a = max(lo, theta)
            if a < hi:
                terms.append(m * (hi * hi - a * a) / (2.0 * (hi - lo)))
        return math.fsum(terms)

    def mean(self) -> float:
        return self.tail_mean(-math.inf, strict=False)

    def quantile(self, p: float) -> float:
        """Generalised inverse inf{v : cdf(v) >= p}."""
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {p}")
        if p <= 0.0:
            return self.lower
        b = self.breakpoints
        prev_right = None
        for j, v in enumerate(b):
            left, right = self.cdf_left(v), self.cdf(v)
            if prev_right is not None and left >= p > prev_right:
                # inside the linear stretch (b[j-1], b[j])
                u = b[j - 1]
                return u + (p - prev_right) / (left - prev_right) * (v - u)
            if right >= p:
                return float(v)
            prev_right = right
        return float(b[-1])

    def upper_quantile(self, a):
        """sup{v : cdf(v) <= a}, vectorised; exact for atomless laws.

        For continuous F, ``x > upper_quantile(a)`` holds exactly when
        ``F(x) > a``.  Returns -inf below the support and +inf for a >= 1.
        """
        b = self.breakpoints
        right = np.asarray(self.cdf(b), dtype=float)
        left = np.asarray(self.cdf_left(b), dtype=float)
        a = np.asarray(a, dtype=float)
        # last breakpoint whose cdf is still <= a, then walk up the linear stretch after it
        j = np.clip(np.searchsorted(right, a, side="right") - 1, 0, len(b) - 1)
        k = np.minimum(j + 1, len(b) - 1)
        rise = left[k] - right[j]
        frac = np.where(rise > 0, (a - right[j]) / np.where(rise > 0, rise, 1.0), 1.0)
        out = b[j] + np.clip(frac, 0.0, 1.0) * (b[k] - b[j])
        out = np.where(a >= 1.0, np.inf, out)
        out = np.where(a < right[0], b[0], out)
        out = np.where(a < 0.0, -np.inf, out)
        return float(out) if out.ndim == 0 else out

    # -- sampling --------------------------------------------------------
    def sample(self, rng: np.random.Generator, size=None):
        av, am, sl, sh, sm = self._arrays
        weights = np.concatenate([am, sm])
        cum = np.cumsum(weights)
        u = rng.random(size)
        comp = np.minimum(np.searchsorted(cum, u * cum[-1], side="right"), len(weights) - 1)
        w = rng.random(size)
        lo = np.concatenate([av, sl])[comp]
        hi = np.concatenate([av, sh])[comp]
        out = lo + w * (hi - lo)
        return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# joint laws of (x, y)


@dataclass(frozen=True)
class ProductDist:
    x: Dist1D
    y: Dist1D
    kind = "product"

    def independent(self) -> bool:
        return True

    def x_marginal(self) -> Dist1D:
        return self.x

    def sample(self, rng: np.random.Generator, size=None):
        return self.x.sample(rng, size), self.y.sample(rng, size)


@dataclass(frozen=True)
class RectMixture:
    """Mixture of uniform laws on rectangles ``(x_lo, x_hi, y_lo, y_hi, weight)``."""

    rects: tuple
    kind = "rect_mixture"

    def __post_init__(self):
        rects = _as_tuple(self.rects, 5)
        object.__setattr__(self, "rects", rects)
        if abs(math.fsum(r[4] for r in rects) - 1.0) > MASS_TOL:
            raise ValueError("rectangle weights must sum to 1")
        for xl, xh, yl, yh, w in rects:
            if xl > xh or yl > yh or w < 0:
                raise ValueError(f"bad rectangle {(xl, xh, yl, yh, w)}")

    def independent(self) -> bool:
        return False

    def x_marginal(self) -> Dist1D:
        atoms: dict[float, float] = {}
        segs = []
        for xl, xh, _, _, w in self.rects:
            if xl == xh:
                atoms[xl] = atoms.get(xl, 0.0) + w
            else:
                segs.append((xl, xh, w))
        return Dist1D(atoms=tuple(atoms.items()), segments=tuple(segs))

    def sample(self, rng: np.random.Generator, size=None):
        r = np.array(self.rects)
        cum = np.cumsum(r[:, 4])
        comp = np.minimum(np.searchsorted(cum, rng.random(size) * cum[-1], side="right"), len(r) - 1)
        u, v = rng.random(size), rng.random(size)
        xs = r[comp, 0] + u * (r[comp, 1] - r[comp, 0])
        ys = r[comp, 2] + v * (r[comp, 3] - r[comp, 2])
        return xs, ys


@dataclass(frozen=True)
class DiscreteJoint:
    """Finitely many outcomes ``(x, y, mass)``."""

    points: tuple
    kind = "discrete"

    def __post_init__(self):
        pts = _as_tuple(self.points, 3)
        object.__setattr__(self, "points", pts)
        if abs(math.fsum(p[2] for p in pts) - 1.0) > MASS_TOL:
            raise ValueError("point masses must sum to 1")
        if any(p[2] < 0 for p in pts):
            raise ValueError("point masses must be non-negative")

    def independent(self) -> bool:
        return False

    def x_marginal(self) -> Dist1D:
        atoms: dict[float, float] = {}
        for x, _, m in self.points:
            atoms[x] = atoms.get(x, 0.0) + m
        return Dist1D(atoms=tuple(atoms.items()))

    def sample(self, rng: np.random.Generator, size=None):
        p = np.array(self.points)
        cum = np.cumsum(p[:, 2])
        comp = np.minimum(np.searchsorted(cum, rng.random(size) * cum[-1], side="right"), len(p) - 1)
        return p[comp, 0], p[comp, 1]


JointDist = Union[ProductDist, RectMixture, DiscreteJoint]


def sample(d: Dist1D | JointDist, rng: np.random.Generator, size=None):
    """Draw from a one-dimensional law or an (x, y) law."""
    return d.sample(rng, size)


# --------------------------------------------------------------------------
# E[max]


def max_cdf(ds: Sequence[Dist1D], counts: Sequence[int], v, left: bool = False):
    """P(max of the independent pool <= v) (or < v with ``left``)."""
    out = 1.0
    for d, c in zip(ds, counts):
        out = out * (d.cdf_left(v) if left else d.cdf(v)) ** c
    return out


def expected_max(ds: Sequence[Dist1D], counts: Sequence[int]) -> float:
    """E[max] of ``counts[i]`` independent draws from each ``ds[i]``.

    Integrates 1 - prod F_i(v)^{c_i} over [0, sup support].  Between
    consecutive breakpoints the integrand is a polynomial, so Gauss-Legendre
    of matching order is exact.
    """
    if len(ds) != len(counts) or not ds:
        raise ValueError("need one count per distribution")
    if any(int(c) != c or c < 1 for c in counts):
        raise ValueError("counts must be positive integers")
    if min(d.lower for d in ds) < 0:
        raise DomainError("expected_max needs non-negative support")
    top = max(d.upper for d in ds)
    if not math.isfinite(top):
        raise DomainError("unbounded support")
    edges = np.unique(np.concatenate([[0.0]] + [d.breakpoints for d in ds]))
    edges = edges[(edges >= 0.0) & (edges <= top)]
    total = []
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b)
        deg = sum(c for d, c in zip(ds, counts)
                  if any(lo < mid < hi for lo, hi, _ in d.segments))
        order = min(max((deg + 2) // 2, 2), 600)
        x, w = gauss_nodes(order)
        pts = mid + 0.5 * (b - a) * x
        total.append(0.5 * (b - a) * float(np.sum(w * (1.0 - max_cdf(ds, counts, pts)))))
    return math.fsum(total)


# --------------------------------------------------------------------------
# tightness instances


def hard_instance_half(H: float, n: int) -> RectMixture:
    """Two-rectangle law on which no mechanism beats ~1/2 of E[x_*].

    The agent strictly prefers every point of the first rectangle (y in [2, 3])
    to every point of the rare, high-x second rectangle (y in [0, 1]).
    """
    if H < 100 or n < 2:
        raise DomainError("need H >= 100 and n >= 2")
    w2 = 1.0 / (n * H)
    return RectMixture(rects=(
        (1.0 - 1.0 / H, 1.0 + 1.0 / H, 2.0, 3.0, 1.0 - w2),
        (H, H + 2.0, 0.0, 1.0, w2),
    ))


def mech_value_half_instance(p: float, n: int) -> float:
    """Limit (H -> inf) principal value when the eligible set keeps a p-fraction
    of the common rectangle and all of the rare one."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    return 1.0 - (1.0 - p) ** n + (1.0 - p) ** (n - 1)


def ratio_curve_phi(phi: float) -> float:
    """Limit ratio E[x_hat]/E[x_*] of a y-blind mechanism accepting ~phi/n of
    the samples on the 1 - 1/e tightness instance."""
    if not phi > 0:
        raise DomainError(f"phi must be positive, got {phi}")
    e = math.e
    return -math.expm1(-phi) * ((e - 2.0) / (e - 1.0) + 1.0 / ((e - 1.0) * phi))


def one_minus_inv_e_marginal(H: float, n: int) -> Dist1D:
    """x-marginal of the 1 - 1/e tightness instance (two thin uniform pieces)."""
    p = 1.0 / ((math.e - 2.0) * n * H)
    return Dist1D(segments=((1.0, 1.0 + 1.0 / H, 1.0 - p), (H + 1.0, H + 1.0 + 1.0 / H, p)))
