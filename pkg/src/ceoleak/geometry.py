"""Constraint sets over (R1, R2, L1, L2, D) tuples and generic region checks.

Every bound in the package is stored in one canonical half-space form::

    a . (R1, R2, L1, L2) + d * g(D) >= rhs

with ``a`` in {0,1}^4, ``d`` in {0,1} and ``g`` either the identity
(log-loss, or a general distortion matrix) or ``0.5 * log2(D)``
(quadratic distortion).  Both transforms are nondecreasing, so every
region described this way is closed upward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

TOL = 1e-9

IDENTITY = "identity"
HALF_LOG = "half_log"
_TRANSFORMS = (IDENTITY, HALF_LOG)


def transform_distortion(D: float, transform: str) -> float:
    if transform == IDENTITY:
        return float(D)
    if transform == HALF_LOG:
        if D <= 0:
            return -math.inf
        return 0.5 * math.log2(D)
    raise ValueError(f"unknown distortion transform {transform!r}")


@dataclass(frozen=True)
class RateTuple:
    """A point (R1, R2, L1, L2, D); rates in bits per source symbol."""

    R1: float
    R2: float
    L1: float
    L2: float
    D: float
    label: str = ""

    def __post_init__(self):
        for name in ("R1", "R2", "L1", "L2", "D"):
            v = getattr(self, name)
            if math.isnan(v):
                raise ValueError(f"{name} is NaN")
            if v < 0:
                raise ValueError(f"{name} must be nonnegative, got {v}")

    @property
    def rates(self) -> tuple[float, float, float, float]:
        return (self.R1, self.R2, self.L1, self.L2)

    def as_array(self) -> np.ndarray:
        return np.array([self.R1, self.R2, self.L1, self.L2, self.D], dtype=float)

    def to_dict(self) -> dict:
        return {"label": self.label, "R1": self.R1, "R2": self.R2,
                "L1": self.L1, "L2": self.L2, "D": self.D}


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[int, int, int, int]
    d: int
    rhs: float
    label: str
    transform: str = IDENTITY

    def __post_init__(self):
        if len(self.coeffs) != 4 or any(c not in (0, 1) for c in self.coeffs):
            raise ValueError(f"coefficients must be four 0/1 entries, got {self.coeffs}")
        if self.d not in (0, 1):
            raise ValueError(f"distortion coefficient must be 0 or 1, got {self.d}")
        if self.transform not in _TRANSFORMS:
            raise ValueError(f"unknown distortion transform {self.transform!r}")
        # +inf is allowed: an infinite auxiliary rate makes a constraint unsatisfiable
        if math.isnan(self.rhs) or self.rhs == -math.inf:
            raise ValueError(f"constraint {self.label!r} has invalid rhs {self.rhs}")

    def lhs(self, p: RateTuple) -> float:
        total = 0.0
        for c, x in zip(self.coeffs, p.rates):
            if c:
                total += x
        if self.d:
            total += transform_distortion(p.D, self.transform)
        return total

    def slack(self, p: RateTuple) -> float:
        return self.lhs(p) - self.rhs

    def describe(self) -> str:
        names = [n for c, n in zip(self.coeffs, ("R1", "R2", "L1", "L2")) if c]
        if self.d:
            names.append("D" if self.transform == IDENTITY else "0.5*log2(D)")
        left = " + ".join(names) if names else "0"
        return f"{left} >= {self.rhs:.12g}"

    def to_dict(self) -> dict:
        return {"label": self.label, "coeffs": list(self.coeffs), "d": self.d,
                "transform": self.transform, "rhs": self.rhs}


@dataclass(frozen=True)
class ConstraintSet:
    """An ordered, labelled collection of constraints plus attached terms.

    ``quantities`` carries whatever information terms were computed while
    building the set (e.g. the outer-bound correction terms) so reports can
    show them next to the constraints.
    """

    constraints: tuple[Constraint, ...]
    name: str = ""
    quantities: Mapping[str, float] = field(default_factory=dict)

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def __getitem__(self, label: str) -> Constraint:
        for c in self.constraints:
            if c.label == label:
                return c
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.constraints]

    def rhs(self) -> dict[str, float]:
        return {c.label: c.rhs for c in self.constraints}

    def to_dict(self) -> dict:
        return {"name": self.name,
                "constraints": [c.to_dict() for c in self.constraints],
                "quantities": dict(self.quantities)}


@dataclass(frozen=True)
class FeasibilityReport:
    verdict: bool
    violations: tuple[tuple[str, float], ...]
    max_violation: float
    slacks: Mapping[str, float]

    def to_dict(self) -> dict:
        return {"verdict": self.verdict,
                "violations": [list(v) for v in self.violations],
                "max_violation": self.max_violation,
                "slacks": dict(self.slacks)}


def evaluate(cs: ConstraintSet | Iterable[Constraint], p: RateTuple,
             eps: float = TOL) -> FeasibilityReport:
    """Per-constraint slack of ``p``; a slack below ``-eps`` is a violation."""
    slacks = {}
    violations = []
    worst = 0.0
    for c in cs:
        s = c.slack(p)
        slacks[c.label] = s
        if s < -eps:
            violations.append((c.label, s))
        worst = max(worst, -s)
    return FeasibilityReport(not violations, tuple(violations), worst, slacks)


def dominates(p: RateTuple | Sequence[float], q: RateTuple | Sequence[float],
              eps: float = TOL) -> bool:
    """True if ``p`` is coordinate-wise no worse than ``q`` (lower is better)."""
    a = p.as_array() if isinstance(p, RateTuple) else np.asarray(p, dtype=float)
    b = q.as_array() if isinstance(q, RateTuple) else np.asarray(q, dtype=float)
    return bool(np.all(a <= b + eps))


def dominance_gaps(p: RateTuple, q: RateTuple) -> dict[str, float]:
    """Coordinate excess p - q; positive entries are where ``p`` fails to dominate."""
    names = ("R1", "R2", "L1", "L2", "D")
    return {n: float(x - y) for n, x, y in zip(names, p.as_array(), q.as_array())}


def pareto_filter(points: Sequence, eps: float = TOL) -> list:
    """Minimal elements of ``points`` under :func:`dominates`.

    Of a group of mutually dominating (equal up to ``eps``) points only one
    is kept, so the output is an antichain.  Output keeps input order.
    """
    pts = list(points)
    arrs = [p.as_array() if isinstance(p, RateTuple) else np.asarray(p, dtype=float)
            for p in pts]
    # a dominator always has a no-larger coordinate sum (up to 5*eps), so
    # scanning in sum order only ever compares against already-kept points
    order = sorted(range(len(pts)), key=lambda i: (float(arrs[i].sum()), i))
    kept: list[int] = []
    for i in order:
        if any(dominates(arrs[j], arrs[i], eps) for j in kept):
            continue
        # a later point in sum order can still dominate i when sums tie within eps
        kept = [j for j in kept if not (dominates(arrs[i], arrs[j], eps)
                                        and not dominates(arrs[j], arrs[i], eps))]
        kept.append(i)
    kept.sort()
    return [pts[i] for i in kept]


def ray_to_boundary(cs: ConstraintSet | Iterable[Constraint], base: RateTuple,
                    direction: Sequence[float] = (1, 1, 1, 1, 1),
                    tol: float = 1e-13) -> RateTuple:
    """First point of ``base + t * direction`` (t >= 0) inside the region.

    ``direction`` must be nonnegative.  For identity transforms the step is
    exact; half-log constraints are resolved by bisection.  A feasible
    ``base`` is returned unchanged.
    """
    d = np.asarray(direction, dtype=float)
    if d.shape != (5,) or np.any(d < 0):
        raise ValueError("direction must be five nonnegative numbers")
    x0 = base.as_array()
    cons = list(cs)

    def at(t):
        x = x0 + t * d
        return RateTuple(*x, label=base.label)

    t = 0.0
    needs_bisect = False
    for c in cons:
        s = c.slack(base)
        if s >= 0:
            continue
        rate_speed = float(np.dot(c.coeffs, d[:4]))
        if c.d and c.transform == HALF_LOG and d[4] > 0:
            needs_bisect = True
            continue
        speed = rate_speed + (d[4] if c.d else 0.0)
        if speed <= 0:
            raise ValueError(f"constraint {c.label!r} cannot be met along this direction")
        t = max(t, -s / speed)
    if needs_bisect:
        lo, hi = t, max(t, 1.0)
        while not evaluate(cons, at(hi), 0.0).verdict:
            hi *= 2.0
            if hi > 1e12:
                raise ValueError("region not reached along this direction")
        while hi - lo > tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if evaluate(cons, at(mid), 0.0).verdict:
                hi = mid
            else:
                lo = mid
        t = hi
    return at(t)
