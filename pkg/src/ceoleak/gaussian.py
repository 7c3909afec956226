"""Closed-form Gaussian CEO regions with leakage, and minimum-distortion curves.

Source X ~ N(0, sx2) seen by agent k through Y_k = X + N_k, N_k ~ N(0, s_k2).
For every S subset of {1,2} and K subset of S the region requires, for some
auxiliary rates r1, r2 >= 0,

    sum_{k in K} R_k + sum_{k in S\\K} L_k >= sum_{k in K} r_k + G(S^c) - D      (log-loss)
    sum_{k in K} R_k + sum_{k in S\\K} L_k >= sum_{k in K} r_k + G(S^c) - log2(D)/2  (quadratic)

with posterior variance v(A) = (1/sx2 + sum_{j in A} (1 - 2^{-2 r_j}) / s_j2)^{-1}
and G(A) = log2(2 pi e v(A))/2 for log-loss, log2(v(A))/2 for squared error.
Differential entropies are in bits.

Each per-constraint lower bound on D is convex in (r1, r2), so the minimum
distortion for given rates is a 2-D convex problem.  It is solved by a
dense grid followed by nested golden-section searches inside a box
around the best grid cell.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geometry import HALF_LOG, IDENTITY, TOL, Constraint, ConstraintSet, RateTuple, evaluate

LOGLOSS = "logloss"
QUADRATIC = "quadratic"
METRICS = (LOGLOSS, QUADRATIC)
TWO_PI_E = 2 * math.pi * math.e
INF = math.inf


@dataclass(frozen=True)
class GaussianCeoParams:
    sigma2_x: float
    sigma2_n1: float
    sigma2_n2: float

    def __post_init__(self):
        for name in ("sigma2_x", "sigma2_n1", "sigma2_n2"):
            v = getattr(self, name)
            if not (v > 0) or math.isinf(v):
                raise ValueError(f"{name} must be a positive finite variance, got {v}")

    def noise(self, k: int) -> float:
        return self.sigma2_n1 if k == 1 else self.sigma2_n2


@dataclass(frozen=True)
class AuxRates:
    r1: float
    r2: float

    def __post_init__(self):
        for name in ("r1", "r2"):
            v = getattr(self, name)
            if math.isnan(v) or v < 0:
                raise ValueError(f"{name} must be >= 0, got {v}")

    def __getitem__(self, k: int) -> float:
        return self.r1 if k == 1 else self.r2


@dataclass(frozen=True)
class SubsetPair:
    S: frozenset
    K: frozenset

    def __post_init__(self):
        S, K = frozenset(self.S), frozenset(self.K)
        if not S <= {1, 2}:
            raise ValueError(f"S must be a subset of {{1,2}}, got {set(S)}")
        if not K <= S:
            raise ValueError(f"K={set(K)} is not a subset of S={set(S)}")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "K", K)

    @property
    def Sc(self) -> frozenset:
        return frozenset({1, 2}) - self.S

    @property
    def Kc(self) -> frozenset:
        return self.S - self.K

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        return (int(1 in self.K), int(2 in self.K), int(1 in self.Kc), int(2 in self.Kc))

    @property
    def label(self) -> str:
        def fmt(s):
            return "{" + ",".join(str(i) for i in sorted(s)) + "}"
        return f"S={fmt(self.S)},K={fmt(self.K)}"

    @property
    def has_leakage(self) -> bool:
        return bool(self.Kc)


def _pairs():
    out = []
    for S in ((), (1,), (2,), (1, 2)):
        subsets = [S] + [K for K in ((1,), (2,)) if set(K) < set(S)] + ([()] if S else [])
        for K in subsets:
            out.append(SubsetPair(frozenset(S), frozenset(K)))
    return tuple(out)


PAIRS = _pairs()
RATE_DISTORTION_PAIRS = tuple(p for p in PAIRS if not p.has_leakage)


@dataclass(frozen=True)
class CurveRow:
    L1: float
    min_D: float
    r1: float
    r2: float


@dataclass(frozen=True)
class SearchConfig:
    """Outer (r1, r2) search settings.

    ``r_max=None`` uses the sum of all finite rates plus ``headroom`` bits.
    """

    grid: int = 201
    r_max: float | None = None
    headroom: float = 4.0
    xatol: float = 1e-11
    max_recenter: int = 50

    def __post_init__(self):
        if self.grid < 2:
            raise ValueError("grid size must be >= 2")
        if self.xatol <= 0:
            raise ValueError("xatol must be > 0")


def _check_metric(metric):
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")


# -- closed forms ---------------------------------------------------------------

def _exp2neg(r):
    return np.exp2(-2.0 * np.asarray(r, dtype=float))


def posterior_variance(params: GaussianCeoParams, active, r1, r2):
    """(1/sx2 + sum_{j in active} (1 - 2^{-2 r_j}) / s_j2)^{-1}; r may be arrays or inf."""
    prec = 1.0 / params.sigma2_x
    if 1 in active:
        prec = prec + (1.0 - _exp2neg(r1)) / params.sigma2_n1
    if 2 in active:
        prec = prec + (1.0 - _exp2neg(r2)) / params.sigma2_n2
    return 1.0 / prec


def gaussian_cond_entropy(params: GaussianCeoParams, active_set, aux_rates: AuxRates) -> float:
    """h(X | U_A, Q) in bits for the Gaussian test channels at rates ``aux_rates``."""
    v = posterior_variance(params, set(active_set), aux_rates.r1, aux_rates.r2)
    return 0.5 * math.log2(TWO_PI_E * float(v))


def beta_to_r(sigma2_nk: float, beta: float) -> float:
    """Auxiliary rate r = log2((s2 + beta) / beta) / 2 of test-channel noise ``beta``."""
    if sigma2_nk <= 0:
        raise ValueError("noise variance must be positive")
    if beta == INF:
        return 0.0
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    # log1p keeps precision when beta >> sigma2_nk
    return 0.5 * math.log1p(sigma2_nk / beta) / math.log(2.0)


def r_to_beta(sigma2_nk: float, r: float) -> float:
    """Inverse of :func:`beta_to_r`; r = 0 maps to beta = inf."""
    if sigma2_nk <= 0:
        raise ValueError("noise variance must be positive")
    if r < 0 or math.isnan(r):
        raise ValueError(f"r must be >= 0, got {r}")
    if r == 0:
        return INF
    # expm1 keeps precision for small r
    return sigma2_nk / math.expm1(2.0 * r * math.log(2.0))


def _G(params, active, r1, r2, metric):
    v = posterior_variance(params, active, r1, r2)
    if metric == LOGLOSS:
        return 0.5 * np.log2(TWO_PI_E * v)
    return 0.5 * np.log2(v)


def _pair_rhs(params, r1, r2, pair: SubsetPair, metric):
    total = _G(params, pair.Sc, r1, r2, metric)
    if 1 in pair.K:
        total = total + np.asarray(r1, dtype=float)
    if 2 in pair.K:
        total = total + np.asarray(r2, dtype=float)
    return total


def gaussian_rhs(params: GaussianCeoParams, aux_rates: AuxRates, pair: SubsetPair,
                 metric: str = LOGLOSS) -> Constraint:
    """The (S, K) constraint for fixed auxiliary rates in canonical form."""
    _check_metric(metric)
    rhs = float(_pair_rhs(params, aux_rates.r1, aux_rates.r2, pair, metric))
    transform = IDENTITY if metric == LOGLOSS else HALF_LOG
    return Constraint(pair.coeffs, 1, rhs, pair.label, transform)


def all_constraints(params: GaussianCeoParams, aux_rates: AuxRates,
                    metric: str = LOGLOSS) -> ConstraintSet:
    cons = tuple(gaussian_rhs(params, aux_rates, p, metric) for p in PAIRS)
    return ConstraintSet(cons, name=f"gaussian_{metric}",
                         quantities={"r1": aux_rates.r1, "r2": aux_rates.r2})


def _lhs(pair: SubsetPair, R1, R2, L1, L2) -> float:
    total = 0.0
    for c, x in zip(pair.coeffs, (R1, R2, L1, L2)):
        if c:
            total += x
    return total


def distortion_bounds(params: GaussianCeoParams, r1, r2, R1, R2, L1=INF, L2=INF,
                      metric: str = LOGLOSS, pairs: Sequence[SubsetPair] = PAIRS) -> dict:
    """Per-constraint lower bound on D at auxiliary rates (r1, r2), by label.

    Each (S, K) constraint solved for D.  Infinite rates make a constraint
    vacuous (bound -inf for log-loss, 0 for quadratic).
    """
    _check_metric(metric)
    out = {}
    with np.errstate(over="ignore", invalid="ignore"):
        for p in pairs:
            gap = _pair_rhs(params, r1, r2, p, metric) - _lhs(p, R1, R2, L1, L2)
            out[p.label] = gap if metric == LOGLOSS else np.exp2(2.0 * gap)
    return out


def min_distortion_at(params, r1, r2, R1, R2, L1=INF, L2=INF, metric=LOGLOSS,
                      pairs=PAIRS):
    """Smallest feasible D (>= 0) for fixed auxiliary rates; vectorized over r."""
    b = distortion_bounds(params, r1, r2, R1, R2, L1, L2, metric, pairs)
    shape = np.broadcast(np.asarray(r1), np.asarray(r2)).shape
    m = np.zeros(shape)
    for v in b.values():
        m = np.maximum(m, v)
    return m


# -- scalar fast path -------------------------------------------------------------

def _scalar_objective(params, R1, R2, L1, L2, metric, pairs):
    """Pure-Python twin of :func:`min_distortion_at` for the line searches."""
    sx, s1, s2 = params.sigma2_x, params.sigma2_n1, params.sigma2_n2
    terms = []
    for p in pairs:
        lhs = _lhs(p, R1, R2, L1, L2)
        if lhs == INF:
            continue
        terms.append((1 in p.Sc, 2 in p.Sc, 1 in p.K, 2 in p.K, lhs))
    loglos = metric == LOGLOSS
    offset = 0.5 * math.log2(TWO_PI_E) if loglos else 0.0

    def f(r1, r2):
        a1 = (1.0 - 2.0 ** (-2.0 * r1)) / s1
        a2 = (1.0 - 2.0 ** (-2.0 * r2)) / s2
        best = 0.0
        for in1, in2, k1, k2, lhs in terms:
            prec = 1.0 / sx + (a1 if in1 else 0.0) + (a2 if in2 else 0.0)
            g = offset - 0.5 * math.log2(prec)
            if k1:
                g += r1
            if k2:
                g += r2
            gap = g - lhs
            b = gap if loglos else 2.0 ** (2.0 * gap)
            if b > best:
                best = b
        return best

    return f


# -- 2-D convex minimizer -------------------------------------------------------------

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_min(f: Callable[[float], float], lo: float, hi: float, xatol: float):
    """Bounded golden-section search for a convex (possibly kinked or flat) f.

    Returns ``(x, f(x))``; the bracket ends are included as candidates.
    """
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xatol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    m = 0.5 * (a + b)
    return min(((f(m), m), (fc, c), (fd, d), (f(lo), lo), (f(hi), hi)))[::-1]


def _nested_min(f: Callable[[float, float], float], box, xatol):
    (lo1, hi1), (lo2, hi2) = box

    def inner(r1):
        return golden_min(lambda r2: f(r1, r2), lo2, hi2, xatol)

    r1, _ = golden_min(lambda r1: inner(r1)[1], lo1, hi1, xatol)
    r2, v = inner(r1)
    return r1, r2, v


def minimize_over_rates(f_vec, f_scalar, r_max: float, cfg: SearchConfig):
    """Minimize a convex function of (r1, r2) over [0, r_max]^2.

    Returns ``(value, r1, r2)``.  The grid picks a cell; a box of one grid
    step around it is searched by nested line minimization, and the box is
    re-centred while the minimizer sits on an interior box edge.
    """
    n = cfg.grid
    axis = np.linspace(0.0, r_max, n)
    R1g, R2g = np.meshgrid(axis, axis, indexing="ij")
    vals = f_vec(R1g, R2g)
    i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
    best = (float(vals[i, j]), float(axis[i]), float(axis[j]))
    h = axis[1] - axis[0]
    c1, c2 = best[1], best[2]
    for _ in range(cfg.max_recenter):
        box = ((max(0.0, c1 - h), min(r_max, c1 + h)), (max(0.0, c2 - h), min(r_max, c2 + h)))
        r1, r2, v = _nested_min(f_scalar, box, cfg.xatol)
        if v <= best[0]:
            best = (v, r1, r2)
        edge = 4 * cfg.xatol + 1e-6 * h
        on_edge = ((abs(r1 - box[0][0]) < edge and box[0][0] > 0)
                   or (abs(r1 - box[0][1]) < edge and box[0][1] < r_max)
                   or (abs(r2 - box[1][0]) < edge and box[1][0] > 0)
                   or (abs(r2 - box[1][1]) < edge and box[1][1] < r_max))
        if not on_edge or (r1, r2) == (c1, c2):
            break
        c1, c2 = r1, r2
    return tuple(float(x) for x in best)


def _default_r_max(cfg: SearchConfig, *rates) -> float:
    if cfg.r_max is not None:
        return float(cfg.r_max)
    return sum(x for x in rates if math.isfinite(x)) + cfg.headroom


# -- region membership and minimum distortion ----------------------------------------

@dataclass(frozen=True)
class MembershipResult:
    verdict: bool
    witness: AuxRates | None
    max_violation: float
    message: str = ""

    def to_dict(self) -> dict:
        return {"verdict": self.verdict,
                "witness": None if self.witness is None else
                {"r1": self.witness.r1, "r2": self.witness.r2},
                "max_violation": self.max_violation, "message": self.message}


def membership(params: GaussianCeoParams, point: RateTuple, metric: str = LOGLOSS,
               cfg: SearchConfig | None = None, eps: float = TOL) -> MembershipResult:
    """Whether some (r1, r2) makes ``point`` satisfy all nine constraints.

    The worst constraint violation is convex in (r1, r2), so it is minimized
    directly; the tuple is achievable iff the minimum is at most ``eps``.
    """
    _check_metric(metric)
    cfg = cfg or SearchConfig()
    if metric == QUADRATIC and point.D <= 0:
        return MembershipResult(False, None, INF,
                                "quadratic distortion requires D > 0; D = 0 is not achievable")
    R1, R2, L1, L2, D = point.R1, point.R2, point.L1, point.L2, point.D
    gD = D if metric == LOGLOSS else 0.5 * math.log2(D)
    live = [(p, _lhs(p, R1, R2, L1, L2) + gD) for p in PAIRS if _lhs(p, R1, R2, L1, L2) != INF]

    def f_vec(r1, r2):
        out = np.full(np.broadcast(r1, r2).shape, -INF)
        for p, lhs in live:
            out = np.maximum(out, _pair_rhs(params, r1, r2, p, metric) - lhs)
        return out

    def f_scalar(r1, r2):
        return float(f_vec(np.float64(r1), np.float64(r2)))

    r_max = _default_r_max(cfg, R1, R2, L1, L2)
    v, r1, r2 = minimize_over_rates(f_vec, f_scalar, r_max, cfg)
    ok = v <= eps
    witness = AuxRates(r1, r2)
    if ok:
        # re-check with the canonical evaluator
        cs = all_constraints(params, witness, metric)
        ok = evaluate(cs, point, eps).verdict
    return MembershipResult(ok, witness if ok else None, max(v, 0.0),
                            "" if ok else f"smallest worst-case violation {v:.3e} at r=({r1:.6g},{r2:.6g})")


def min_distortion(params: GaussianCeoParams, R1: float, R2: float, L1: float = INF,
                   L2: float | None = None, metric: str = LOGLOSS,
                   cfg: SearchConfig | None = None,
                   pairs: Sequence[SubsetPair] = PAIRS) -> CurveRow:
    """Minimum achievable D for fixed rates; ``L2=None`` drops the L2 requirement.

    ``pairs`` restricts the constraint family (e.g. to the rate/distortion
    subfamily without leakage terms).
    """
    _check_metric(metric)
    cfg = cfg or SearchConfig()
    L2v = INF if L2 is None else L2
    for name, v in (("R1", R1), ("R2", R2), ("L1", L1), ("L2", L2v)):
        if math.isnan(v) or v < 0:
            raise ValueError(f"{name} must be >= 0, got {v}")

    def f_vec(r1, r2):
        return min_distortion_at(params, r1, r2, R1, R2, L1, L2v, metric, pairs)

    f_scalar = _scalar_objective(params, R1, R2, L1, L2v, metric, pairs)
    r_max = _default_r_max(cfg, R1, R2, L1, L2v)
    v, r1, r2 = minimize_over_rates(f_vec, f_scalar, r_max, cfg)
    return CurveRow(L1=L1, min_D=v, r1=r1, r2=r2)


def _curve_point(args):
    params, R1, R2, L1, L2, metric, cfg = args
    return min_distortion(params, R1, R2, L1, L2, metric, cfg)


def worker_count(default: int = 1) -> int:
    """Worker cap from ``CEOLEAK_WORKERS`` (default 1: run in-process)."""
    raw = os.environ.get("CEOLEAK_WORKERS")
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"CEOLEAK_WORKERS must be an integer, got {raw!r}") from None
    return max(1, n)


def leakage_curve(params: GaussianCeoParams, R1: float, R2: float, L1_grid: Sequence[float],
                  metric: str = LOGLOSS, L2: float | None = None,
                  cfg: SearchConfig | None = None, workers: int | None = None) -> list[CurveRow]:
    """Minimum distortion at each L1 of ``L1_grid``.

    Every point is an independent optimization, so the result does not
    depend on ``workers``.
    """
    cfg = cfg or SearchConfig()
    workers = worker_count() if workers is None else workers
    jobs = [(params, R1, R2, float(l1), L2, metric, cfg) for l1 in L1_grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_curve_point, jobs))
    return [_curve_point(j) for j in jobs]


def l1_grid(start=0.0, stop=3.0, step=0.05) -> np.ndarray:
    n = int(round((stop - start) / step))
    return np.round(start + step * np.arange(n + 1), 12)


@dataclass(frozen=True)
class Saturation:
    l1_star: float
    d_inf: float
    rows: tuple[CurveRow, ...] = field(repr=False)


def saturation_analysis(params: GaussianCeoParams, R1: float, R2: float,
                        metric: str = LOGLOSS, tol: float = 1e-6, grid=None,
                        cfg: SearchConfig | None = None, workers=None) -> Saturation:
    grid = l1_grid() if grid is None else grid
    rows = leakage_curve(params, R1, R2, grid, metric, None, cfg, workers)
    d_inf = min_distortion(params, R1, R2, INF, None, metric, cfg).min_D
    star = INF
    for row in reversed(rows):
        if abs(row.min_D - d_inf) < tol:
            star = row.L1
        else:
            break
    return Saturation(star, d_inf, tuple(rows))


def saturation_threshold(params: GaussianCeoParams, R1: float, R2: float,
                         metric: str = LOGLOSS, tol: float = 1e-6, grid=None,
                         cfg: SearchConfig | None = None) -> float:
    """Smallest grid L1 from which on the minimum distortion stays within ``tol``
    of its L1-unconstrained value; ``inf`` if the grid never gets there."""
    return saturation_analysis(params, R1, R2, metric, tol, grid, cfg).l1_star


TABLE1 = (
    {"row": 1, "sigma2_x": 2.0, "sigma2_n1": 1.0, "sigma2_n2": 1.0, "R1": 0.5, "R2": 0.5},
    {"row": 2, "sigma2_x": 2.0, "sigma2_n1": 1.0, "sigma2_n2": 1.0, "R1": 1.0, "R2": 0.5},
    {"row": 3, "sigma2_x": 5.0, "sigma2_n1": 1.0, "sigma2_n2": 1.0, "R1": 0.5, "R2": 0.5},
    {"row": 4, "sigma2_x": 5.0, "sigma2_n1": 1.0, "sigma2_n2": 1.0, "R1": 1.0, "R2": 0.5},
)


def table1_params(row: dict) -> GaussianCeoParams:
    return GaussianCeoParams(row["sigma2_x"], row["sigma2_n1"], row["sigma2_n2"])
