"""Seeded verification suites behind ``ceoleak verify``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import discrete as db
from . import gaussian as gb
from .geometry import RateTuple, evaluate, ray_to_boundary
from .info import build_joint
from .sampling import random_aux, random_model

CHECKS = ("xi_zero", "inner_in_outer", "dominance", "saturation")


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    failures: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        msg = f"[{status}] {self.name}: {self.cases} cases"
        if self.failures:
            msg += f", {len(self.failures)} failing; first: {self.failures[0]}"
        return msg

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "cases": self.cases,
                "failures": self.failures}


def check_xi_zero(seed=0, n=100, tol=1e-10) -> CheckResult:
    rng = np.random.default_rng(seed)
    fails = []
    for i in range(n):
        model = random_model(rng)
        aux = random_aux(rng, model, nq=1 + i % 2)
        joint = build_joint(model, aux)
        x1, x2 = db.xi_k(joint, 1), db.xi_k(joint, 2)
        if not (x1 < tol and x2 < tol):
            fails.append(f"case {i}: xi1={x1:.3e} xi2={x2:.3e}")
    return CheckResult("xi_zero", not fails, n, fails)


def sample_boundary_points(cs, rng, n=20):
    """Points on the boundary of an up-closed region, reached along random rays."""
    pts = []
    for _ in range(n):
        base = RateTuple(*rng.uniform(0.0, 1.0, size=5) * rng.integers(0, 2, size=5))
        direction = rng.uniform(0.05, 1.0, size=5)
        pts.append(ray_to_boundary(cs, base, direction))
    return pts


def check_inner_in_outer(seed=0, n=50, points=20, tol=1e-9) -> CheckResult:
    rng = np.random.default_rng(seed)
    fails = []
    for i in range(n):
        model = random_model(rng, side_info=bool(i % 2))
        aux = random_aux(rng, model, nq=1 + i % 2)
        if i % 2:
            inner, outer = db.logloss_inner_si(model, aux), db.logloss_outer_si(model, aux)
        else:
            inner, outer = db.logloss_inner_no_si(model, aux), db.logloss_outer_no_si(model, aux)
        for p in sample_boundary_points(inner, rng, points):
            rep = evaluate(outer, p, tol)
            if not rep.verdict:
                lab, s = rep.violations[0]
                fails.append(f"case {i} ({inner.name}): {lab} slack {s:.3e}")
                break
    return CheckResult("inner_in_outer", not fails, n, fails)


def check_dominance(seed=0, n=100, tol=1e-9) -> CheckResult:
    rng = np.random.default_rng(seed)
    fails = []
    for i in range(n):
        model = random_model(rng, side_info=False)
        aux = random_aux(rng, model, nq=1 + i % 2, with_v=False)
        rep = db.dominance_report(model, aux, tol)
        if not rep.verdict:
            fails.append(f"case {i}: {rep.summary}")
    return CheckResult("dominance", not fails, n, fails)


def check_saturation(sigma2_x=None, tol=1e-6, metrics=gb.METRICS, grid=None) -> CheckResult:
    rows = [r for r in gb.TABLE1 if sigma2_x is None or r["sigma2_x"] == sigma2_x]
    grid = gb.l1_grid() if grid is None else grid
    fails = []
    cases = 0
    curves = {}
    for row in rows:
        params = gb.table1_params(row)
        for metric in metrics:
            cases += 1
            sat = gb.saturation_analysis(params, row["R1"], row["R2"], metric, tol, grid)
            d = [r.min_D for r in sat.rows]
            curves[(row["row"], metric)] = d
            if any(d[j + 1] > d[j] + 1e-9 for j in range(len(d) - 1)):
                fails.append(f"row {row['row']} {metric}: curve increases")
            if not np.isfinite(sat.l1_star):
                fails.append(f"row {row['row']} {metric}: no saturation on the grid")
    # (1.0, 0.5) rows lie at or below the (0.5, 0.5) rows with the same variances
    for lo, hi in ((2, 1), (4, 3)):
        for metric in metrics:
            if (lo, metric) in curves and (hi, metric) in curves:
                a, b = curves[(lo, metric)], curves[(hi, metric)]
                if any(x > y + 1e-9 for x, y in zip(a, b)):
                    fails.append(f"row {lo} above row {hi} ({metric})")
    return CheckResult("saturation", not fails, cases, fails)


def run_checks(names=CHECKS, seed=0, sigma2_x=None) -> list[CheckResult]:
    out = []
    for name in names:
        if name == "xi_zero":
            out.append(check_xi_zero(seed))
        elif name == "inner_in_outer":
            out.append(check_inner_in_outer(seed))
        elif name == "dominance":
            out.append(check_dominance(seed))
        elif name == "saturation":
            out.append(check_saturation(sigma2_x))
        else:
            raise ValueError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    return out
