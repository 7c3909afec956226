"""Single-letter inner and outer bounds for discrete sources.

Each bound is returned as a 9-constraint :class:`~ceoleak.geometry.ConstraintSet`
with labels ``R1, R2, R1+R2, L1, L2, L1+L2, R1+L2, R2+L1, D``.  Outer bounds
for log-loss carry the distortion on the left-hand side (``d = 1``), e.g.
``L1 + D >= H(X|U2,Q)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (TOL, Constraint, ConstraintSet, RateTuple, dominance_gaps,
                       dominates, evaluate)
from .info import (AuxiliarySystem, DiscreteCeoModel, JointDistribution, build_joint,
                   conditional_entropy, conditional_mutual_information, expected_min_distortion)

LABELS = ("R1", "R2", "R1+R2", "L1", "L2", "L1+L2", "R1+L2", "R2+L1", "D")
COEFFS = {
    "R1": (1, 0, 0, 0), "R2": (0, 1, 0, 0), "R1+R2": (1, 1, 0, 0),
    "L1": (0, 0, 1, 0), "L2": (0, 0, 0, 1), "L1+L2": (0, 0, 1, 1),
    "R1+L2": (1, 0, 0, 1), "R2+L1": (0, 1, 1, 0), "D": (0, 0, 0, 0),
}
EQ_TOL = 1e-9


class Terms:
    """Memoized information terms of one joint distribution.

    ``I("Y1", "U1", "U2 Q")`` is I(Y1;U1|U2,Q) and ``H("X", "U1 U2 Q")`` is
    H(X|U1,U2,Q).  Every evaluated term is recorded under its printed name.
    """

    def __init__(self, joint: JointDistribution):
        self.joint = joint
        self.values: dict[str, float] = {}

    @staticmethod
    def _fmt(s):
        return ",".join(s.split())

    def I(self, a, b, c="") -> float:
        name = f"I({self._fmt(a)};{self._fmt(b)}" + (f"|{self._fmt(c)})" if c else ")")
        if name not in self.values:
            self.values[name] = conditional_mutual_information(self.joint, a, b, c)
        return self.values[name]

    def H(self, a, c="") -> float:
        name = f"H({self._fmt(a)}" + (f"|{self._fmt(c)})" if c else ")")
        if name not in self.values:
            self.values[name] = conditional_entropy(self.joint, a, c)
        return self.values[name]

    def xi(self, k: int) -> float:
        kk = 3 - k
        v = self.I(f"V{k}", f"U{kk}", f"Y{k} Y{kk} Q")
        self.values[f"xi{k}"] = v
        return v

    def xi_prime(self) -> float:
        v = self.I("V1", "V2", "Q")
        self.values["xi_prime"] = v
        return v


def _joint_and_terms(model, aux):
    joint = build_joint(model, aux)
    return joint, Terms(joint)


def _make_set(name, rhs: dict, d_coeffs: dict, terms: Terms, extra=None) -> ConstraintSet:
    cons = tuple(Constraint(COEFFS[lab], d_coeffs[lab], float(rhs[lab]), lab) for lab in LABELS)
    q = dict(terms.values)
    if extra:
        q.update(extra)
    return ConstraintSet(cons, name=name, quantities=q)


def _distortion_rhs(t: Terms, distortion):
    if distortion is None:
        return t.H("X", "U1 U2 Q")
    return expected_min_distortion(t.joint, distortion)


_RATE_ONLY = dict.fromkeys(LABELS[:-1], 0) | {"D": 1}
_WITH_D = dict.fromkeys(LABELS, 1)


def xi_k(joint: JointDistribution, k: int) -> float:
    """Outer-bound correction I(V_k;U_k'|Y_k,Y_k',Q) with k' = 3 - k."""
    if k not in (1, 2):
        raise ValueError(f"agent index must be 1 or 2, got {k}")
    return Terms(joint).xi(k)


def xi_prime(joint: JointDistribution) -> float:
    """I(V1;V2|Q), the correction in the side-information outer bound."""
    return Terms(joint).xi_prime()


def information_quantities(model: DiscreteCeoModel, aux: AuxiliarySystem) -> dict[str, float]:
    """Every information term used by any bound in this module, by printed name."""
    joint, t = _joint_and_terms(model, aux)
    for k in (1, 2):
        kk = 3 - k
        t.I(f"Y{k}", f"U{k}", f"U{kk} Q")
        t.I("X", f"U{k}", f"U{kk} Q")
        t.I(f"V{k}", f"U{kk}", "Q")
        t.I("Z", f"V{k}", "Q")
        t.I("X", f"V{k}", f"V{kk} Q")
        t.I("X", f"V{k}", "Q")
        t.I(f"Y{k}", f"U{k}", "X Q")
        t.I(f"Y{k}", f"U{k}", "Q")
        t.I("X", f"U{k}", "Q")
        t.H("X", f"U{k} Q")
        t.xi(k)
    t.I("Y1 Y2", "U1 U2", "Q")
    t.I("X", "U1 U2", "Q")
    t.I("V1", "V2", "Q")
    t.I("X", "V1 V2", "Q")
    t.I("Y1 X", "U1 U2", "Q")
    t.I("X Y2", "U1 U2", "Q")
    t.H("X")
    t.H("X", "U1 U2 Q")
    t.xi_prime()
    return dict(t.values)


# -- general distortion: inner and outer bounds ------------------------------

def inner_bound_constraints(model: DiscreteCeoModel, aux: AuxiliarySystem,
                            distortion=None) -> ConstraintSet:
    """Inner bound for one auxiliary system.

    ``distortion=None`` means log-loss, whose optimal soft reproduction
    makes the distortion floor H(X|U1,U2,Q); otherwise ``distortion`` is a
    finite |X| x |Xhat| matrix.
    """
    _, t = _joint_and_terms(model, aux)
    zv1, zv2 = t.I("Z", "V1", "Q"), t.I("Z", "V2", "Q")
    rhs = {
        "R1": t.I("Y1", "U1", "U2 Q"),
        "R2": t.I("Y2", "U2", "U1 Q"),
        "R1+R2": t.I("Y1 Y2", "U1 U2", "Q"),
        "L1": t.I("X", "U1", "U2 Q") + t.I("V1", "U2", "Q") - zv1,
        "L2": t.I("X", "U2", "U1 Q") + t.I("V2", "U1", "Q") - zv2,
        "L1+L2": t.I("X", "U1 U2", "Q") + t.I("V1", "V2", "Q") - zv1 - zv2,
        "R1+L2": t.I("Y1 X", "U1 U2", "Q") - zv2,
        "R2+L1": t.I("X Y2", "U1 U2", "Q") - zv1,
        "D": _distortion_rhs(t, distortion),
    }
    return _make_set("inner", rhs, _RATE_ONLY, t)


def outer_bound_constraints(model: DiscreteCeoModel, aux: AuxiliarySystem,
                            distortion=None) -> ConstraintSet:
    """Outer bound with V-based leakage terms and the xi_k corrections."""
    _, t = _joint_and_terms(model, aux)
    zv1, zv2 = t.I("Z", "V1", "Q"), t.I("Z", "V2", "Q")
    xi1, xi2 = t.xi(1), t.xi(2)
    rhs = {
        "R1": t.I("Y1", "U1", "U2 Q"),
        "R2": t.I("Y2", "U2", "U1 Q"),
        "R1+R2": t.I("Y1 Y2", "U1 U2", "Q"),
        "L1": t.I("X", "V1", "V2 Q") + t.I("V1", "U2", "Q") - zv1 - xi1,
        "L2": t.I("X", "V2", "V1 Q") + t.I("V2", "U1", "Q") - zv2 - xi2,
        "L1+L2": (t.I("X", "V1 V2", "Q") + t.I("V1", "V2", "Q") - zv1 - zv2
                  - min(xi1, xi2)),
        "R1+L2": t.I("Y1", "U1", "U2 Q") + t.I("X", "V2", "Q") - zv2,
        "R2+L1": t.I("Y2", "U2", "U1 Q") + t.I("X", "V1", "Q") - zv1,
        "D": _distortion_rhs(t, distortion),
    }
    return _make_set("outer", rhs, _RATE_ONLY, t)


# -- log-loss, no side information at the eavesdropper -----------------------

def _check_no_si(model: DiscreteCeoModel):
    pz = model.pz_given_x
    if not np.allclose(pz, pz[0:1, :], atol=1e-12, rtol=0):
        raise ValueError("model has Z dependent on X; use the side-information bounds")


def logloss_inner_no_si(model: DiscreteCeoModel, aux: AuxiliarySystem) -> ConstraintSet:
    """Log-loss inner bound when the eavesdropper has no useful observation.

    V layers of ``aux`` are ignored; only the U test channels matter.
    """
    _check_no_si(model)
    _, t = _joint_and_terms(model.without_eve(), aux.without_v())
    rhs = {
        "R1": t.I("Y1", "U1", "U2 Q"),
        "R2": t.I("Y2", "U2", "U1 Q"),
        "R1+R2": t.I("Y1 Y2", "U1 U2", "Q"),
        "L1": t.I("X", "U1", "U2 Q"),
        "L2": t.I("X", "U2", "U1 Q"),
        "L1+L2": t.I("X", "U1 U2", "Q"),
        "R1+L2": t.I("Y1 X", "U1 U2", "Q"),
        "R2+L1": t.I("X Y2", "U1 U2", "Q"),
        "D": t.H("X", "U1 U2 Q"),
    }
    return _make_set("logloss_inner_no_si", rhs, _RATE_ONLY, t)


def _outer_core(t: Terms) -> dict[str, float]:
    a1, a2 = t.I("Y1", "U1", "X Q"), t.I("Y2", "U2", "X Q")
    hx = t.H("X")
    h1, h2 = t.H("X", "U1 Q"), t.H("X", "U2 Q")
    return {
        "R1": a1 + h2,
        "R2": a2 + h1,
        "R1+R2": a1 + a2 + hx,
        "L1": h2,
        "L2": h1,
        "L1+L2": hx,
        "R1+L2": a1 + hx,
        "R2+L1": a2 + hx,
        "D": t.H("X", "U1 U2 Q"),
    }


def logloss_outer_no_si(model: DiscreteCeoModel, aux: AuxiliarySystem) -> ConstraintSet:
    """Log-loss outer bound, every rate constraint in ``rates + D >= rhs`` form."""
    _check_no_si(model)
    _, t = _joint_and_terms(model.without_eve(), aux.without_v())
    return _make_set("logloss_outer_no_si", _outer_core(t), _WITH_D, t)


# -- log-loss with side information at the eavesdropper ----------------------

def logloss_inner_si(model: DiscreteCeoModel, aux: AuxiliarySystem) -> ConstraintSet:
    cs = inner_bound_constraints(model, aux, distortion=None)
    return ConstraintSet(cs.constraints, name="logloss_inner_si", quantities=cs.quantities)


def logloss_outer_si(model: DiscreteCeoModel, aux: AuxiliarySystem) -> ConstraintSet:
    _, t = _joint_and_terms(model, aux)
    rhs = _outer_core(t)
    zv1, zv2 = t.I("Z", "V1", "Q"), t.I("Z", "V2", "Q")
    xp = t.xi_prime()
    rhs["L1"] += t.I("V1", "U2", "Q") - zv1 - xp
    rhs["L2"] += t.I("V2", "U1", "Q") - zv2 - xp
    rhs["L1+L2"] += t.I("V1", "V2", "Q") - zv1 - zv2 - xp
    rhs["R1+L2"] -= zv2
    rhs["R2+L1"] -= zv1
    return _make_set("logloss_outer_si", rhs, _WITH_D, t)


def effective_rhs(cs: ConstraintSet, D: float) -> dict[str, float]:
    """Rate-side requirement of each constraint once D is fixed (rhs - d*g(D))."""
    from .geometry import transform_distortion
    out = {}
    for c in cs:
        out[c.label] = c.rhs - (transform_distortion(D, c.transform) if c.d else 0.0)
    return out


def si_gap_report(model: DiscreteCeoModel, aux: AuxiliarySystem) -> dict:
    """Inner minus outer requirement per constraint for the SI log-loss bounds.

    Both sets are compared at the optimal distortion D = H(X|U1,U2,Q), where
    the outer constraints reduce to pure rate requirements.  The numbers are
    reported as is; no bound on them is asserted.
    """
    inner = logloss_inner_si(model, aux)
    outer = logloss_outer_si(model, aux)
    d_opt = inner["D"].rhs
    ei, eo = effective_rhs(inner, d_opt), effective_rhs(outer, d_opt)
    rows = []
    for lab in LABELS:
        if lab == "D":
            continue
        rows.append({"label": lab, "inner": ei[lab], "outer": eo[lab],
                     "difference": ei[lab] - eo[lab]})
    return {"D": d_opt, "xi_prime": outer.quantities["xi_prime"], "rows": rows}


# -- extreme points and dominance ---------------------------------------------

BINDING = {
    "P1": ("R1+R2",),
    "P2": ("R1+R2", "R1+L2"),
    "P3": ("R1+R2", "R2+L1"),
    "P4": ("R1+R2", "R1+L2", "R2+L1", "L1+L2"),
    "P5": ("R1", "R1+R2", "R1+L2"),
    "P6": ("R2", "R1+R2", "R2+L1"),
    "P7": ("R1", "L1", "R1+R2", "L1+L2", "R1+L2", "R2+L1"),
    "P8": ("R2", "L2", "R1+R2", "L1+L2", "R1+L2", "R2+L1"),
    "P9": ("D", "R2", "L2", "R1+R2", "L1+L2", "R1+L2", "R2+L1"),
    "P10": ("D", "R1", "L1", "R1+R2", "L1+L2", "R1+L2", "R2+L1"),
}


def _pt(label, *coords):
    return RateTuple(*(float(c) for c in coords), label=label)


def extreme_points(model: DiscreteCeoModel, aux: AuxiliarySystem) -> list[RateTuple]:
    """The ten vertices P1..P10 of the no-SI log-loss outer polytope for fixed aux."""
    _check_no_si(model)
    _, t = _joint_and_terms(model.without_eve(), aux.without_v())
    a1, a2 = t.I("Y1", "U1", "X Q"), t.I("Y2", "U2", "X Q")
    b1, b2 = t.I("Y1", "U1", "Q"), t.I("Y2", "U2", "Q")
    x1, x2 = t.I("X", "U1", "Q"), t.I("X", "U2", "Q")
    h1, h2 = t.H("X", "U1 Q"), t.H("X", "U2 Q")
    hx, h12 = t.H("X"), t.H("X", "U1 U2 Q")
    return [
        _pt("P1", 0, 0, 0, 0, a1 + a2 + hx),
        _pt("P2", 0, a2, 0, 0, a1 + hx),
        _pt("P3", a1, 0, 0, 0, a2 + hx),
        _pt("P4", a1, a2, 0, 0, hx),
        _pt("P5", 0, b2, 0, x2, a1 + h2),
        _pt("P6", b1, 0, x1, 0, a2 + h1),
        _pt("P7", a1, b2, 0, x2, h2),
        _pt("P8", b1, a2, x1, 0, h1),
        _pt("P9", b1, t.I("Y2", "U2", "U1 Q"), x1, t.I("X", "U2", "U1 Q"), h12),
        _pt("P10", t.I("Y1", "U1", "U2 Q"), b2, t.I("X", "U1", "U2 Q"), x2, h12),
    ]


def check_binding(cs: ConstraintSet, p: RateTuple, binding, tol: float = EQ_TOL) -> list[str]:
    """Labels in ``binding`` that ``p`` does not meet with equality."""
    rep = evaluate(cs, p, tol)
    return [lab for lab in binding if abs(rep.slacks[lab]) > tol]


def _constant_u(aux: AuxiliarySystem, k: int) -> AuxiliarySystem:
    kernels = [aux.pu1_given_y1_q, aux.pu2_given_y2_q]
    u = kernels[k - 1]
    kernels[k - 1] = np.ones((u.shape[0], u.shape[1], 1))
    return AuxiliarySystem(aux.pq, *kernels)


def _corner(cs: ConstraintSet, t: Terms, label: str) -> RateTuple:
    """The inner-bound point (I(Y1;U1|Q), I(Y2;U2|U1,Q), I(X;U1|Q), I(X;U2|U1,Q), H(X|U1,U2,Q))
    read off a joint where at least one U is constant, so the expression is symmetric."""
    return _pt(label, t.I("Y1", "U1", "Q"), t.I("Y2", "U2", "U1 Q"),
               t.I("X", "U1", "Q"), t.I("X", "U2", "U1 Q"), t.H("X", "U1 U2 Q"))


@dataclass
class DominanceEntry:
    point: RateTuple
    dominator: RateTuple
    degeneration: str
    dominated: bool
    dominator_in_inner: bool
    gaps: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.dominated and self.dominator_in_inner

    def describe(self) -> str:
        if self.ok:
            return f"{self.point.label} dominated by {self.dominator.label} ({self.degeneration})"
        if not self.dominator_in_inner:
            return f"{self.point.label}: dominating point {self.dominator.label} is not in the inner region"
        bad = {k: v for k, v in self.gaps.items() if v > TOL}
        coord, mag = max(bad.items(), key=lambda kv: kv[1])
        return (f"{self.point.label} NOT dominated by {self.dominator.label}: "
                f"{coord} exceeds by {mag:.3e}")


@dataclass
class DominanceReport:
    entries: list[DominanceEntry]
    outer_feasible: dict

    @property
    def verdict(self) -> bool:
        return all(e.ok for e in self.entries) and all(self.outer_feasible.values())

    @property
    def summary(self) -> str:
        if self.verdict:
            return "inner dominates outer extreme points"
        return "; ".join(e.describe() for e in self.entries if not e.ok) or "extreme point infeasible"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "summary": self.summary,
            "entries": [{"point": e.point.to_dict(), "dominator": e.dominator.to_dict(),
                         "degeneration": e.degeneration, "dominated": e.dominated,
                         "dominator_in_inner": e.dominator_in_inner, "gaps": e.gaps}
                        for e in self.entries],
            "outer_feasible": self.outer_feasible,
        }


def dominance_report(model: DiscreteCeoModel, aux: AuxiliarySystem,
                     tol: float = TOL) -> DominanceReport:
    """Check that every outer extreme point is dominated by an inner-bound point.

    Dominating points come from degenerating the auxiliaries: both U
    constant for P1-P4, U1 constant for P5/P7, U2 constant for P6/P8, and
    P9/P10 themselves.  Each dominator is also checked against the inner
    bound evaluated on its own (degenerated) auxiliary system.
    """
    _check_no_si(model)
    base = model.without_eve()
    aux = aux.without_v()
    points = extreme_points(base, aux)
    outer = logloss_outer_no_si(base, aux)
    outer_ok = {p.label: evaluate(outer, p, tol).verdict for p in points}

    degenerate = {
        "U1,U2 constant": _constant_u(_constant_u(aux, 1), 2),
        "U1 constant": _constant_u(aux, 1),
        "U2 constant": _constant_u(aux, 2),
        "none": aux,
    }
    candidates = {}
    for name, a in degenerate.items():
        if name == "none":
            continue
        inner = logloss_inner_no_si(base, a)
        _, t = _joint_and_terms(base, a)
        dom = _corner(inner, t, f"inner[{name}]")
        candidates[name] = (dom, evaluate(inner, dom, tol).verdict)

    inner_full = logloss_inner_no_si(base, aux)
    assign = {"P1": "U1,U2 constant", "P2": "U1,U2 constant", "P3": "U1,U2 constant",
              "P4": "U1,U2 constant", "P5": "U1 constant", "P7": "U1 constant",
              "P6": "U2 constant", "P8": "U2 constant", "P9": "none", "P10": "none"}
    entries = []
    for p in points:
        name = assign[p.label]
        if name == "none":
            dom, ok_inner = p, evaluate(inner_full, p, tol).verdict
        else:
            dom, ok_inner = candidates[name]
        entries.append(DominanceEntry(p, dom, name, dominates(dom, p, tol), ok_inner,
                                      dominance_gaps(dom, p)))
    return DominanceReport(entries, outer_ok)


# -- equivocation counterexample ----------------------------------------------

@dataclass
class CounterexampleReport:
    gap: float
    outer_cap: float
    inner_max: float
    distortion: float
    consistent: bool

    @property
    def verdict(self) -> str:
        return "strict" if self.gap > EQ_TOL else "non-strict"

    def to_dict(self) -> dict:
        return {"gap": self.gap, "outer_delta1_cap": self.outer_cap,
                "inner_delta1_max": self.inner_max, "D": self.distortion,
                "consistent": self.consistent, "verdict": self.verdict}


def equivocation_counterexample(model: DiscreteCeoModel, aux: AuxiliarySystem) -> CounterexampleReport:
    """Equivocation bounds under log-loss do not meet.

    At the outer vertex D = I(Y1;U1|X,Q) + H(X|U2,Q) (where R1 may be zero)
    the outer cap on the equivocation Delta1 is H(X) - H(X|U2,Q) + D, while
    no inner point exceeds Delta1 = H(X).  The excess is I(Y1;U1|X,Q).
    """
    _, t = _joint_and_terms(model.without_eve(), aux.without_v())
    a1 = t.I("Y1", "U1", "X Q")
    hx, h2 = t.H("X"), t.H("X", "U2 Q")
    D = a1 + h2
    cap = hx - h2 + D
    gap = cap - hx
    return CounterexampleReport(gap=gap, outer_cap=cap, inner_max=hx, distortion=D,
                                consistent=abs(gap - a1) <= 1e-10)
