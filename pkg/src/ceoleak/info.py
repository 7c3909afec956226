"""Discrete CEO models, auxiliary systems and exact information measures.

The joint law of every single-letter bound factorizes as

    P_Q P_X P_{Z|X} prod_k P_{Y_k|X} P_{U_k|Y_k,Q} P_{V_k|U_k,Q}

and is held as one dense tensor with axis order
(Q, X, Z, Y1, Y2, U1, U2, V1, V2).  All logarithms are base 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

AXES = ("Q", "X", "Z", "Y1", "Y2", "U1", "U2", "V1", "V2")
AXIS = {name: i for i, name in enumerate(AXES)}

PROB_TOL = 1e-12
MASS_TOL = 1e-10
CLAMP_TOL = 1e-12


def _check_vector(p, name):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a nonempty probability vector, got shape {p.shape}")
    if np.any(p < 0):
        raise ValueError(f"{name} has negative entries")
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"{name} sums to {p.sum():.12g}, not 1")
    return p


def _check_kernel(k, name, n_in=None):
    """Validate a stochastic kernel whose last axis is the output alphabet."""
    k = np.asarray(k, dtype=float)
    if k.ndim < 2 or k.size == 0:
        raise ValueError(f"{name} must be a stochastic kernel, got shape {k.shape}")
    if n_in is not None and k.shape[:-1] != tuple(n_in):
        raise ValueError(f"{name} has input shape {k.shape[:-1]}, expected {tuple(n_in)}")
    if np.any(k < 0):
        idx = tuple(int(i) for i in np.argwhere(k < 0)[0])
        raise ValueError(f"{name}{list(idx)} is negative")
    sums = k.sum(axis=-1)
    bad = np.argwhere(np.abs(sums - 1.0) > PROB_TOL)
    if bad.size:
        idx = tuple(int(i) for i in bad[0])
        raise ValueError(f"{name} row {list(idx)} sums to {sums[idx]:.12g}, not 1")
    return k


@dataclass(frozen=True, eq=False)
class DiscreteCeoModel:
    """Source X with agent channels Y1|X, Y2|X and eavesdropper channel Z|X.

    ``pz_given_x`` may be omitted, in which case Z is a constant (the model
    without side information at the eavesdropper).
    """

    px: np.ndarray
    py1_given_x: np.ndarray
    py2_given_x: np.ndarray
    pz_given_x: np.ndarray | None = None

    def __post_init__(self):
        px = _check_vector(self.px, "px")
        nx = px.size
        object.__setattr__(self, "px", px)
        object.__setattr__(self, "py1_given_x", _check_kernel(self.py1_given_x, "py1_given_x", (nx,)))
        object.__setattr__(self, "py2_given_x", _check_kernel(self.py2_given_x, "py2_given_x", (nx,)))
        pz = np.ones((nx, 1)) if self.pz_given_x is None else self.pz_given_x
        object.__setattr__(self, "pz_given_x", _check_kernel(pz, "pz_given_x", (nx,)))

    @property
    def nx(self):
        return self.px.size

    @property
    def ny1(self):
        return self.py1_given_x.shape[1]

    @property
    def ny2(self):
        return self.py2_given_x.shape[1]

    @property
    def nz(self):
        return self.pz_given_x.shape[1]

    def without_eve(self) -> "DiscreteCeoModel":
        return DiscreteCeoModel(self.px, self.py1_given_x, self.py2_given_x)

    def to_dict(self) -> dict:
        return {"px": self.px.tolist(),
                "py1_given_x": self.py1_given_x.tolist(),
                "py2_given_x": self.py2_given_x.tolist(),
                "pz_given_x": self.pz_given_x.tolist()}


# caps for the general inner bound; cardinality_caps() has the per-bound variants
DEFAULT_CAPS = {"V_extra": 8, "U_extra": (8, 6), "Q": 6}


def cardinality_caps(ny: int, v_extra: int = 8, u_extra: tuple[int, int] = (8, 6),
                     q_max: int = 6) -> dict[str, int]:
    return {"V": ny + v_extra, "U": (ny + u_extra[0]) * (ny + u_extra[1]), "Q": q_max}


@dataclass(frozen=True, eq=False)
class AuxiliarySystem:
    """Time sharing Q and the per-agent test channels U_k|Y_k,Q and V_k|U_k,Q.

    Kernels are indexed ``[input, q, output]``.  Omitted V kernels mean
    V_k is constant.
    """

    pq: np.ndarray
    pu1_given_y1_q: np.ndarray
    pu2_given_y2_q: np.ndarray
    pv1_given_u1_q: np.ndarray | None = None
    pv2_given_u2_q: np.ndarray | None = None

    def __post_init__(self):
        pq = _check_vector(self.pq, "pq")
        nq = pq.size
        object.__setattr__(self, "pq", pq)
        for k in (1, 2):
            name = f"pu{k}_given_y{k}_q"
            u = _check_kernel(getattr(self, name), name)
            if u.ndim != 3 or u.shape[1] != nq:
                raise ValueError(f"{name} must have shape (|Y{k}|, |Q|={nq}, |U{k}|), got {u.shape}")
            object.__setattr__(self, name, u)
            vname = f"pv{k}_given_u{k}_q"
            v = getattr(self, vname)
            if v is None:
                v = np.ones((u.shape[2], nq, 1))
            v = _check_kernel(v, vname)
            if v.ndim != 3 or v.shape[:2] != (u.shape[2], nq):
                raise ValueError(f"{vname} must have shape (|U{k}|={u.shape[2]}, |Q|={nq}, |V{k}|), "
                                 f"got {v.shape}")
            object.__setattr__(self, vname, v)

    @property
    def nq(self):
        return self.pq.size

    def sizes(self) -> dict[str, int]:
        return {"Q": self.nq,
                "U1": self.pu1_given_y1_q.shape[2], "U2": self.pu2_given_y2_q.shape[2],
                "V1": self.pv1_given_u1_q.shape[2], "V2": self.pv2_given_u2_q.shape[2]}

    def check_caps(self, model: DiscreteCeoModel, v_extra=8, u_extra=(8, 6), q_max=6):
        """Raise if any auxiliary alphabet exceeds the configured cardinality caps."""
        s = self.sizes()
        for k, ny in ((1, model.ny1), (2, model.ny2)):
            caps = cardinality_caps(ny, v_extra, u_extra, q_max)
            if s[f"U{k}"] > caps["U"]:
                raise ValueError(f"|U{k}|={s[f'U{k}']} exceeds cap {caps['U']}")
            if s[f"V{k}"] > caps["V"]:
                raise ValueError(f"|V{k}|={s[f'V{k}']} exceeds cap {caps['V']}")
        if s["Q"] > q_max:
            raise ValueError(f"|Q|={s['Q']} exceeds cap {q_max}")

    def without_v(self) -> "AuxiliarySystem":
        return AuxiliarySystem(self.pq, self.pu1_given_y1_q, self.pu2_given_y2_q)

    def to_dict(self) -> dict:
        return {"pq": self.pq.tolist(),
                "pu1_given_y1_q": self.pu1_given_y1_q.tolist(),
                "pu2_given_y2_q": self.pu2_given_y2_q.tolist(),
                "pv1_given_u1_q": self.pv1_given_u1_q.tolist(),
                "pv2_given_u2_q": self.pv2_given_u2_q.tolist()}


@dataclass(frozen=True, eq=False)
class JointDistribution:
    p: np.ndarray
    axes: tuple[str, ...] = AXES

    def __post_init__(self):
        if self.p.ndim != len(self.axes):
            raise ValueError(f"tensor has {self.p.ndim} axes, registry names {len(self.axes)}")
        total = self.p.sum()
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"joint mass is {total:.12g}, not 1")

    @property
    def shape(self) -> dict[str, int]:
        return dict(zip(self.axes, self.p.shape))

    def axis(self, name: str) -> int:
        try:
            return self.axes.index(name)
        except ValueError:
            raise KeyError(f"unknown symbol {name!r}; registered: {', '.join(self.axes)}") from None

    def marginal(self, names: Iterable[str]) -> np.ndarray:
        """Marginal over ``names``, axes returned in the order given."""
        names = list(names)
        idx = [self.axis(n) for n in names]
        if len(set(idx)) != len(idx):
            raise ValueError(f"repeated symbol in {names}")
        drop = tuple(i for i in range(self.p.ndim) if i not in idx)
        m = self.p.sum(axis=drop)
        kept = sorted(idx)
        return np.transpose(m, [kept.index(i) for i in idx])


def build_joint(model: DiscreteCeoModel, aux: AuxiliarySystem) -> JointDistribution:
    """Dense joint of (Q, X, Z, Y1, Y2, U1, U2, V1, V2) from the product factorization."""
    for k, ny in ((1, model.ny1), (2, model.ny2)):
        name = f"pu{k}_given_y{k}_q"
        u = getattr(aux, name)
        if u.shape[0] != ny:
            raise ValueError(f"{name} expects |Y{k}|={u.shape[0]} inputs but the model has |Y{k}|={ny}")
    p = np.einsum("q,x,xz,xa,xb,aqc,bqd,cqe,dqf->qxzabcdef",
                  aux.pq, model.px, model.pz_given_x,
                  model.py1_given_x, model.py2_given_x,
                  aux.pu1_given_y1_q, aux.pu2_given_y2_q,
                  aux.pv1_given_u1_q, aux.pv2_given_u2_q)
    return JointDistribution(p)


def _as_names(vars) -> tuple[str, ...]:
    if isinstance(vars, str):
        vars = vars.replace(",", " ").split()
    return tuple(vars)


def _clamp(v: float) -> float:
    if v < 0:
        if v < -CLAMP_TOL:
            raise ArithmeticError(f"information measure came out negative: {v:.3e}")
        return 0.0
    return float(v)


def _plogp_sum(m: np.ndarray) -> float:
    m = m[m > 0]
    return float(-(m * np.log2(m)).sum())


def entropy(joint: JointDistribution, vars) -> float:
    """H(vars) in bits.  ``vars`` is an iterable of symbols or a string like ``"X U1"``."""
    names = _as_names(vars)
    if not names:
        return 0.0
    return _clamp(_plogp_sum(joint.marginal(names)))


def conditional_entropy(joint: JointDistribution, vars, given=()) -> float:
    a, c = _as_names(vars), _as_names(given)
    if set(a) & set(c):
        raise ValueError(f"symbol sets overlap: {sorted(set(a) & set(c))}")
    return _clamp(_raw_entropy(joint, a + c) - _raw_entropy(joint, c))


def _raw_entropy(joint, names):
    if not names:
        return 0.0
    return _plogp_sum(joint.marginal(names))


def conditional_mutual_information(joint: JointDistribution, A, B, C=()) -> float:
    """I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C) in bits."""
    a, b, c = _as_names(A), _as_names(B), _as_names(C)
    for n in a + b + c:
        joint.axis(n)
    sa, sb, sc = set(a), set(b), set(c)
    if len(sa) != len(a) or len(sb) != len(b) or len(sc) != len(c):
        raise ValueError("repeated symbol inside a symbol set")
    if (sa & sb) or (sa & sc) or (sb & sc):
        raise ValueError(f"symbol sets must be disjoint: {a} / {b} / {c}")
    if not a or not b:
        raise ValueError("both sides of a mutual information need at least one symbol")
    v = (_raw_entropy(joint, a + c) + _raw_entropy(joint, b + c)
         - _raw_entropy(joint, a + b + c) - _raw_entropy(joint, c))
    return _clamp(v)


def mutual_information(joint: JointDistribution, A, B) -> float:
    return conditional_mutual_information(joint, A, B, ())


def expected_min_distortion(joint: JointDistribution, dist: np.ndarray) -> float:
    """min over maps xhat(u1, u2, q) of E[d(X, xhat)] for a finite distortion matrix.

    The minimization separates over the cells (q, u1, u2), so picking the
    best reproduction symbol per cell is the exhaustive minimum over all
    deterministic reproduction maps.
    """
    dist = np.asarray(dist, dtype=float)
    nx = joint.shape["X"]
    if dist.ndim != 2 or dist.shape[0] != nx:
        raise ValueError(f"distortion matrix must have shape (|X|={nx}, |Xhat|), got {dist.shape}")
    if np.any(dist < 0) or not np.all(np.isfinite(dist)):
        raise ValueError("distortion matrix entries must be finite and nonnegative")
    m = joint.marginal(("Q", "U1", "U2", "X"))
    cost = np.einsum("abcx,xh->abch", m, dist)
    return float(cost.min(axis=-1).sum())
