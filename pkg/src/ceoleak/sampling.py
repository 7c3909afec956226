"""Seeded random models and auxiliary systems for verification sweeps.

These are samplers, not optimizers: nothing here claims to trace the exact
discrete region boundary.
"""

from __future__ import annotations

import numpy as np

from .info import AuxiliarySystem, DiscreteCeoModel


def _stochastic(rng, shape):
    # Dirichlet(1) rows; uniform over the simplex
    k = rng.gamma(1.0, size=shape)
    return k / k.sum(axis=-1, keepdims=True)


def random_model(rng: np.random.Generator, nx=2, ny1=2, ny2=2, nz=2,
                 side_info=True) -> DiscreteCeoModel:
    px = _stochastic(rng, (nx,))
    py1 = _stochastic(rng, (nx, ny1))
    py2 = _stochastic(rng, (nx, ny2))
    pz = _stochastic(rng, (nx, nz)) if side_info else None
    return DiscreteCeoModel(px, py1, py2, pz)


def random_aux(rng: np.random.Generator, model: DiscreteCeoModel, nq=1, nu1=2, nu2=2,
               nv1=2, nv2=2, with_v=True) -> AuxiliarySystem:
    pq = _stochastic(rng, (nq,))
    pu1 = _stochastic(rng, (model.ny1, nq, nu1))
    pu2 = _stochastic(rng, (model.ny2, nq, nu2))
    if not with_v:
        return AuxiliarySystem(pq, pu1, pu2)
    pv1 = _stochastic(rng, (nu1, nq, nv1))
    pv2 = _stochastic(rng, (nu2, nq, nv2))
    return AuxiliarySystem(pq, pu1, pu2, pv1, pv2)


def binary_symmetric(p: float) -> np.ndarray:
    return np.array([[1 - p, p], [p, 1 - p]])


def bsc_model(crossover=0.1, eve_crossover=None) -> DiscreteCeoModel:
    """Uniform binary source observed by both agents through BSC(crossover)."""
    ch = binary_symmetric(crossover)
    pz = None if eve_crossover is None else binary_symmetric(eve_crossover)
    return DiscreteCeoModel(np.array([0.5, 0.5]), ch, ch, pz)


def copy_aux(model: DiscreteCeoModel, copy_u1=True, copy_u2=True) -> AuxiliarySystem:
    """U_k = Y_k (identity test channel) or constant, with |Q| = 1."""
    u1 = np.eye(model.ny1)[:, None, :] if copy_u1 else np.ones((model.ny1, 1, 1))
    u2 = np.eye(model.ny2)[:, None, :] if copy_u2 else np.ones((model.ny2, 1, 1))
    return AuxiliarySystem(np.ones(1), u1, u2)
