import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ceoleak.info import (AXES, AuxiliarySystem, DiscreteCeoModel, build_joint,
                          conditional_entropy, conditional_mutual_information, entropy,
                          expected_min_distortion, mutual_information)
from ceoleak.sampling import binary_symmetric, bsc_model, random_aux, random_model

from oracles import cmi, enumerate_joint, h2


def constant_aux(model):
    return AuxiliarySystem(np.ones(1), np.ones((model.ny1, 1, 1)), np.ones((model.ny2, 1, 1)))


def test_constant_auxiliaries_embed_model():
    model = bsc_model(0.1, eve_crossover=0.1)
    joint = build_joint(model, constant_aux(model))
    assert joint.p.shape == (1, 2, 2, 2, 2, 1, 1, 1, 1)
    direct = np.einsum("x,xz,xa,xb->xzab", model.px, model.pz_given_x,
                       model.py1_given_x, model.py2_given_x)
    np.testing.assert_allclose(joint.p.reshape(2, 2, 2, 2), direct, atol=0)


def test_identity_channels_are_diagonal():
    n = 3
    eye = np.eye(n)
    model = DiscreteCeoModel(np.full(n, 1 / n), eye, eye, eye)
    copy = eye[:, None, :]
    aux = AuxiliarySystem(np.ones(1), copy, copy, copy, copy)
    p = build_joint(model, aux).p[0]
    for x in range(n):
        assert p[(x,) * 8] == pytest.approx(1 / n, abs=0)
    assert np.count_nonzero(p) == n


@pytest.mark.parametrize("seed", range(5))
def test_random_joint_mass_and_marginal(seed):
    rng = np.random.default_rng(seed)
    model = random_model(rng, nx=3, ny1=2, ny2=3, nz=2)
    aux = random_aux(rng, model, nq=2, nu1=3, nu2=2, nv1=2, nv2=3)
    joint = build_joint(model, aux)
    assert abs(joint.p.sum() - 1) < 1e-10
    # direct summation of the enumerated cells
    cells = enumerate_joint(model, aux)
    direct = np.zeros((3, 2, 2, 3))
    for (q, x, z, y1, y2, *_), p in cells.items():
        direct[x, z, y1, y2] += p
    np.testing.assert_allclose(joint.marginal(["X", "Z", "Y1", "Y2"]), direct, atol=1e-10)


def test_dimension_mismatch_names_kernel():
    model = bsc_model(0.1)
    aux = AuxiliarySystem(np.ones(1), np.ones((3, 1, 1)), np.ones((2, 1, 1)))
    with pytest.raises(ValueError, match="pu1_given_y1_q"):
        build_joint(model, aux)


def test_bad_kernel_row_is_named():
    with pytest.raises(ValueError, match=r"py1_given_x row \[1\] sums to 0.9"):
        DiscreteCeoModel([0.5, 0.5], [[1, 0], [0.5, 0.4]], np.eye(2))
    with pytest.raises(ValueError, match="px sums"):
        DiscreteCeoModel([0.5, 0.6], np.eye(2), np.eye(2))


def test_uniform_binary_entropy():
    joint = build_joint(bsc_model(0.1), constant_aux(bsc_model(0.1)))
    assert entropy(joint, "X") == pytest.approx(1.0, abs=1e-15)


def test_independent_x_z():
    model = DiscreteCeoModel([0.3, 0.7], binary_symmetric(0.2), binary_symmetric(0.2),
                             [[0.4, 0.6], [0.4, 0.6]])
    joint = build_joint(model, constant_aux(model))
    assert mutual_information(joint, "X", "Z") < 1e-12


def test_bsc_mutual_information():
    model = bsc_model(0.1)
    joint = build_joint(model, constant_aux(model))
    expected = 1 - h2(0.1)
    # direct summation over the four (x, y1) cells
    pxy = 0.5 * binary_symmetric(0.1)
    direct = sum(pxy[x, y] * np.log2(pxy[x, y] / (0.5 * 0.5)) for x in range(2) for y in range(2))
    assert direct == pytest.approx(expected, abs=1e-14)
    assert mutual_information(joint, "X", "Y1") == pytest.approx(expected, abs=1e-12)


def test_symbol_errors():
    model = bsc_model(0.1)
    joint = build_joint(model, constant_aux(model))
    with pytest.raises(KeyError, match="W"):
        entropy(joint, "W")
    with pytest.raises(ValueError, match="disjoint"):
        conditional_mutual_information(joint, "X", "X Y1")
    with pytest.raises(ValueError, match="disjoint"):
        conditional_mutual_information(joint, "X", "Y1", "X")
    with pytest.raises(ValueError, match="overlap"):
        conditional_entropy(joint, "X", "X")


def test_string_and_sequence_symbols_agree():
    rng = np.random.default_rng(3)
    model = random_model(rng)
    joint = build_joint(model, random_aux(rng, model))
    a = conditional_mutual_information(joint, "Y1 X", "U1,U2", "Q")
    b = conditional_mutual_information(joint, ["Y1", "X"], ("U1", "U2"), ["Q"])
    assert a == b


@pytest.mark.parametrize("seed", range(4))
def test_matches_definition_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    model = random_model(rng, nx=2, ny1=3, ny2=2, nz=2)
    aux = random_aux(rng, model, nq=2)
    joint = build_joint(model, aux)
    cells = enumerate_joint(model, aux)
    for A, B, C in [("X", "U1", "U2 Q"), ("Y1 Y2", "U1 U2", "Q"), ("V1", "U2", "Q"),
                    ("Z", "V2", "Q"), ("V1", "V2", ""), ("X", "V1 V2", "Q")]:
        assert conditional_mutual_information(joint, A, B, C) == pytest.approx(
            cmi(cells, A, B, C), abs=1e-10)


def test_expected_min_distortion_hamming():
    # U1 = Y1 copy, U2 constant: best guess of X from Y1 under BSC(0.1) errs w.p. 0.1
    model = bsc_model(0.1)
    aux = AuxiliarySystem(np.ones(1), np.eye(2)[:, None, :], np.ones((2, 1, 1)))
    joint = build_joint(model, aux)
    assert expected_min_distortion(joint, 1 - np.eye(2)) == pytest.approx(0.1, abs=1e-15)
    # nothing observed: error 1/2
    joint0 = build_joint(model, constant_aux(model))
    assert expected_min_distortion(joint0, 1 - np.eye(2)) == pytest.approx(0.5, abs=1e-15)


# -- properties ---------------------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2**32 - 1)
symbols = st.lists(st.sampled_from(AXES), min_size=1, max_size=3, unique=True)


def _random_joint(seed):
    rng = np.random.default_rng(seed)
    model = random_model(rng, nx=2, ny1=2, ny2=2, nz=2)
    aux = random_aux(rng, model, nq=int(rng.integers(1, 3)))
    return build_joint(model, aux)


@settings(max_examples=40, deadline=None)
@given(seeds, st.permutations(AXES))
def test_chain_rule(seed, perm):
    joint = _random_joint(seed)
    A, B, C, D = [perm[0]], [perm[1]], [perm[2]], [perm[3]]
    lhs = conditional_mutual_information(joint, A, B + C, D)
    rhs = (conditional_mutual_information(joint, A, B, D)
           + conditional_mutual_information(joint, A, C, B + D))
    assert lhs == pytest.approx(rhs, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds, st.permutations(AXES))
def test_conditioning_reduces_entropy_and_nonnegativity(seed, perm):
    joint = _random_joint(seed)
    a, b, c = perm[0], perm[1], perm[2]
    assert conditional_entropy(joint, a, [b, c]) <= conditional_entropy(joint, a, [b]) + 1e-12
    assert conditional_mutual_information(joint, a, b, c) >= 0
    assert entropy(joint, [a, b]) >= 0


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_markov_structure(seed):
    joint = _random_joint(seed)
    for k in (1, 2):
        assert conditional_mutual_information(joint, f"V{k}", f"Y{k}", f"U{k} Q") < 1e-10
        assert conditional_mutual_information(joint, f"U{k}", "X", f"Y{k} Q") < 1e-10
