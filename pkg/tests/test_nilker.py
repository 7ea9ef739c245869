import numpy as np
import pytest

from conftest import sample_points
from hermlab.errors import InvalidFamilyError
from hermlab.nilker import (
    NilpotentFamily,
    common_kernel_constructive,
    common_kernel_inductive,
    family_from_torsion,
    kernel_intersection_basis,
    operator_from_tensor,
    oracle_contains,
    random_general_family,
    random_torsion_tensor,
    torsion_symmetry_residual,
    two_block_chain_tensor,
)


def test_single_shift_matrix():
    fam = NilpotentFamily([np.array([[0, 1], [0, 0]], dtype=complex)])
    w = common_kernel_inductive(fam)
    assert abs(abs(w[0]) - 1) < 1e-12 and abs(w[1]) < 1e-12


def test_zero_family_returns_first_basis_vector():
    fam = NilpotentFamily([np.zeros((4, 4), dtype=complex)])
    w = common_kernel_inductive(fam)
    assert np.allclose(w, np.eye(4)[0])


def test_invariants_rejected_on_construction():
    with pytest.raises(InvalidFamilyError):
        NilpotentFamily([np.eye(2, dtype=complex)])  # not square-zero
    A = np.array([[0, 1], [0, 0]], dtype=complex)
    B = np.array([[0, 0], [1, 0]], dtype=complex)
    with pytest.raises(InvalidFamilyError):
        NilpotentFamily([A, B])  # anti-commutator is nonzero


def test_conjugation_preserves_relations():
    rng = np.random.default_rng(5)
    fam = random_general_family(rng, n=6, m=3)
    P = np.eye(6) + 0.3 * (rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    Pinv = np.linalg.inv(P)
    NilpotentFamily([P @ A @ Pinv for A in fam.matrices])  # must not raise


def test_torsion_tensor_round_trip():
    rng = np.random.default_rng(7)
    T = random_torsion_tensor(rng, n=5)
    fam = family_from_torsion(T)
    # the family matrices are exactly the basis operators of the tensor
    for i, A in enumerate(fam.matrices):
        assert np.allclose(A, operator_from_tensor(T, np.eye(5)[i]))
    assert torsion_symmetry_residual(T) < 1e-10


def test_invalid_torsion_rejected():
    T = np.zeros((3, 3, 3), dtype=complex)
    # fully cyclic torsion violates the quadratic symmetry
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        T[k, i, j], T[k, j, i] = 1.0, -1.0
    assert torsion_symmetry_residual(T) > 1e-2
    with pytest.raises(InvalidFamilyError):
        family_from_torsion(T)


def test_random_families_both_algorithms_and_oracle():
    rng = np.random.default_rng(11)
    for trial in range(60):
        if trial % 2 == 0:
            fam = random_general_family(rng)
            vecs = [common_kernel_inductive(fam, seed=trial)]
        else:
            fam = family_from_torsion(random_torsion_tensor(rng))
            vecs = [
                common_kernel_inductive(fam, seed=trial),
                common_kernel_constructive(fam, seed=trial),
            ]
        assert kernel_intersection_basis(fam).shape[1] >= 1
        for w in vecs:
            assert abs(np.linalg.norm(w) - 1) < 1e-10
            assert fam.kernel_residual(w) < 1e-8
            assert oracle_contains(fam, w)


def test_constructive_matches_oracle_space_not_vector():
    rng = np.random.default_rng(13)
    T = random_torsion_tensor(rng, n=6)
    fam = family_from_torsion(T)
    w1 = common_kernel_constructive(fam, seed=1)
    w2 = common_kernel_inductive(fam, seed=1)
    assert oracle_contains(fam, w1) and oracle_contains(fam, w2)


def test_chain_exhaustion_fixture_reaches_second_level():
    # two independent blocks make the first-level product vanish, so the
    # walk must descend; the returned vector still lies in every kernel
    T = two_block_chain_tensor()
    fam = family_from_torsion(T)
    X = np.zeros(6, dtype=complex)
    X[0], X[3] = 1.0, 1.0
    A_X = operator_from_tensor(T, X)
    assert np.linalg.matrix_rank(A_X) == 2
    # cross-block level-one product vanishes by construction
    U, s, Vh = np.linalg.svd(A_X)
    y = [Vh[i].conj() / s[i] for i in range(2)]
    W1 = operator_from_tensor(T, y[0]) @ U[:, 1]
    assert np.linalg.norm(W1) < 1e-12
    w = common_kernel_constructive(fam, X=X)
    assert fam.kernel_residual(w) < 1e-10
    assert oracle_contains(fam, w)


def test_constructive_with_rank_zero_seed_falls_back():
    rng = np.random.default_rng(17)
    T = random_torsion_tensor(rng, n=4)
    fam = family_from_torsion(T)
    # a zero seed gives a rank-zero operator; the inductive route takes over
    w = common_kernel_constructive(fam, X=np.zeros(4, dtype=complex))
    assert fam.kernel_residual(w) < 1e-8


def test_iwasawa_torsion_feeds_the_construction(geo, metric):
    # the nilmanifold torsion satisfies the quadratic symmetry with both
    # sides zero, so the family construction applies and is cracked
    m = metric("iwasawa")
    p = sample_points(m, 1, seed=91)[0]
    ch, _ = geo(m, p)
    assert torsion_symmetry_residual(ch.T) < 1e-12
    fam = family_from_torsion(ch.T)
    w = common_kernel_inductive(fam, seed=0)
    w2 = common_kernel_constructive(fam, seed=0)
    assert fam.kernel_residual(w) < 1e-8
    assert fam.kernel_residual(w2) < 1e-8
    assert oracle_contains(fam, w) and oracle_contains(fam, w2)
