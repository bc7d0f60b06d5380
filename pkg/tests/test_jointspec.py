from __future__ import annotations

import numpy as np
import pytest
from oracles import multiset_distance

from distvar.errors import DimensionMismatch, NotCommuting
from distvar.jointspec import (
    CommutingTuple,
    commutator_defect,
    joint_eigenvalues,
    verify_joint_eigenvalue,
)
from distvar.pencilvariety import pencils

D12, D34 = np.diag([1.0, 2.0]), np.diag([3.0, 4.0])
M = np.array([[0, 1], [0.25, 0]])


def _values(t, **kw):
    return np.array([je.values for je in joint_eigenvalues(CommutingTuple.from_matrices(t), **kw)])


def test_diagonal_pair():
    assert multiset_distance(_values([D12, D34]), [(1, 3), (2, 4)]) < 1e-12


def test_shared_eigenvectors():
    assert multiset_distance(_values([M, M]), [(0.5, 0.5), (-0.5, -0.5)]) < 1e-12


def test_single_matrix_reduces_to_eigenvalues(rng):
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    got = _values([a])[:, 0]
    assert multiset_distance(got[:, None], np.linalg.eigvals(a)[:, None]) < 1e-10


def test_multiplicity_hint_on_repeated_values():
    eigs = joint_eigenvalues(CommutingTuple.from_matrices([np.eye(3), 2 * np.eye(3)]))
    assert len(eigs) == 3
    assert all(np.allclose(je.values, (1, 2)) for je in eigs)
    assert all(je.multiplicity_hint == 3 for je in eigs)


def test_non_derogatory_jordan_pair():
    # commuting but not diagonalizable: J and J^2 share one Jordan chain
    j = np.eye(3, k=1) + 0.2 * np.eye(3)
    got = _values([j, j @ j])
    assert np.allclose(got, [[0.2, 0.04]] * 3, atol=1e-5)


def test_conjugation_invariance(rng):
    d = 6
    vals = rng.normal(size=(d, 3)) + 1j * rng.normal(size=(d, 3))
    s = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) + 3 * np.eye(d)
    mats = [s @ np.diag(vals[:, i]) @ np.linalg.inv(s) for i in range(3)]
    assert multiset_distance(_values(mats), vals) < 1e-8
    assert multiset_distance(_values(mats, seed=5), _values(mats, seed=9)) < 1e-8


def test_rejects_non_commuting():
    with pytest.raises(NotCommuting):
        joint_eigenvalues(CommutingTuple.from_matrices([M, M.T]))


def test_rejects_mismatched_shapes():
    with pytest.raises(DimensionMismatch):
        CommutingTuple.from_matrices([np.eye(2), np.eye(3)])
    with pytest.raises(DimensionMismatch):
        CommutingTuple.from_matrices([])


def test_commutator_defect():
    assert commutator_defect([D12, D34]) == 0.0
    assert commutator_defect([M, M.T]) > 0.5


def test_verify_examples(swap_sigma):
    t = CommutingTuple.from_matrices([D12, D34])
    assert verify_joint_eigenvalue(t, (1, 3))
    assert not verify_joint_eigenvalue(t, (1, 4))
    pt = CommutingTuple.from_matrices(pencils(swap_sigma, 0.25))
    assert verify_joint_eigenvalue(pt, (0.5, 0.5))
    assert not verify_joint_eigenvalue(pt, (0.5, -0.5))
    with pytest.raises(DimensionMismatch):
        verify_joint_eigenvalue(t, (1,))


def test_witness_residual_is_small(rng):
    d = 5
    vals = rng.normal(size=(d, 2))
    q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    mats = [q @ np.diag(vals[:, i]) @ q.T for i in range(2)]
    for je in joint_eigenvalues(CommutingTuple.from_matrices(mats)):
        assert je.witness_residual < 1e-10
        assert len(je) == 2
