import numpy as np
import pytest

from deutsch_noise.linalg import ValidationError
from deutsch_noise.states import (
    DensityMatrix,
    apply_kraus,
    apply_unitary,
    measure_qubit,
    sample_outcomes,
)

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def test_validation_rejects_unphysical():
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([0.7, 0.7]), (2,))
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([1.2, -0.2]), (2,))
    with pytest.raises(ValidationError):
        DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]), (2,))
    with pytest.raises(ValidationError):
        DensityMatrix(np.eye(4) / 4, (2, 3))


def test_state_is_read_only():
    s = DensityMatrix.basis([0])
    with pytest.raises(ValueError):
        s.mat[0, 0] = 0


def test_basis_ordering():
    s = DensityMatrix.basis([0, 1])
    assert s.mat[1, 1] == 1 and np.trace(s.mat) == 1


def test_apply_unitary_matches_full_operator():
    rng = np.random.default_rng(0)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    s = DensityMatrix.from_ket(psi, (2, 2, 2))
    full = np.kron(np.kron(np.eye(2), H), np.eye(2))
    got = apply_unitary(s, H, [1])
    assert np.allclose(got.mat, full @ s.mat @ full.conj().T)
    cnot = np.eye(4)[[0, 1, 3, 2]]
    # CNOT on factors (2, 0): control 2, target 0
    full = np.zeros((8, 8))
    for a in range(2):
        for b in range(2):
            for c in range(2):
                full[((a ^ c) << 2) | (b << 1) | c, (a << 2) | (b << 1) | c] = 1
    got = apply_unitary(s, cnot, [2, 0])
    assert np.allclose(got.mat, full @ s.mat @ full.T)


def test_apply_unitary_rejects_non_unitary():
    with pytest.raises(ValidationError):
        apply_unitary(DensityMatrix.basis([0]), np.diag([1, 0.5]), [0])


def test_apply_kraus_completeness_and_action():
    s = DensityMatrix.from_ket([1, 1], (2,))
    ops = [np.diag([1, 0.6]), np.diag([0, 0.8])]
    out = apply_kraus(s, ops, [0])
    assert np.isclose(out.mat[0, 1], 0.3)
    with pytest.raises(ValidationError):
        apply_kraus(s, [np.diag([1, 0.6])], [0])


def test_measure_branches():
    s = apply_unitary(DensityMatrix.basis([0, 0]), H, [0])
    branches = measure_qubit(s, 0)
    assert [b.outcome for b in branches] == [0, 1]
    assert np.allclose([b.probability for b in branches], [0.5, 0.5])
    assert np.allclose(branches[1].post_state.mat, DensityMatrix.basis([1, 0]).mat)
    certain = measure_qubit(DensityMatrix.basis([0, 1]), 0)
    assert certain[1].post_state is None and certain[1].negligible


def test_probability_and_reduced():
    s = DensityMatrix.from_ket([np.sqrt(0.2), 0, 0, np.sqrt(0.8)], (2, 2))
    assert np.isclose(s.probability(1, 1), 0.8)
    assert np.allclose(s.reduced([0]).mat, np.diag([0.2, 0.8]))


def test_sampling_reproducible():
    p = [0.1, 0.2, 0.3, 0.4]
    a = sample_outcomes(p, 1000, seed=5)
    assert a.sum() == 1000
    assert np.array_equal(a, sample_outcomes(p, 1000, seed=5))
