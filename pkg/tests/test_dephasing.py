import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deutsch_noise.dephasing import (
    ConditionalPropagators,
    DephasingFactors,
    dephasing_kraus,
    factor_c,
    factor_d2,
    joint_dephasing_unitary,
    phase_damping_kraus,
)
from deutsch_noise.linalg import ValidationError, herm_expm
from deutsch_noise.states import DensityMatrix, apply_kraus


def test_phase_damping_example():
    e0, e1 = phase_damping_kraus(0.6)
    assert np.allclose(e0, np.diag([1, 0.6]))
    assert np.allclose(e1, np.diag([0, 0.8]))
    with pytest.raises(ValidationError):
        phase_damping_kraus(1.1)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(-np.pi, np.pi))
def test_dephasing_kraus_multiplies_coherence(mod, phase):
    c = mod * np.exp(1j * phase)
    ops = dephasing_kraus(c)
    assert np.allclose(sum(k.conj().T @ k for k in ops), np.eye(2))
    rho = DensityMatrix.from_ket([0.6, 0.8j], (2,))
    out = apply_kraus(rho, ops, [0])
    assert np.allclose(out.mat[0, 1], c * rho.mat[0, 1])
    assert np.allclose(np.diag(out.mat), np.diag(rho.mat))


def test_joint_unitary_blocks():
    w = herm_expm(np.array([[0, 1], [1, 0]]), 0.3)
    pa = ConditionalPropagators(np.eye(2), w)
    pb = ConditionalPropagators(w, np.eye(2))
    u = joint_dephasing_unitary(pa, pb)
    assert u.shape == (16, 16)
    assert np.allclose(u[12:, 12:], np.kron(w, np.eye(2)))
    assert np.allclose(u[:4, :4], np.kron(np.eye(2), w))
    assert np.allclose(u[:4, 4:], 0)


def test_factors_and_doubling():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = m + m.conj().T
    t = 0.7
    props = ConditionalPropagators(np.eye(3), herm_expm(h, t), t)
    r = DensityMatrix(np.diag([0.5, 0.3, 0.2]), (3,))
    w1 = props.w1
    assert np.isclose(factor_c(props, r), np.trace(r.mat @ w1.conj().T))
    assert np.isclose(factor_d2(props, r), np.trace(r.mat @ herm_expm(h, 2 * t).conj().T))


def test_factor_bounds_and_mismatch():
    with pytest.raises(ValidationError):
        DephasingFactors(1.5, 0.2)
    props = ConditionalPropagators.trivial(2)
    with pytest.raises(ValidationError):
        factor_c(props, DensityMatrix(np.eye(3) / 3, (3,)))
    with pytest.raises(ValidationError):
        ConditionalPropagators(np.eye(2), np.diag([1, 2]))
