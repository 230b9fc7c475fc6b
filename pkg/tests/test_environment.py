import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from deutsch_noise.environment import (
    BathTableError,
    ExponentialModel,
    NuclearSpin,
    SpinBathSpec,
    bath_factor_series,
    bath_factors,
    dipolar_coupling,
    load_bath_file,
    load_bath_table,
    nv_bath,
    spin_conditional_propagators,
    spin_initial_state,
    zeeman_frequency,
)
from deutsch_noise.linalg import ValidationError

SX = np.array([[0, 1], [1, 0]]) / 2
SY = np.array([[0, -1j], [1j, 0]]) / 2
SZ = np.array([[1, 0], [0, -1]]) / 2


def test_initial_state_conventions():
    s = spin_initial_state(NuclearSpin((0, 0, 1), 1.0))
    assert np.allclose(s.mat, np.diag([0.75, 0.25]))
    s = spin_initial_state(NuclearSpin((0, 0, 1), 1.0), "pauli")
    assert np.allclose(s.mat, np.diag([1.0, 0.0]))
    assert np.allclose(spin_initial_state(NuclearSpin((0, 0, 1))).mat, np.eye(2) / 2)


def single_spin_factor_oracle(a, p, zeeman, t, convention="spin"):
    h0 = zeeman * SZ
    h1 = zeeman * SZ + a[0] * SX + a[1] * SY + a[2] * SZ
    s = p / 2 if convention == "spin" else p
    rho = np.diag([0.5 + s / 2, 0.5 - s / 2])
    w0, w1 = expm(-1j * h0 * t), expm(-1j * h1 * t)
    return np.trace(rho @ w1.conj().T @ w0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3), st.floats(-1, 1), st.floats(0, 8), st.floats(0, 10),
       st.sampled_from(["spin", "pauli"]))
def test_single_spin_factor_vs_expm(a, p, zeeman, t, convention):
    bath = SpinBathSpec((NuclearSpin(tuple(a), p),), zeeman, polarization_convention=convention)
    got = bath_factors(bath, t)
    assert abs(got.c - single_spin_factor_oracle(a, p, zeeman, t, convention)) < 1e-12
    assert abs(got.d2_factor - single_spin_factor_oracle(a, p, zeeman, 2 * t, convention)) < 1e-12


def test_propagators_are_rotations():
    props = spin_conditional_propagators(NuclearSpin((0.3, 0.1, -0.4)), 1.2, 0.9)
    assert np.allclose(props.w0, expm(-1j * 0.9 * 1.2 * SZ))


def test_factor_series_product_law():
    spins = (NuclearSpin((0.2, 0, 0.5), 0.1), NuclearSpin((0, 0.4, -0.3), 0.1))
    bath = SpinBathSpec(spins, 0.5)
    times = np.linspace(0, 5, 7)
    c, d = bath_factor_series(bath, times)
    c1, d1 = bath_factor_series(bath.subset([0]), times)
    c2, d2 = bath_factor_series(bath.subset([1]), times)
    assert np.allclose(c, c1 * c2) and np.allclose(d, d1 * d2)
    with pytest.raises(ValidationError):
        bath_factor_series(bath, [-1.0])


def test_zeeman_frequency():
    assert math.isclose(zeeman_frequency(0.1), 2 * math.pi * 1.071)
    assert math.isclose(zeeman_frequency(0.1, angular=False), 1.071)


def test_dipolar_prefactor_mpmath():
    mpmath.mp.dps = 30
    mu0_4pi = mpmath.mpf("1e-7")
    hbar = mpmath.mpf("1.054571817e-34")
    ge = 2 * mpmath.pi * mpmath.mpf("28.08e9")
    gn = 2 * mpmath.pi * mpmath.mpf("10.71e6")
    r = mpmath.mpf("1e-9")
    expected = mu0_4pi * hbar * ge * gn / r ** 3 * mpmath.mpf("1e-6")  # rad/us
    # in-plane position: the angular term vanishes, A^{z,z} = -K with K > 0 for gamma_e < 0
    got = dipolar_coupling([1.0, 0.0, 0.0])
    assert got[0] == 0 and got[1] == 0
    assert abs(-got[2] - float(expected)) < 1e-12 * float(expected)


def _direction(cos2_theta, phi):
    ct = math.sqrt(cos2_theta)
    st_ = math.sqrt(1 - cos2_theta)
    return np.array([st_ * math.cos(phi), st_ * math.sin(phi), ct])


@pytest.mark.parametrize("row,cos2,phi", [
    ((-0.407753, 0.0, 0.288325), 2 / 3, math.pi),
    ((0.0, 0.0, -0.288325), 0.0, 0.0),
])
def test_table_rows_from_lattice_geometry(row, cos2, phi):
    got = dipolar_coupling(0.756633 * _direction(cos2, phi))
    assert np.linalg.norm(got - np.array(row)) <= 0.005 * np.linalg.norm(row)


def test_row_twelve_consistent_geometry():
    # the polar angle fitted from A^{z,z} also reproduces A^{z,x}
    k = dipolar_coupling([0.756633, 0, 0])[2]
    cos2 = (1 - (-0.224253) / k) / 3
    got = dipolar_coupling(0.756633 * _direction(cos2, math.pi))
    assert abs(got[2] - (-0.224253)) < 1e-3
    assert abs(got[0] - (-0.226529)) <= 0.01 * 0.226529


def test_literal_form_ratio():
    got = dipolar_coupling([0, 0, 1.0], form="literal")
    assert np.allclose(got / got[0], [1, 1, -2])
    with pytest.raises(ValueError):
        dipolar_coupling([0, 0, 1.0], form="other")
    with pytest.raises(ValidationError):
        dipolar_coupling([0, 0, 0])


def test_loader_formats_and_errors(tmp_path):
    text = "# comment\nk r_nm Ax Ay Az\n1 0.5 0.1 0.2 0.3\n\n2 0.6 -0.1 0 0.4\n"
    bath = load_bath_table(text, polarization=0.1)
    assert len(bath) == 2 and bath.spins[1].coupling == (-0.1, 0.0, 0.4) and bath.distances == (0.5, 0.6)
    with pytest.raises(BathTableError, match="header"):
        load_bath_table("a,b,c\n1,2,3\n")
    with pytest.raises(BathTableError, match="line 3"):
        load_bath_table("k,r_nm,Ax,Ay,Az\n1,0.5,0,0,1\n2,0.5,x,0,1\n")
    with pytest.raises(BathTableError, match="line 2: expected 5"):
        load_bath_table("k,r_nm,Ax,Ay,Az\n1,0.5,0,0\n")
    with pytest.raises(BathTableError):
        load_bath_table("# only comments\n")
    with pytest.raises(BathTableError):
        load_bath_file(tmp_path / "missing.csv")


def test_nv_bath_defaults():
    bath = nv_bath()
    assert len(bath) == 32
    assert math.isclose(bath.zeeman, 2 * math.pi * 0.1 * 10.71)
    assert all(s.polarization == 0.1 for s in bath.spins)


def test_exponential_model():
    m = ExponentialModel(0.5)
    f = m.factors(2.0)
    assert math.isclose(f.c.real, math.exp(-1.0)) and math.isclose(f.d2, math.exp(-2.0))
    assert math.isclose(m.time_for(f.c.real), 2.0)
    with pytest.raises(ValidationError):
        ExponentialModel(-1)


def test_spin_validation():
    with pytest.raises(ValidationError):
        NuclearSpin((0, 0, 1), 1.5)
    with pytest.raises(ValidationError):
        NuclearSpin((0, 0))
    with pytest.raises(ValidationError):
        SpinBathSpec(())
