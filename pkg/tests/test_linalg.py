import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from deutsch_noise.linalg import (
    CapacityError,
    ValidationError,
    get_dim_cap,
    herm_expm,
    is_unitary,
    partial_trace,
    set_dim_cap,
    tensor,
    tensor_all,
)


def random_complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def kron_loop(a, b):
    # entrywise definition of the Kronecker product
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for m in range(cb):
                    out[i * rb + k, j * cb + m] = a[i, j] * b[k, m]
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_tensor_matches_entrywise(da, db, seed):
    rng = np.random.default_rng(seed)
    a, b = random_complex(rng, (da, da)), random_complex(rng, (db, db))
    assert np.allclose(tensor(a, b), kron_loop(a, b), atol=0)


def test_tensor_all_order():
    x = np.array([[0, 1], [1, 0]])
    z = np.diag([1, -1])
    assert np.array_equal(tensor_all([x, z, np.eye(2)]), np.kron(np.kron(x, z), np.eye(2)))


def test_dimension_cap():
    old = get_dim_cap()
    try:
        set_dim_cap(8)
        with pytest.raises(CapacityError):
            tensor(np.eye(4), np.eye(4))
        assert tensor(np.eye(2), np.eye(4)).shape == (8, 8)
    finally:
        set_dim_cap(old)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.floats(-5, 5), st.integers(0, 2**31 - 1))
def test_herm_expm_matches_scipy(n, scale, seed):
    rng = np.random.default_rng(seed)
    m = random_complex(rng, (n, n))
    h = m + m.conj().T
    u = herm_expm(h, scale)
    assert np.allclose(u, expm(-1j * scale * h), atol=1e-10)
    assert is_unitary(u)


def test_herm_expm_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        herm_expm(np.array([[0, 1], [0, 0]]), 1.0)


def trace_loop(m, dims, keep):
    # direct index summation over traced factors
    n = len(dims)
    kept = [dims[k] for k in keep]
    dk = int(np.prod(kept))
    out = np.zeros((dk, dk), dtype=complex)
    t = m.reshape(dims + dims)
    for row in np.ndindex(*dims):
        for col in np.ndindex(*dims):
            if any(row[i] != col[i] for i in range(n) if i not in keep):
                continue
            r = np.ravel_multi_index([row[k] for k in keep], kept)
            c = np.ravel_multi_index([col[k] for k in keep], kept)
            out[r, c] += t[row + col]
    return out


@pytest.mark.parametrize("dims,keep", [([2, 2], [0]), ([2, 2], [1]), ([2, 3, 2], [0, 2]), ([3, 2, 2], [1]),
                                       ([2, 2, 2], [0, 1, 2])])
def test_partial_trace_matches_index_sum(dims, keep):
    rng = np.random.default_rng(sum(dims) + len(keep))
    d = int(np.prod(dims))
    m = random_complex(rng, (d, d))
    assert np.allclose(partial_trace(m, dims, keep), trace_loop(m, dims, keep))


def test_partial_trace_of_product():
    rng = np.random.default_rng(3)
    a, b = random_complex(rng, (2, 2)), random_complex(rng, (3, 3))
    assert np.allclose(partial_trace(np.kron(a, b), [2, 3], [0]), a * np.trace(b))
    assert np.allclose(partial_trace(np.kron(a, b), [2, 3], [1]), b * np.trace(a))


def test_partial_trace_validation():
    with pytest.raises(ValidationError):
        partial_trace(np.eye(4), [2, 3], [0])
    with pytest.raises(ValidationError):
        partial_trace(np.eye(4), [2, 2], [2])
