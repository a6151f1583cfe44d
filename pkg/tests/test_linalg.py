import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from lepotto import linalg
from lepotto.errors import DimensionTooLarge, NonSquare
from lepotto.liouvillian import QubitParams, build_liouvillian, steady_state, vectorize


def mp_expm(m):
    """Independent reference: mpmath at 40 digits."""
    mpmath.mp.dps = 40
    out = mpmath.expm(mpmath.matrix(m.tolist()))
    return np.array([[complex(out[i, j]) for j in range(m.shape[1])] for i in range(m.shape[0])])


complex_entries = st.builds(complex, st.floats(-3, 3), st.floats(-3, 3))


def square(n_max=9):
    return st.integers(1, n_max).flatmap(lambda n: arrays(complex, (n, n), elements=complex_entries))


def test_eig_diagonal_sorted_by_real_then_imag():
    res = linalg.eig(np.diag([1, 2j, -3]))
    np.testing.assert_allclose(res.eigenvalues, [-3, 2j, 1])


def test_eig_conjugate_pair_order():
    res = linalg.eig(build_liouvillian(QubitParams(0, 1, 2)))
    np.testing.assert_allclose(res.eigenvalues, [-1.5 - np.sqrt(3) / 2 * 1j, -1.5 + np.sqrt(3) / 2 * 1j, -1, 0], atol=1e-12)


def test_eig_broken_phase_liouvillian():
    # xi = 3: l3, l4 = (-15 -+ 3) / 4
    res = linalg.eig(build_liouvillian(QubitParams(0, 1, 5)))
    np.testing.assert_allclose(res.eigenvalues, [-4.5, -3, -2.5, 0], atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(square())
def test_eig_residual_and_reconstruction(m):
    res = linalg.eig(m)
    assert len(res) == m.shape[0]
    norm = np.linalg.norm(m, 2)
    assert np.all(res.residuals(m) <= 1e-9 * max(norm, 1e-300) + 1e-14)
    v = res.eigenvectors
    if np.linalg.cond(v) < 1e6:
        recon = v @ np.diag(res.eigenvalues) @ np.linalg.inv(v)
        assert np.linalg.norm(recon - m, 2) <= 1e-8 * max(norm, 1.0)


def test_eig_deterministic():
    m = np.random.default_rng(3).normal(size=(7, 7)) + 1j * np.random.default_rng(4).normal(size=(7, 7))
    a, b = linalg.eig(m), linalg.eig(m)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_input_checks():
    with pytest.raises(NonSquare):
        linalg.eig(np.zeros((2, 3)))
    with pytest.raises(DimensionTooLarge):
        linalg.eig(np.eye(10))
    with pytest.raises(NonSquare):
        linalg.expm(np.zeros((3, 2)))
    with pytest.raises(NonSquare):
        linalg.nullspace(np.zeros(4))


def test_expm_zero_is_identity():
    np.testing.assert_array_equal(linalg.expm(np.zeros((4, 4))), np.eye(4))


def test_expm_diagonal():
    out = linalg.expm(np.diag([-1.0, 2j]))
    np.testing.assert_allclose(np.diag(out), [0.36787944117144233, np.cos(2) + 1j * np.sin(2)], rtol=1e-14)


def test_expm_jordan_block():
    a = -0.7 + 0.2j
    out = linalg.expm(np.array([[a, 1], [0, a]]))
    np.testing.assert_allclose(out, np.exp(a) * np.array([[1, 1], [0, 1]]), rtol=1e-13)


@pytest.mark.parametrize("gamma", [4.0, 4.0 * (1 + 1e-7), 2.0, 5.0])
def test_expm_liouvillian_matches_mpmath(gamma):
    m = build_liouvillian(QubitParams(0, 1, gamma)) * 1.3
    ref = mp_expm(m)
    assert np.linalg.norm(linalg.expm(m) - ref) <= 1e-10 * np.linalg.norm(ref)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: arrays(complex, (n, n), elements=complex_entries)), st.floats(0.1, 100 / 18))
def test_expm_relative_accuracy(m, scale):
    m = m * scale
    ref = mp_expm(m)
    assert np.linalg.norm(linalg.expm(m) - ref) <= 1e-10 * np.linalg.norm(ref)


@pytest.mark.parametrize("gamma", [4.0, 1.0, 7.0])
def test_expm_semigroup(gamma):
    m = build_liouvillian(QubitParams(0.3, 1, gamma))
    lhs = linalg.expm(m * 1.7)
    rhs = linalg.expm(m * 0.5) @ linalg.expm(m * 1.2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_expm_leaves_steady_state_fixed():
    p = QubitParams(0.4, 1.2, 2.0)
    v = vectorize(steady_state(p))
    out = linalg.expm(build_liouvillian(p) * 3.3) @ v
    np.testing.assert_allclose(out, v, atol=1e-9)


def test_nullspace_examples():
    assert linalg.nullspace(np.eye(3)) == []
    (v,) = linalg.nullspace(np.diag([0.0, 1.0, 2.0]))
    np.testing.assert_allclose(v, [1, 0, 0], atol=1e-15)


@pytest.mark.parametrize("omega,gamma", [(0, 1), (1, 5), (1, 4), (1, 2), (3, 0.5)])
def test_liouvillian_kernel_is_one_dimensional(omega, gamma):
    m = build_liouvillian(QubitParams(0, omega, gamma))
    # oracle: exact rank over the Gaussian rationals
    exact = sympy.Matrix(4, 4, lambda i, j: sympy.nsimplify(m[i, j].real) + sympy.I * sympy.nsimplify(m[i, j].imag))
    assert exact.rank() == 3
    kernel = linalg.nullspace(m)
    assert len(kernel) == 1
    assert np.linalg.norm(m @ kernel[0]) <= 10 * 1e-10 * np.linalg.norm(m, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4))
def test_nullspace_orthonormal_and_annihilated(n, rank):
    rank = min(rank, n)
    rng = np.random.default_rng(n * 10 + rank)
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    b = rng.normal(size=(rank, n)) + 1j * rng.normal(size=(rank, n))
    m = a @ b
    basis = linalg.nullspace(m)
    assert len(basis) == n - rank
    if basis:
        q = np.column_stack(basis)
        np.testing.assert_allclose(q.conj().T @ q, np.eye(len(basis)), atol=1e-12)
        assert np.linalg.norm(m @ q) <= 10 * 1e-10 * np.linalg.norm(m, 2) * len(basis)
