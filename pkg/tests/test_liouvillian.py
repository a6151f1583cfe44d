import numpy as np
import pytest
import sympy
from scipy.optimize import linear_sum_assignment
from hypothesis import given, settings, strategies as st

from lepotto import linalg
from lepotto.errors import DegenerateParams, DeltaNotZero, NoBracket, NonUniqueSteadyState, ZeroGamma
from lepotto.liouvillian import (
    Phase,
    QubitParams,
    ThreeLevelParams,
    analytic_eigenvalues,
    build_hamiltonian,
    build_liouvillian,
    build_liouvillian_three_level,
    classify_phase,
    effective_decay_rate,
    lep_locate,
    slow_pair,
    spectrum,
    steady_excited_population,
    steady_state,
    steady_state_three_level,
    three_level_source,
    two_level_source,
    unvectorize,
    vectorize,
)
from lepotto.units import TWO_PI

SM = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e| in basis (g, e)


def random_rho(rng, n=2):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def lindblad_rhs(h, jumps, rho):
    """Direct evaluation of -i[H, rho] + sum_k D[L_k] rho, no superoperators."""
    out = -1j * (h @ rho - rho @ h)
    for l in jumps:
        ld = l.conj().T
        out += l @ rho @ ld - 0.5 * (ld @ l @ rho + rho @ ld @ l)
    return out


def test_hamiltonian_examples():
    np.testing.assert_array_equal(build_hamiltonian(QubitParams(0, 0, 1)), np.zeros((2, 2)))
    h = build_hamiltonian(QubitParams(TWO_PI * 10e3, 0, 1))
    np.testing.assert_allclose(h, np.diag([0, 6.2832e4]), rtol=1e-5)
    h = build_hamiltonian(QubitParams(0, 2, 1))
    assert h[0, 1] == h[1, 0] == 1.0
    h = build_hamiltonian(QubitParams(0.3, 1.7, 1))
    np.testing.assert_array_equal(h, h.conj().T)


def test_pure_decay_matrix():
    m = build_liouvillian(QubitParams(0, 0, 1))
    np.testing.assert_array_equal(np.diag(m), [-1, -0.5, -0.5, 0])
    off = m - np.diag(np.diag(m))
    assert off[3, 0] == 1
    assert np.count_nonzero(off) == 1


def test_lep_matrix_rank_and_defective_pair():
    m = build_liouvillian(QubitParams(0, 1, 4))
    exact = sympy.Matrix(4, 4, lambda i, j: sympy.nsimplify(m[i, j].real) + sympy.I * sympy.nsimplify(m[i, j].imag))
    assert exact.rank() == 3
    # -3 has algebraic multiplicity 2 and a single eigenvector
    assert exact.eigenvals()[-3] == 2
    assert (exact + 3 * sympy.eye(4)).rank() == 3


@settings(max_examples=20, deadline=None)
@given(st.floats(-1e5, 1e5), st.floats(0, 1e6), st.floats(0, 1e6), st.integers(0, 2**32 - 1))
def test_action_matches_direct_lindblad(delta, omega, gamma, seed):
    p = QubitParams(delta, omega, gamma)
    rng = np.random.default_rng(seed)
    h = build_hamiltonian(p)
    m = build_liouvillian(p)
    scale = max(abs(delta), omega, gamma, 1.0)
    for _ in range(5):
        rho = random_rho(rng)
        direct = lindblad_rhs(h, [np.sqrt(gamma) * SM], rho)
        np.testing.assert_allclose(unvectorize(m @ vectorize(rho)), direct, atol=1e-12 * scale)


def test_action_on_100_random_states():
    rng = np.random.default_rng(7)
    p = QubitParams(TWO_PI * 3e3, TWO_PI * 82e3, 370e3)
    h, m = build_hamiltonian(p), build_liouvillian(p)
    for _ in range(100):
        rho = random_rho(rng)
        got = unvectorize(m @ vectorize(rho))
        want = lindblad_rhs(h, [np.sqrt(p.gamma_eff) * SM], rho)
        assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(want))


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.floats(0, 10), st.floats(0, 10))
def test_trace_and_hermiticity_preserved(delta, omega, gamma):
    m = build_liouvillian(QubitParams(delta, omega, gamma))
    np.testing.assert_allclose(m[0] + m[3], 0, atol=1e-15)
    rho = random_rho(np.random.default_rng(int(1e3 * (omega + gamma))))
    out = unvectorize(m @ vectorize(rho))
    np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


def test_vectorize_order():
    rho = np.array([[1, 2], [3, 4]])  # [[gg, ge], [eg, ee]]
    np.testing.assert_array_equal(vectorize(rho), [4, 3, 2, 1])
    np.testing.assert_array_equal(unvectorize(vectorize(rho)), rho)


def test_characteristic_polynomial():
    # oracle for the closed forms: exact factorization of det(L - l)
    g, w = sympy.symbols("gamma Omega", positive=True)
    lam = sympy.Symbol("lambda")
    h = sympy.I * w / 2
    m = sympy.Matrix([[-g, h, -h, 0], [h, -g / 2, 0, -h], [-h, 0, -g / 2, h], [g, -h, h, 0]])
    poly = sympy.factor(m.charpoly(lam).as_expr())
    assert sympy.expand(poly - lam * (g + 2 * lam) * (2 * lam**2 + 3 * g * lam + g**2 + 2 * w**2) / 4) == 0


@pytest.mark.parametrize(
    "gamma,want",
    [
        (4, [0, -2, -3, -3]),
        (5, [0, -2.5, -4.5, -3]),
        (2, [0, -1, -1.5 - 0.8660254037844386j, -1.5 + 0.8660254037844386j]),
    ],
)
def test_analytic_eigenvalues(gamma, want):
    np.testing.assert_allclose(analytic_eigenvalues(QubitParams(0, 1, gamma)), want, atol=1e-12)


def test_analytic_slow_pair_matches_stated_examples():
    # l1, l3, l4 as printed: {0, ., -3, -3}, {0, ., -4.5, -3}, {0, ., -1.5 -+ 0.866i}
    for gamma, l34 in [(4, [-3, -3]), (5, [-4.5, -3]), (2, [-1.5 - 0.866j, -1.5 + 0.866j])]:
        w = analytic_eigenvalues(QubitParams(0, 1, gamma))
        assert w[0] == 0
        np.testing.assert_allclose(w[2:], l34, atol=1e-3)


def test_analytic_eigenvalues_needs_zero_detuning():
    with pytest.raises(DeltaNotZero):
        analytic_eigenvalues(QubitParams(1e-3, 1, 1))


def test_spectrum_matches_closed_forms_50_pairs():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        omega = rng.uniform(0.01, 2)
        gamma = 4 * omega * rng.uniform(0.2, 5)
        p = QubitParams(0, omega, gamma)
        got = spectrum(p).eigenvalues
        want = analytic_eigenvalues(p)
        rows, cols = linear_sum_assignment(np.abs(got[:, None] - want[None, :]))
        assert np.max(np.abs(got[rows] - want[cols])) <= 1e-8 * gamma


def test_spectrum_at_lep_defective_pair():
    res = spectrum(QubitParams(0, 1, 4))
    pair = slow_pair(res.eigenvalues, 4)
    np.testing.assert_allclose(pair, [-3, -3], atol=1e-6)


@pytest.mark.parametrize("side,sign", [(1 + 1e-6, 0), (1 - 1e-6, 1)])
def test_phase_boundary(side, sign):
    omega = 1.0
    gamma = 4 * omega * side
    a, b = slow_pair(analytic_eigenvalues(QubitParams(0, omega, gamma)), gamma)
    split = abs((a - b).imag)
    if sign:
        assert split > 1e-4
    else:
        assert split == 0
    a, b = slow_pair(spectrum(QubitParams(0, omega, gamma)).eigenvalues, gamma)
    if sign:
        assert abs((a - b).imag) > 1e-4
    else:
        assert abs((a - b).imag) < 1e-6


def test_classify_examples():
    c = classify_phase(QubitParams(0, 1, 4))
    assert c.phase is Phase.AT_LEP and c.ratio == 0.25 and c.xi == 0
    c = classify_phase(QubitParams(0, TWO_PI * 82e3, 370e3))
    assert c.phase is Phase.EXACT
    assert c.ratio == pytest.approx(1.392, abs=5e-4)
    c = classify_phase(QubitParams(0, TWO_PI * 64e3, 2.5e6))
    assert c.phase is Phase.BROKEN
    assert c.ratio == pytest.approx(0.161, abs=5e-4)
    assert c.xi.imag == 0 and c.xi.real > 0
    with pytest.raises(DegenerateParams):
        classify_phase(QubitParams(0, 0, 0))


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1e6), st.floats(1e-3, 1e6))
def test_classify_invariant(omega, gamma):
    c = classify_phase(QubitParams(0, omega, gamma))
    if abs(gamma - 4 * omega) <= 1e-9 * max(gamma, 4 * omega):
        assert c.phase is Phase.AT_LEP
    elif gamma < 4 * omega:
        assert c.phase is Phase.EXACT
    else:
        assert c.phase is Phase.BROKEN


def test_steady_state_examples():
    np.testing.assert_allclose(steady_state(QubitParams(0, 0, 1)), [[1, 0], [0, 0]], atol=1e-12)
    assert steady_state(QubitParams(0, 1, 2))[1, 1].real == pytest.approx(1 / 6, abs=1e-12)
    assert steady_state(QubitParams(0, 1, 4))[1, 1].real == pytest.approx(1 / 18, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(-5, 5), st.floats(0, 5), st.floats(0.05, 5))
def test_steady_state_matches_closed_form(delta, omega, gamma):
    p = QubitParams(delta, omega, gamma)
    rho = steady_state(p)
    # textbook resonance-fluorescence population
    want = omega**2 / (4 * delta**2 + gamma**2 + 2 * omega**2)
    assert rho[1, 1].real == pytest.approx(want, abs=1e-10)
    assert steady_excited_population(p) == pytest.approx(want, abs=1e-15)
    assert np.trace(rho).real == pytest.approx(1, abs=1e-12)
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
    assert np.linalg.eigvalsh(rho).min() >= -1e-12


def test_steady_state_not_unique_without_decay():
    with pytest.raises(NonUniqueSteadyState):
        steady_state(QubitParams(0, 0, 0))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 3), st.floats(0.05, 3), st.floats(-2, 2), st.integers(0, 2**32 - 1))
def test_long_time_limit_is_steady_state(omega, gamma, delta, seed):
    p = QubitParams(delta, omega, gamma)
    rho0 = random_rho(np.random.default_rng(seed))
    v = linalg.expm(build_liouvillian(p) * (50 / gamma)) @ vectorize(rho0)
    assert np.linalg.norm(v - vectorize(steady_state(p))) <= 1e-6


def test_effective_decay_rate_examples():
    assert effective_decay_rate(ThreeLevelParams(0, 0, 1e6, 0, 1e7)) == 0
    assert effective_decay_rate(ThreeLevelParams(0, 0, 1e6, 1e7, 0)) == pytest.approx(1e5, rel=1e-15)
    assert effective_decay_rate(ThreeLevelParams(0, 0, 1e6, 8e6, 2e6)) == pytest.approx(8e4, rel=1e-15)
    with pytest.raises(ZeroGamma):
        effective_decay_rate(ThreeLevelParams(0, 0, 1e6, 0, 0))


def three_level_direct(t, rho):
    h = np.zeros((3, 3), dtype=complex)
    h[1, 1] = t.delta
    h[0, 1] = h[1, 0] = t.omega / 2
    h[1, 2] = h[2, 1] = t.omega_p / 2
    lg = np.zeros((3, 3), dtype=complex)
    lg[0, 2] = np.sqrt(t.gamma_g)
    le = np.zeros((3, 3), dtype=complex)
    le[1, 2] = np.sqrt(t.gamma_e)
    return lindblad_rhs(h, [lg, le], rho)


def test_three_level_action_100_random_states():
    t = ThreeLevelParams(0.3e5, 2e5, 1e6, 8e6, 2e6)
    m = build_liouvillian_three_level(t)
    rng = np.random.default_rng(11)
    for _ in range(100):
        rho = random_rho(rng, 3)
        got = (m @ rho.reshape(-1)).reshape(3, 3)
        want = three_level_direct(t, rho)
        assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(want))


def test_three_level_trace_and_hermiticity():
    t = ThreeLevelParams(1e4, 2e5, 1e6, 8e6, 2e6)
    m = build_liouvillian_three_level(t)
    trace_rows = m[[0, 4, 8]].sum(axis=0)
    assert np.max(np.abs(trace_rows)) <= 1e-15 * np.max(np.abs(m))
    rho = random_rho(np.random.default_rng(5), 3)
    out = (m @ rho.reshape(-1)).reshape(3, 3)
    np.testing.assert_allclose(out, out.conj().T, atol=1e-12 * np.max(np.abs(out)))


def test_three_level_pure_decay_kernel():
    m = build_liouvillian_three_level(ThreeLevelParams(0, 0, 0, 1e7, 0))
    w = np.linalg.eigvals(m)
    assert np.sum(np.abs(w) < 1e-6) >= 2
    for k in (0, 4):  # |g><g| and |e><e|
        e = np.zeros(9)
        e[k] = 1
        assert np.linalg.norm(m @ e) == 0


def test_three_level_steady_state_is_valid():
    rho = steady_state_three_level(ThreeLevelParams(0, 1e5, 1e6, 1e7, 0))
    assert np.trace(rho).real == pytest.approx(1, abs=1e-12)
    assert np.linalg.eigvalsh(rho).min() >= -1e-12


def test_lep_locate_two_level():
    assert lep_locate(two_level_source(), 0.05, 1.0) == pytest.approx(0.25, abs=1e-4)
    assert lep_locate(two_level_source(gamma_eff=370e3), 0.05, 1.0, rtol=1e-8) == pytest.approx(0.25, rel=1e-6)


def test_lep_locate_three_level():
    t = ThreeLevelParams(0, 0, 1e6, 1e7, 0)
    r = lep_locate(three_level_source(t), 0.05, 1.0)
    assert abs(r - 0.25) <= 0.05
    # bifurcation in units of gamma_eff / 4 Omega
    assert abs(1 / (4 * r) - 1) <= 0.05


def test_lep_locate_no_bracket():
    with pytest.raises(NoBracket):
        lep_locate(two_level_source(), 0.3, 1.0)
