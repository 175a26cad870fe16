import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from fccfold.errors import CapabilityError
from fccfold.hamiltonian import build_hamiltonian
from fccfold.polynomial import BinaryPolynomial, all_energies, evaluate
from fccfold.quantum import (
    AnsatzConfig,
    PauliHamiltonian,
    VqeConfig,
    cvar_energy,
    cvar_from_counts,
    pauli_term_count,
    sample_counts,
    simulate_ansatz,
    to_pauli,
    vqe_minimize,
)


def test_to_pauli_examples():
    assert to_pauli(BinaryPolynomial(1, {(0,): 1})).terms == {0: 0.5, 1: -0.5}
    assert to_pauli(BinaryPolynomial(2, {(0, 1): 1})).terms == {0: 0.25, 1: -0.25, 2: -0.25,
                                                               3: 0.25}
    assert pauli_term_count(BinaryPolynomial(1, {(0,): 1})) == 2


def test_cancelled_terms_dropped():
    # xor: the single-Z strings cancel
    p = BinaryPolynomial(2, {(0,): 1.0, (1,): 1.0, (0, 1): -2.0})
    h = to_pauli(p, tol=1e-12)
    assert h.terms == {0: 0.5, 3: -0.5}
    assert pauli_term_count(p) == 2


def test_labels():
    assert PauliHamiltonian.label(0) == "I"
    assert PauliHamiltonian.label(0b1001) == "Z0Z3"


@st.composite
def polys(draw):
    n = draw(st.integers(1, 7))
    keys = draw(st.lists(st.lists(st.integers(0, n - 1), max_size=5), max_size=12))
    coefs = draw(st.lists(st.floats(-3, 3, allow_nan=False), min_size=len(keys),
                          max_size=len(keys)))
    return BinaryPolynomial(n, dict(zip(map(tuple, keys), coefs)))


@given(polys())
def test_diagonal_matches_polynomial(p):
    h = to_pauli(p)
    assert np.allclose(h.diagonal(), all_energies(p), atol=1e-9)
    rng = np.random.default_rng(0)
    for _ in range(5):
        bits = "".join(rng.choice(["0", "1"], p.num_vars))
        assert h.expectation(bits) == pytest.approx(evaluate(p, bits), abs=1e-9)


def test_ansatz_parameter_count():
    assert AnsatzConfig(10, layers=1).num_parameters == 10 * 1 * 2 + 20
    assert AnsatzConfig(4, layers=3).num_parameters == 4 * 3 * 2 + 8
    with pytest.raises(ValueError):
        AnsatzConfig(3, entanglement="full")
    with pytest.raises(ValueError):
        AnsatzConfig(3, theta=np.zeros(5))


def test_zero_angles_give_all_zero_state():
    psi = simulate_ansatz(AnsatzConfig(4, 2), np.zeros(AnsatzConfig(4, 2).num_parameters))
    assert abs(abs(psi[0]) - 1.0) < 1e-12


@given(st.integers(1, 6), st.integers(0, 3), st.sampled_from(["linear", "circular"]),
       st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_ansatz_is_normalized(n, layers, ent, seed):
    cfg = AnsatzConfig(n, layers, ent)
    theta = np.random.default_rng(seed).uniform(-np.pi, np.pi, cfg.num_parameters)
    assert np.linalg.norm(simulate_ansatz(cfg, theta)) == pytest.approx(1.0, abs=1e-12)


def test_single_rotation_flips_qubit():
    cfg = AnsatzConfig(1, layers=0)
    psi = simulate_ansatz(cfg, np.array([np.pi, 0.0]))
    assert abs(psi[1]) == pytest.approx(1.0, abs=1e-12)


def test_entangler_against_dense_matrices():
    # independent check with explicit Kronecker products; qubit 0 is the least significant bit
    n = 3
    cfg = AnsatzConfig(n, layers=1, entanglement="circular")
    theta = np.random.default_rng(1).uniform(-np.pi, np.pi, cfg.num_parameters)
    eye = np.eye(2)

    def on(q, g):
        m = np.array([[1.0]])
        for k in reversed(range(n)):
            m = np.kron(m, g if k == q else eye)
        return m

    def cx(c, t):
        d = 1 << n
        m = np.zeros((d, d))
        for b in range(d):
            m[b ^ (1 << t) if b >> c & 1 else b, b] = 1
        return m

    def ry(t):
        return np.array([[math.cos(t / 2), -math.sin(t / 2)], [math.sin(t / 2), math.cos(t / 2)]])

    def rz(t):
        return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])

    psi = np.zeros(1 << n, complex)
    psi[0] = 1
    k = 0
    for layer in range(2):
        for q in range(n):
            psi = on(q, ry(theta[k])) @ psi
            k += 1
        for q in range(n):
            psi = on(q, rz(theta[k])) @ psi
            k += 1
        if layer == 0:
            for c, t in [(0, 1), (1, 2), (2, 0)]:
                psi = cx(c, t) @ psi
    assert np.allclose(simulate_ansatz(cfg, theta), psi, atol=1e-12)


def test_dense_cap():
    with pytest.raises(CapabilityError):
        simulate_ansatz(AnsatzConfig(21, 0), np.zeros(42))


def test_sampling_matches_amplitudes():
    cfg = AnsatzConfig(3, 1)
    psi = simulate_ansatz(cfg, np.random.default_rng(3).uniform(-np.pi, np.pi, cfg.num_parameters))
    p = np.abs(psi) ** 2
    counts = sample_counts(psi, 100_000, np.random.default_rng(4))
    chi2, pval = stats.chisquare(counts, 100_000 * p / p.sum())
    assert pval > 1e-3


def test_cvar_examples():
    h = to_pauli(BinaryPolynomial(2, {(0,): 1.0, (1,): -2.0, (0, 1): 0.5}))
    diag = h.diagonal()
    plus = np.full(4, 0.5, dtype=complex)
    counts = sample_counts(plus, 1000, np.random.default_rng(7))
    assert cvar_energy(h, plus, 1000, 1.0, seed=7) == pytest.approx(counts @ diag / 1000)
    assert cvar_energy(h, plus, 1000, 1 / 1000, seed=7) == diag[counts > 0].min()
    for b in range(4):
        basis = np.zeros(4, complex)
        basis[b] = 1
        for a in (0.05, 0.5, 1.0):
            assert cvar_energy(h, basis, 100, a, seed=1) == pytest.approx(diag[b])
    with pytest.raises(ValueError):
        cvar_energy(h, plus, 10, 0.0)


@given(st.lists(st.integers(0, 50), min_size=4, max_size=4).filter(any),
       st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_cvar_non_decreasing_in_alpha(counts, a1, a2):
    e = np.array([3.0, -1.0, 0.5, 2.0])
    lo, hi = sorted((a1, a2))
    c = np.array(counts)
    assert cvar_from_counts(e, c, lo) <= cvar_from_counts(e, c, hi) + 1e-12


def test_vqe_single_qubit_z():
    h = PauliHamiltonian(1, {1: 1.0})
    res = vqe_minimize(h, AnsatzConfig(1, 1), VqeConfig(shots=4000, cvar_alpha=1.0,
                                                        max_iterations=300, seed=0))
    assert res.energy == pytest.approx(-1.0, abs=1e-3)
    assert len(res.trace) == res.iterations <= 300
    assert res.samples.best().bitstring == "1"


def test_vqe_resume_and_budget():
    h = PauliHamiltonian(2, {1: 1.0, 2: 0.5, 3: 0.25})
    ans = AnsatzConfig(2, 1)
    res = vqe_minimize(h, ans, VqeConfig(max_iterations=25, seed=3))
    assert res.iterations == 25
    again = vqe_minimize(h, ans, VqeConfig(max_iterations=25, seed=3))
    assert again.trace == res.trace
    resumed = vqe_minimize(h, ans, VqeConfig(max_iterations=10, seed=4, initial_theta=res.theta))
    # first evaluation happens at the resumed parameters with shot stream (4, 0)
    counts = sample_counts(simulate_ansatz(ans, res.theta), 4000, np.random.default_rng([4, 0]))
    assert resumed.trace[0] == cvar_from_counts(h.diagonal(), counts, 0.1)


def test_folding_pauli_equivalence(synthetic_mj):
    h = build_hamiltonian("GYM", synthetic_mj, seed=0)
    ph = to_pauli(h.polynomial)
    assert np.allclose(ph.diagonal(), all_energies(h.polynomial), atol=1e-9)
