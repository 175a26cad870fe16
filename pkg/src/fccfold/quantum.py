"""Pauli-Z Hamiltonians and a CVaR-VQE on a dense statevector simulator.

Qubit ``i`` is binary variable ``i``; in a statevector index it is bit ``i``
(little-endian), and in printed bitstrings it is character ``i``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .errors import CapabilityError
from .polynomial import BinaryPolynomial, index_to_bitstring
from .solvers import SampleSet

log = logging.getLogger(__name__)

DENSE_QUBIT_CAP = 20


@dataclass(frozen=True)
class PauliHamiltonian:
    """Weighted sum of Z strings; ``terms`` maps a Z bit mask to its coefficient."""

    num_qubits: int
    terms: dict[int, float]

    def __len__(self):
        return len(self.terms)

    def sorted_terms(self) -> list[tuple[int, float]]:
        return sorted(self.terms.items(), key=lambda kv: (bin(kv[0]).count("1"), kv[0]))

    def diagonal(self) -> np.ndarray:
        """``<b|H|b>`` for every basis index ``b`` (fast Walsh-Hadamard transform)."""
        n = self.num_qubits
        if n > DENSE_QUBIT_CAP + 5:
            raise CapabilityError(f"dense diagonal limited to {DENSE_QUBIT_CAP + 5} qubits")
        d = np.zeros(1 << n)
        for mask, c in self.terms.items():
            d[mask] += c
        for k in range(n):
            v = d.reshape(-1, 2, 1 << k)
            a = v[:, 0, :].copy()
            v[:, 0, :] += v[:, 1, :]
            v[:, 1, :] = a - v[:, 1, :]
        return d

    def expectation(self, bits: str) -> float:
        """Diagonal element for one bitstring (qubit 0 leftmost)."""
        b = sum(1 << i for i, ch in enumerate(bits) if ch == "1")
        return sum(c * (-1.0 if bin(m & b).count("1") & 1 else 1.0) for m, c in self.terms.items())

    @staticmethod
    def label(mask: int) -> str:
        if not mask:
            return "I"
        return "".join(f"Z{i}" for i in range(mask.bit_length()) if mask >> i & 1)


def to_pauli(poly: BinaryPolynomial, tol: float = 0.0) -> PauliHamiltonian:
    """Exact expansion under ``q_i = (1 - Z_i) / 2``."""
    acc: dict[int, float] = {}
    for mono, c in poly.sorted_items():
        scale = c / (1 << len(mono))
        for r in range(len(mono) + 1):
            sgn = -scale if r & 1 else scale
            for sub in combinations(mono, r):
                m = 0
                for i in sub:
                    m |= 1 << i
                acc[m] = acc.get(m, 0.0) + sgn
    return PauliHamiltonian(poly.num_vars, {m: c for m, c in acc.items() if abs(c) > tol})


def pauli_term_count(poly: BinaryPolynomial, tol: float = 1e-12) -> int:
    return len(to_pauli(poly, tol))


# --- ansatz -------------------------------------------------------------------------

@dataclass
class AnsatzConfig:
    """Layers of RY and RZ on every qubit followed by a CX entangler, plus a final rotation layer."""

    num_qubits: int
    layers: int = 1
    entanglement: str = "linear"
    theta: np.ndarray | None = None

    def __post_init__(self):
        if self.entanglement not in ("linear", "circular"):
            raise ValueError(f"entanglement must be 'linear' or 'circular', got {self.entanglement!r}")
        if self.theta is not None:
            self.theta = np.asarray(self.theta, dtype=float)
            if self.theta.shape != (self.num_parameters,):
                raise ValueError(
                    f"expected {self.num_parameters} parameters, got {self.theta.shape}"
                )

    @property
    def num_parameters(self) -> int:
        return 2 * self.num_qubits * (self.layers + 1)

    def with_theta(self, theta) -> "AnsatzConfig":
        return AnsatzConfig(self.num_qubits, self.layers, self.entanglement, theta)

    def entangling_pairs(self) -> list[tuple[int, int]]:
        n = self.num_qubits
        pairs = [(i, i + 1) for i in range(n - 1)]
        if self.entanglement == "circular" and n > 2:
            pairs.append((n - 1, 0))
        return pairs


def _apply_1q(psi: np.ndarray, gate: np.ndarray, q: int, n: int) -> np.ndarray:
    v = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
    return np.einsum("ab,ibj->iaj", gate, v).reshape(-1)


def _apply_cx(psi: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    v = psi.reshape([2] * n)  # axis k <-> qubit n-1-k
    c_ax, t_ax = n - 1 - control, n - 1 - target
    idx = [slice(None)] * n
    idx[c_ax] = 1
    sub = v[tuple(idx)]
    t_sub = t_ax if t_ax < c_ax else t_ax - 1
    v[tuple(idx)] = np.flip(sub, axis=t_sub).copy()
    return v.reshape(-1)


def _ry(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t):
    return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]])


def simulate_ansatz(config: AnsatzConfig, theta=None) -> np.ndarray:
    n = config.num_qubits
    if n > DENSE_QUBIT_CAP:
        raise CapabilityError(f"dense statevector limited to {DENSE_QUBIT_CAP} qubits, got {n}")
    theta = np.asarray(config.theta if theta is None else theta, dtype=float)
    if theta.shape != (config.num_parameters,):
        raise ValueError(f"expected {config.num_parameters} parameters, got {theta.shape}")
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    k = 0
    for layer in range(config.layers + 1):
        for q in range(n):
            psi = _apply_1q(psi, _ry(theta[k]), q, n)
            k += 1
        for q in range(n):
            psi = _apply_1q(psi, _rz(theta[k]), q, n)
            k += 1
        if layer < config.layers:
            for c, t in config.entangling_pairs():
                psi = _apply_cx(psi, c, t, n)
    return psi


# --- CVaR ---------------------------------------------------------------------------

def sample_counts(state: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    p = np.abs(state) ** 2
    p = p / p.sum()
    return rng.multinomial(shots, p)


def cvar_from_counts(energies: np.ndarray, counts: np.ndarray, alpha: float) -> float:
    """Mean of the lowest ``ceil(alpha * shots)`` sampled energies."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    shots = int(counts.sum())
    keep = max(1, math.ceil(alpha * shots - 1e-12))
    hit = np.flatnonzero(counts)
    order = hit[np.argsort(energies[hit], kind="stable")]
    total, taken = 0.0, 0
    for b in order:
        m = min(int(counts[b]), keep - taken)
        total += m * energies[b]
        taken += m
        if taken == keep:
            break
    return total / keep


def cvar_energy(H: PauliHamiltonian, state: np.ndarray, shots: int = 4000,
                alpha: float = 1.0, seed=None, diagonal: np.ndarray | None = None) -> float:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    diag = H.diagonal() if diagonal is None else diagonal
    counts = sample_counts(state, shots, np.random.default_rng(seed))
    return cvar_from_counts(diag, counts, alpha)


@dataclass
class VqeConfig:
    shots: int = 4000
    cvar_alpha: float = 0.1
    max_iterations: int = 500
    optimizer: str = "Nelder-Mead"
    seed: int = 0
    initial_theta: np.ndarray | None = None

    def __post_init__(self):
        if not 0.0 < self.cvar_alpha <= 1.0:
            raise ValueError(f"cvar_alpha must lie in (0, 1], got {self.cvar_alpha}")
        if self.shots < 1 or self.max_iterations < 1:
            raise ValueError("shots and max_iterations must be >= 1")


@dataclass
class VqeResult:
    theta: np.ndarray
    energy: float
    trace: list[float]
    samples: SampleSet
    iterations: int
    optimizer_message: str = ""
    best_sampled: tuple[str, float] | None = field(default=None)


def vqe_minimize(H: PauliHamiltonian, ansatz: AnsatzConfig, vqe: VqeConfig) -> VqeResult:
    """CVaR-VQE with a derivative-free local optimiser.

    One iteration is one CVaR evaluation (4000 shots by default); the shot
    stream of iteration ``i`` is seeded by ``(seed, i)``.  Every sampled
    bitstring is kept in the returned :class:`SampleSet`.
    """
    n = H.num_qubits
    if n > DENSE_QUBIT_CAP:
        raise CapabilityError(f"dense statevector limited to {DENSE_QUBIT_CAP} qubits, got {n}")
    if ansatz.num_qubits != n:
        raise ValueError(f"ansatz has {ansatz.num_qubits} qubits, Hamiltonian {n}")
    diag = H.diagonal()
    if vqe.initial_theta is not None:
        theta0 = np.asarray(vqe.initial_theta, dtype=float)
    elif ansatz.theta is not None:
        theta0 = ansatz.theta
    else:
        theta0 = np.random.default_rng([vqe.seed, 2**31]).uniform(
            -np.pi, np.pi, ansatz.num_parameters)
    trace: list[float] = []
    all_counts = np.zeros(1 << n, dtype=np.int64)
    best = {"e": math.inf, "theta": theta0.copy()}

    class _Budget(Exception):
        pass

    def fun(theta):
        if len(trace) >= vqe.max_iterations:
            raise _Budget
        psi = simulate_ansatz(ansatz, theta)
        counts = sample_counts(psi, vqe.shots, np.random.default_rng([vqe.seed, len(trace)]))
        e = cvar_from_counts(diag, counts, vqe.cvar_alpha)
        if not math.isfinite(e):
            raise FloatingPointError(f"non-finite energy at iteration {len(trace)}")
        all_counts[:] += counts
        trace.append(e)
        if e < best["e"]:
            best["e"], best["theta"] = e, np.array(theta, copy=True)
        return e

    message = ""
    options = {"maxiter": vqe.max_iterations}
    if vqe.optimizer.lower() == "nelder-mead":
        options.update(maxfev=vqe.max_iterations, adaptive=True)
    try:
        res = minimize(fun, theta0, method=vqe.optimizer, options=options)
        message = str(res.message)
    except _Budget:
        message = "iteration budget exhausted"
    hit = np.flatnonzero(all_counts)
    counts = {index_to_bitstring(int(b), n): int(all_counts[b]) for b in hit}
    energy_of = {index_to_bitstring(int(b), n): float(diag[b]) for b in hit}
    samples = SampleSet.from_counts(counts, energy_of.__getitem__, "vqe")
    b = samples.best()
    return VqeResult(best["theta"], best["e"], trace, samples, len(trace), message,
                     (b.bitstring, b.energy))
