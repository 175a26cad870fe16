"""Multilinear polynomials over binary variables."""
from __future__ import annotations

import json
from typing import Iterable, Mapping

import numpy as np

Monomial = tuple[int, ...]


class BinaryPolynomial:
    """Real-coefficient multilinear polynomial over ``num_vars`` binary variables.

    Terms are stored as a mapping from strictly increasing index tuples to
    coefficients; the empty tuple is the constant.  Because ``q*q == q`` for
    binary variables, products merge index sets instead of raising powers.
    Instances are treated as immutable; arithmetic returns new objects.
    """

    __slots__ = ("num_vars", "_terms")

    def __init__(self, num_vars: int, terms: Mapping[Iterable[int], float] | None = None):
        self.num_vars = int(num_vars)
        acc: dict[Monomial, float] = {}
        for key, c in (terms or {}).items():
            mono = tuple(sorted(set(int(i) for i in key)))
            if mono and (mono[0] < 0 or mono[-1] >= self.num_vars):
                raise ValueError(f"term {mono} out of range for {self.num_vars} variables")
            acc[mono] = acc.get(mono, 0.0) + float(c)
        self._terms = {k: v for k, v in acc.items() if v != 0.0}

    @classmethod
    def _raw(cls, num_vars: int, terms: dict[Monomial, float]) -> "BinaryPolynomial":
        p = cls.__new__(cls)
        p.num_vars = num_vars
        p._terms = {k: v for k, v in terms.items() if v != 0.0}
        return p

    @classmethod
    def constant(cls, num_vars: int, value: float) -> "BinaryPolynomial":
        return cls._raw(num_vars, {(): float(value)})

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "BinaryPolynomial":
        return cls(num_vars, {(index,): 1.0})

    @classmethod
    def from_truth_table(cls, num_vars: int, variables: Iterable[int], values) -> "BinaryPolynomial":
        """Unique multilinear interpolant of a function of ``variables``.

        ``values[s]`` is the function value where bit ``k`` of ``s`` is the
        value of ``variables[k]``.
        """
        variables = list(variables)
        coef = np.array(values, dtype=float).copy()
        m = len(variables)
        if coef.shape != (1 << m,):
            raise ValueError(f"expected {1 << m} values, got {coef.shape}")
        # Moebius inversion over the subset lattice.
        for k in range(m):
            step = 1 << k
            c = coef.reshape(-1, 2, step)
            c[:, 1, :] -= c[:, 0, :]
        terms = {}
        for s in range(1 << m):
            if coef[s] != 0.0:
                terms[tuple(sorted(variables[k] for k in range(m) if s >> k & 1))] = coef[s]
        return cls(num_vars, terms)

    @property
    def terms(self) -> dict[Monomial, float]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __eq__(self, other):
        if not isinstance(other, BinaryPolynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self._terms == other._terms

    def __repr__(self):
        return f"BinaryPolynomial(num_vars={self.num_vars}, terms={len(self._terms)})"

    def _check(self, other: "BinaryPolynomial"):
        if other.num_vars != self.num_vars:
            raise ValueError(
                f"variable-count mismatch: {self.num_vars} vs {other.num_vars}"
            )

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = BinaryPolynomial.constant(self.num_vars, other)
        self._check(other)
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0.0) + v
        return BinaryPolynomial._raw(self.num_vars, acc)

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            if other == 0:
                return BinaryPolynomial._raw(self.num_vars, {})
            return BinaryPolynomial._raw(
                self.num_vars, {k: v * float(other) for k, v in self._terms.items()}
            )
        self._check(other)
        acc: dict[Monomial, float] = {}
        for ka, va in self._terms.items():
            sa = set(ka)
            for kb, vb in other._terms.items():
                key = ka if not kb else kb if not ka else tuple(sorted(sa.union(kb)))
                acc[key] = acc.get(key, 0.0) + va * vb
        return BinaryPolynomial._raw(self.num_vars, acc)

    __rmul__ = __mul__

    def degree(self) -> int:
        return max((len(k) for k in self._terms), default=0)

    def variables(self) -> set[int]:
        return {i for k in self._terms for i in k}

    def constant_term(self) -> float:
        return self._terms.get((), 0.0)

    # both ignore the constant, which never changes an energy difference
    def max_abs_coefficient(self) -> float:
        return max((abs(v) for k, v in self._terms.items() if k), default=0.0)

    def min_abs_coefficient(self) -> float:
        return min((abs(v) for k, v in self._terms.items() if k), default=0.0)

    def sorted_items(self) -> list[tuple[Monomial, float]]:
        return sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def to_json(self) -> str:
        payload = {
            "num_vars": self.num_vars,
            "terms": [[list(k), v] for k, v in self.sorted_items()],
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "BinaryPolynomial":
        payload = json.loads(text)
        return cls(payload["num_vars"], {tuple(k): v for k, v in payload["terms"]})


def _bits(poly: BinaryPolynomial, bits) -> list[int]:
    if isinstance(bits, str):
        bits = "".join(bits.split())
        b = [int(c) for c in bits]
    else:
        b = [int(x) for x in bits]
    if len(b) != poly.num_vars:
        raise ValueError(
            f"bit length mismatch: polynomial has {poly.num_vars} variables, got {len(b)} bits"
        )
    return b


def evaluate(poly: BinaryPolynomial, bits) -> float:
    """Value of ``poly`` at a single assignment (str of 0/1 or int sequence)."""
    b = _bits(poly, bits)
    total = 0.0
    for mono, c in poly.items():
        if all(b[i] for i in mono):
            total += c
    return total


def evaluate_many(poly: BinaryPolynomial, bits: np.ndarray) -> np.ndarray:
    """Vectorised :func:`evaluate` over rows of a ``(m, num_vars)`` 0/1 array."""
    x = np.asarray(bits, dtype=bool)
    if x.ndim != 2 or x.shape[1] != poly.num_vars:
        raise ValueError(f"expected shape (m, {poly.num_vars}), got {x.shape}")
    out = np.zeros(x.shape[0])
    for mono, c in poly.items():
        if not mono:
            out += c
        else:
            out += c * np.logical_and.reduce(x[:, list(mono)], axis=1)
    return out


def truncate_to_quadratic(poly: BinaryPolynomial) -> BinaryPolynomial:
    return BinaryPolynomial._raw(
        poly.num_vars, {k: v for k, v in poly.items() if len(k) <= 2}
    )


def all_energies(poly: BinaryPolynomial) -> np.ndarray:
    """Energies of all ``2**num_vars`` assignments; bit ``i`` of the index is variable ``i``.

    Uses the subset-sum (zeta) transform of the coefficient vector, so cost is
    ``O(n 2**n)`` regardless of the number of terms.
    """
    n = poly.num_vars
    e = np.zeros(1 << n)
    for mono, c in poly.items():
        e[sum(1 << i for i in mono)] += c
    for k in range(n):
        step = 1 << k
        v = e.reshape(-1, 2, step)
        v[:, 1, :] += v[:, 0, :]
    return e


def index_to_bitstring(index: int, n: int) -> str:
    """Bitstring (variable 0 leftmost) for an index whose bit ``i`` is variable ``i``."""
    return "".join("1" if index >> i & 1 else "0" for i in range(n))


def bitstring_to_index(bits: str) -> int:
    return sum(1 << i for i, c in enumerate(bits) if c == "1")
