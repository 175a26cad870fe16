"""Folding objective and penalty terms as binary polynomials.

The assembled energy is::

    lambda0*Obj + lambda1*C1 - lambda2*C2 - lambda3*C3

where ``Obj`` weights squared non-adjacent bead separations by contact
weights, ``C1`` penalises turns that do not move, and ``C2``/``C3`` reward
separation of bead pairs / bond midpoints along one randomly chosen axis.
Turn components are expressed in (non-doubled) lattice units here.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .lattice import BITS_PER_TURN, decode_turn, num_qubits
from .polynomial import BinaryPolynomial

log = logging.getLogger(__name__)

STANDARD_RESIDUES = "ACDEFGHIKLMNPQRSTVWY"
SIGN_CONVENTIONS = ("negated", "literal")
AXES = "xyz"


@dataclass(frozen=True, eq=False)
class MJTable:
    residue_order: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        order = tuple(self.residue_order)
        missing = sorted(set(STANDARD_RESIDUES) - set(order))
        if missing:
            raise ValueError(f"contact table is missing residue(s): {', '.join(missing)}")
        if len(order) != len(set(order)):
            raise ValueError("contact table lists a residue more than once")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(order), len(order)):
            raise ValueError(f"contact table must be {len(order)}x{len(order)}, got {vals.shape}")
        if not np.array_equal(vals, vals.T):
            raise ValueError("contact table is not symmetric")
        object.__setattr__(self, "residue_order", order)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_index", {r: i for i, r in enumerate(order)})

    def __call__(self, a: str, b: str) -> float:
        try:
            return float(self.values[self._index[a], self._index[b]])
        except KeyError as exc:
            raise KeyError(f"residue {exc.args[0]!r} not in contact table") from None

    @classmethod
    def uniform(cls, value: float = 1.0) -> "MJTable":
        n = len(STANDARD_RESIDUES)
        return cls(tuple(STANDARD_RESIDUES), np.full((n, n), float(value)))


def pair_weight(mj: MJTable, a: str, b: str, sign: str = "negated") -> float:
    if sign not in SIGN_CONVENTIONS:
        raise ValueError(f"sign convention must be one of {SIGN_CONVENTIONS}, got {sign!r}")
    v = mj(a, b)
    return -v if sign == "negated" else v


def nonadjacent_pairs(n_beads: int) -> list[tuple[int, int]]:
    """0-based bead pairs (j, k) with k >= j + 2."""
    return [(j, k) for j in range(n_beads - 2) for k in range(j + 2, n_beads)]


def nonadjacent_bond_pairs(n_beads: int) -> list[tuple[int, int]]:
    """0-based bond pairs (r, k) with k >= r + 2; bond ``r`` joins beads r and r+1."""
    return [(r, k) for r in range(n_beads - 3) for k in range(r + 2, n_beads - 1)]


def pair_weights(sequence, mj: MJTable, sign: str = "negated") -> dict[tuple[int, int], float]:
    seq = list(sequence)
    return {(j, k): pair_weight(mj, seq[j], seq[k], sign) for j, k in nonadjacent_pairs(len(seq))}


# --- per-turn component polynomials -------------------------------------------------

def _local_components() -> tuple[BinaryPolynomial, BinaryPolynomial, BinaryPolynomial]:
    """x, y, z turn components over local variables 0..4 = (q1..q5)."""
    def v(i):
        return BinaryPolynomial.variable(BITS_PER_TURN, i)

    one = BinaryPolynomial.constant(BITS_PER_TURN, 1.0)
    q1, q2, q3, q4, q5 = (v(i) for i in range(5))
    a = 0.5 - 0.5 * q1 - q2 + q1 * q2
    b = 0.5 + 0.5 * q1 - q3 - q1 * q2
    xy = q4 * q5
    yz = (one - q4) * q5
    zx = q4 * (one - q5)
    return (xy * a + zx * b, yz * a + xy * b, zx * a + yz * b)


@lru_cache(maxsize=None)
def _templates():
    comps = _local_components()
    squares = [p * p for p in comps]
    cross = []
    for p in comps:
        left = BinaryPolynomial(2 * BITS_PER_TURN, dict(p.items()))
        right = BinaryPolynomial(
            2 * BITS_PER_TURN, {tuple(i + BITS_PER_TURN for i in k): c for k, c in p.items()}
        )
        cross.append(left * right)
    one = BinaryPolynomial.constant(BITS_PER_TURN, 1.0)
    c1 = (one - squares[0]) * (one - squares[1]) * (one - squares[2])
    zero_table = [
        1.0 if decode_turn([(s >> k) & 1 for k in range(5)]) == (0, 0, 0) else 0.0
        for s in range(32)
    ]
    c1_strict = BinaryPolynomial.from_truth_table(BITS_PER_TURN, range(5), zero_table)
    return (
        tuple(tuple(p.sorted_items()) for p in comps),
        tuple(tuple(p.sorted_items()) for p in squares),
        tuple(tuple(p.sorted_items()) for p in cross),
        tuple(c1.sorted_items()),
        tuple(c1_strict.sorted_items()),
    )


def _shift(mono, turn):
    off = BITS_PER_TURN * turn
    return tuple(i + off for i in mono)


def _shift_pair(mono, l, m):
    ol, om = BITS_PER_TURN * l, BITS_PER_TURN * (m - 1)
    return tuple(i + ol if i < BITS_PER_TURN else i + om for i in mono)


def turn_component_polynomials(turn_index: int, n_beads: int):
    """(Px, Py, Pz) of one turn, in lattice units, over all ``5(N-1)`` variables."""
    if not 0 <= turn_index <= n_beads - 2:
        raise IndexError(f"turn index {turn_index} out of range for {n_beads} beads")
    n = num_qubits(n_beads)
    comps = _templates()[0]
    return tuple(
        BinaryPolynomial(n, {_shift(k, turn_index): c for k, c in items}) for items in comps
    )


def quadratic_form(n_beads: int, mats) -> BinaryPolynomial:
    """``sum_axis sum_{l,m} M_axis[l,m] * P_axis^l * P_axis^m`` for symmetric turn matrices."""
    n_turns = n_beads - 1
    _, squares, cross, _, _ = _templates()
    acc: dict[tuple[int, ...], float] = {}
    for axis in range(3):
        m_ax = np.asarray(mats[axis], dtype=float)
        if m_ax.shape != (n_turns, n_turns):
            raise ValueError(f"turn matrix must be {n_turns}x{n_turns}")
        for l in range(n_turns):
            w = m_ax[l, l]
            if w != 0.0:
                for k, c in squares[axis]:
                    key = _shift(k, l)
                    acc[key] = acc.get(key, 0.0) + w * c
            for m in range(l + 1, n_turns):
                w = m_ax[l, m] + m_ax[m, l]
                if w != 0.0:
                    for k, c in cross[axis]:
                        key = _shift_pair(k, l, m)
                        acc[key] = acc.get(key, 0.0) + w * c
    return BinaryPolynomial(num_qubits(n_beads), acc)


def _span(n_turns: int, start: int, stop: int) -> np.ndarray:
    c = np.zeros(n_turns)
    c[start:stop] = 1.0
    return c


def build_objective(sequence, mj: MJTable, sign: str = "negated") -> BinaryPolynomial:
    n_beads = len(sequence)
    n_turns = max(n_beads - 1, 0)
    mat = np.zeros((n_turns, n_turns))
    for (j, k), w in pair_weights(sequence, mj, sign).items():
        c = _span(n_turns, j, k)
        mat += w * np.outer(c, c)
    return quadratic_form(n_beads, (mat, mat, mat))


def build_continuity(n_beads: int, strict: bool = False) -> BinaryPolynomial:
    if n_beads < 2:
        raise ValueError(f"need at least 2 beads, got {n_beads}")
    items = _templates()[4 if strict else 3]
    acc: dict[tuple[int, ...], float] = {}
    for t in range(n_beads - 1):
        for k, c in items:
            key = _shift(k, t)
            acc[key] = acc.get(key, 0.0) + c
    return BinaryPolynomial(num_qubits(n_beads), acc)


@dataclass(frozen=True)
class AxisSelectors:
    """One selected axis (0=x, 1=y, 2=z) per bead pair and per bond pair."""

    overlap: dict[tuple[int, int], int]
    crossing: dict[tuple[int, int], int]
    seed: int | None = None

    @classmethod
    def random(cls, n_beads: int, seed: int) -> "AxisSelectors":
        rng = np.random.default_rng(seed)
        pairs = nonadjacent_pairs(n_beads)
        bonds = nonadjacent_bond_pairs(n_beads)
        draws = rng.integers(0, 3, size=len(pairs) + len(bonds))
        return cls(
            {p: int(a) for p, a in zip(pairs, draws[: len(pairs)])},
            {p: int(a) for p, a in zip(bonds, draws[len(pairs):])},
            seed,
        )

    @classmethod
    def fixed(cls, n_beads: int, axis: int) -> "AxisSelectors":
        return cls(
            {p: axis for p in nonadjacent_pairs(n_beads)},
            {p: axis for p in nonadjacent_bond_pairs(n_beads)},
        )

    @staticmethod
    def one_hot(axis: int) -> tuple[int, int, int]:
        return tuple(int(axis == a) for a in range(3))


def build_overlap(n_beads: int, selectors: AxisSelectors) -> BinaryPolynomial:
    n_turns = n_beads - 1
    mats = np.zeros((3, n_turns, n_turns))
    for i, j in nonadjacent_pairs(n_beads):
        try:
            axis = selectors.overlap[(i, j)]
        except KeyError:
            raise KeyError(f"no axis selector for bead pair {(i, j)}") from None
        c = _span(n_turns, i, j)
        mats[axis] += np.outer(c, c)
    return quadratic_form(n_beads, mats)


def midpoint_offset_coefficients(n_turns: int, r: int, k: int) -> np.ndarray:
    """Turn weights giving midpoint(bond k) - midpoint(bond r)."""
    c = _span(n_turns, r, k)
    c[r] -= 0.5
    c[k] += 0.5
    return c


def build_crossing(n_beads: int, selectors: AxisSelectors) -> BinaryPolynomial:
    n_turns = n_beads - 1
    mats = np.zeros((3, max(n_turns, 0), max(n_turns, 0)))
    for r, k in nonadjacent_bond_pairs(n_beads):
        try:
            axis = selectors.crossing[(r, k)]
        except KeyError:
            raise KeyError(f"no axis selector for bond pair {(r, k)}") from None
        c = midpoint_offset_coefficients(n_turns, r, k)
        mats[axis] += np.outer(c, c)
    return quadratic_form(n_beads, mats)


@dataclass(frozen=True)
class PenaltyFactors:
    lambda0: float
    lambda1: float
    lambda2: float
    lambda3: float
    c_obj: float = float("nan")
    c_continuity: float = float("nan")
    c_overlap: float = float("nan")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def calibrate_penalties(
    sequence,
    mj: MJTable,
    sign: str = "negated",
    lambda1: float | None = None,
    lambda2: float | None = None,
    lambda3: float | None = None,
) -> PenaltyFactors:
    """Penalty weights from the summed contact weights and the constraint term counts.

    Explicit ``lambda*`` arguments override the calibrated values; ``lambda3``
    defaults to half of the (possibly overridden) ``lambda2``.
    """
    n = len(sequence)
    c_obj = float(sum(pair_weights(sequence, mj, sign).values()))
    c_cont = float(n - 1)
    c_over = float((n - 1) * (n - 2) // 2)
    need_obj = lambda1 is None or lambda2 is None
    if need_obj and c_obj == 0.0:
        raise ValueError(
            "summed contact weight is zero, penalties cannot be calibrated; "
            "pass explicit lambda1/lambda2 overrides"
        )
    l1 = abs(c_obj / c_cont) if lambda1 is None else float(lambda1)
    l2 = abs(c_obj / c_over) if lambda2 is None else float(lambda2)
    l3 = 0.5 * l2 if lambda3 is None else float(lambda3)
    return PenaltyFactors(1.0, l1, l2, l3, c_obj, c_cont, c_over)


def assemble(obj, c1, c2, c3, lam: PenaltyFactors) -> BinaryPolynomial:
    n = obj.num_vars
    for p in (c1, c2, c3):
        if p.num_vars != n:
            raise ValueError(f"variable-count mismatch: {n} vs {p.num_vars}")
    return obj * lam.lambda0 + c1 * lam.lambda1 - c2 * lam.lambda2 - c3 * lam.lambda3


@dataclass
class FoldingHamiltonian:
    sequence: str
    sign: str
    penalties: PenaltyFactors
    selectors: AxisSelectors
    strict_continuity: bool
    objective: BinaryPolynomial
    continuity: BinaryPolynomial
    overlap: BinaryPolynomial
    crossing: BinaryPolynomial
    polynomial: BinaryPolynomial = field(init=False)

    def __post_init__(self):
        self.polynomial = assemble(
            self.objective, self.continuity, self.overlap, self.crossing, self.penalties
        )

    @property
    def n_beads(self) -> int:
        return len(self.sequence)

    @property
    def num_vars(self) -> int:
        return self.polynomial.num_vars


def build_hamiltonian(
    sequence,
    mj: MJTable,
    sign: str = "negated",
    seed: int = 0,
    strict_continuity: bool = False,
    lambda1: float | None = None,
    lambda2: float | None = None,
    lambda3: float | None = None,
    penalties: PenaltyFactors | None = None,
) -> FoldingHamiltonian:
    seq = "".join(sequence)
    n = len(seq)
    if n < 2:
        raise ValueError(f"need at least 2 residues, got {n}")
    if penalties is None:
        penalties = calibrate_penalties(seq, mj, sign, lambda1, lambda2, lambda3)
    selectors = AxisSelectors.random(n, seed)
    obj = build_objective(seq, mj, sign)
    if not len(obj):
        log.warning("objective is empty for %d beads (no non-adjacent pairs)", n)
    return FoldingHamiltonian(
        seq,
        sign,
        penalties,
        selectors,
        strict_continuity,
        obj,
        build_continuity(n, strict_continuity),
        build_overlap(n, selectors),
        build_crossing(n, selectors),
    )
