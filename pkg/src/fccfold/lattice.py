"""Turn-based encoding of a bead chain on the FCC lattice.

Each turn is five bits ``(q1, q2, q3, q4, q5)``: three select a move inside a
plane and two select the plane.  All coordinates are kept in *doubled* lattice
units so every move is an integer vector: face diagonals such as ``(1, 1, 0)``
and axis moves such as ``(0, 0, 2)``.

Bit layout of a full bitstring: qubit 0 is the leftmost character and turn
``t`` occupies characters ``5t .. 5t+4`` in the order ``q1 .. q5``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

BITS_PER_TURN = 5

# Ordered turn states (q1, q2, q3) = 000, 001, ..., 111.
TURN_STATES = [tuple((s >> k) & 1 for k in (2, 1, 0)) for s in range(8)]

# In-plane steps (undoubled lattice units) for the eight turn states.
DELTA_A = np.array([0.5, 0.5, -0.5, -0.5, 0.0, 0.0, 0.0, 0.0])
DELTA_B = np.array([0.5, -0.5, 0.5, -0.5, 1.0, 0.0, 0.0, -1.0])

# Rows: turn states in TURN_STATES order.  Columns: monomials in BASIS_MONOMIALS.
BASIS_MATRIX = np.array(
    [
        [1, 0, 0, 0, 0, 0, 0, 0],
        [1, 0, 0, 1, 0, 0, 0, 0],
        [1, 0, 1, 0, 0, 0, 0, 0],
        [1, 0, 1, 1, 0, 1, 0, 0],
        [1, 1, 0, 0, 0, 0, 0, 0],
        [1, 1, 0, 1, 0, 0, 1, 0],
        [1, 1, 1, 0, 1, 0, 0, 0],
        [1, 1, 1, 1, 1, 1, 1, 1],
    ],
    dtype=float,
)
# Monomials over (q1, q2, q3) as 0-based index tuples, one per BASIS_MATRIX column.
BASIS_MONOMIALS = [(), (0,), (1,), (2,), (0, 1), (1, 2), (0, 2), (0, 1, 2)]


@dataclass(frozen=True)
class TurnBasis:
    """Multilinear basis for the in-plane step functions of one turn."""

    basis: np.ndarray
    coeff_a: np.ndarray
    coeff_b: np.ndarray

    @classmethod
    def solve(cls) -> "TurnBasis":
        return cls(
            basis=BASIS_MATRIX.copy(),
            coeff_a=np.linalg.solve(BASIS_MATRIX, DELTA_A),
            coeff_b=np.linalg.solve(BASIS_MATRIX, DELTA_B),
        )


@dataclass(frozen=True)
class TurnBits:
    q1: int
    q2: int
    q3: int
    q4: int
    q5: int

    def __post_init__(self):
        for name in ("q1", "q2", "q3", "q4", "q5"):
            if getattr(self, name) not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1, got {getattr(self, name)!r}")

    @classmethod
    def from_seq(cls, bits: Sequence[int] | str) -> "TurnBits":
        if isinstance(bits, str):
            bits = [int(c) for c in bits]
        if len(bits) != BITS_PER_TURN:
            raise ValueError(f"a turn has {BITS_PER_TURN} bits, got {len(bits)}")
        return cls(*(int(b) for b in bits))

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.q1, self.q2, self.q3, self.q4, self.q5)


def step_a(q1: int, q2: int) -> float:
    return 0.5 - 0.5 * q1 - q2 + q1 * q2


def step_b(q1: int, q2: int, q3: int) -> float:
    return 0.5 + 0.5 * q1 - q3 - q1 * q2


def decode_turn(bits: TurnBits | Sequence[int] | str) -> tuple[int, int, int]:
    """Displacement of one turn in doubled lattice units."""
    if not isinstance(bits, TurnBits):
        bits = TurnBits.from_seq(bits)
    q1, q2, q3, q4, q5 = bits.as_tuple()
    a = step_a(q1, q2)
    b = step_b(q1, q2, q3)
    xy = q4 * q5
    yz = (1 - q4) * q5
    zx = q4 * (1 - q5)
    x = xy * a + zx * b
    y = yz * a + xy * b
    z = zx * a + yz * b
    return (int(round(2 * x)), int(round(2 * y)), int(round(2 * z)))


def _as_bit_list(bits) -> list[int]:
    if isinstance(bits, str):
        s = "".join(bits.split())
        if set(s) - {"0", "1"}:
            raise ValueError(f"bitstring may only contain 0 and 1: {bits!r}")
        return [int(c) for c in s]
    return [int(b) for b in bits]


def num_qubits(n_beads: int) -> int:
    return BITS_PER_TURN * (n_beads - 1)


@dataclass(frozen=True)
class LatticeConformation:
    positions: tuple[tuple[int, int, int], ...]
    source_bits: str | None = None

    def __len__(self):
        return len(self.positions)

    @property
    def turns(self) -> list[tuple[int, int, int]]:
        p = self.positions
        return [tuple(b - a for a, b in zip(p[i], p[i + 1])) for i in range(len(p) - 1)]

    def as_array(self) -> np.ndarray:
        return np.array(self.positions, dtype=np.int64).reshape(len(self.positions), 3)


def decode_conformation(bits, n_beads: int | None = None) -> LatticeConformation:
    """Decode a full bitstring into bead positions anchored at the origin."""
    b = _as_bit_list(bits)
    if n_beads is None:
        if len(b) % BITS_PER_TURN or not b:
            raise ValueError(
                f"bitstring length {len(b)} is not a positive multiple of {BITS_PER_TURN}"
            )
        n_beads = len(b) // BITS_PER_TURN + 1
    if n_beads < 2:
        raise ValueError(f"need at least 2 beads, got {n_beads}")
    expected = num_qubits(n_beads)
    if len(b) != expected:
        raise ValueError(
            f"bitstring length mismatch: expected {expected} bits for {n_beads} beads, "
            f"got {len(b)}"
        )
    pos = [(0, 0, 0)]
    for t in range(n_beads - 1):
        d = decode_turn(b[BITS_PER_TURN * t: BITS_PER_TURN * (t + 1)])
        x, y, z = pos[-1]
        pos.append((x + d[0], y + d[1], z + d[2]))
    return LatticeConformation(tuple(pos), "".join(map(str, b)))


def enumerate_turn_table() -> dict[tuple[int, ...], tuple[int, int, int]]:
    """All 32 five-bit patterns mapped to their displacements."""
    table = {}
    for s in range(32):
        bits = tuple((s >> k) & 1 for k in (4, 3, 2, 1, 0))
        table[bits] = decode_turn(bits)
    return table


def neighbor_moves() -> list[tuple[int, int, int]]:
    """The 18 nonzero moves, in first-appearance order of the turn table."""
    seen = []
    for d in enumerate_turn_table().values():
        if d != (0, 0, 0) and d not in seen:
            seen.append(d)
    return seen


def encode_move(move: Sequence[int]) -> str:
    """First 5-bit pattern (table order) producing ``move``."""
    move = tuple(int(v) for v in move)
    for bits, d in enumerate_turn_table().items():
        if d == move:
            return "".join(map(str, bits))
    raise ValueError(f"{move} is not an FCC lattice move")


def encode_conformation(conf: LatticeConformation) -> str:
    return "".join(encode_move(t) for t in conf.turns)
