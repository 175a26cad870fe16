"""Structure analysis: violations, repair, Angstrom scaling, RMSD, Rg, contact energy, FES."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .hamiltonian import MJTable
from .lattice import LatticeConformation, neighbor_moves

BOND_LENGTH = 3.8
CONTACT_CUTOFF = 8.0


@dataclass(frozen=True)
class ViolationReport:
    overlaps: tuple[tuple[int, int], ...] = ()
    crossings: tuple[tuple[int, int], ...] = ()
    degenerate_turns: tuple[int, ...] = ()

    @property
    def total(self) -> int:
        return len(self.overlaps) + len(self.crossings)

    @property
    def clean(self) -> bool:
        return self.total == 0 and not self.degenerate_turns

    def as_dict(self) -> dict:
        return {
            "overlaps": [list(p) for p in self.overlaps],
            "crossings": [list(p) for p in self.crossings],
            "degenerate_turns": list(self.degenerate_turns),
        }


def detect_violations(conf: LatticeConformation) -> ViolationReport:
    """Exact integer checks for coincident beads and coincident bond midpoints."""
    pos = conf.positions
    n = len(pos)
    overlaps = tuple((i, j) for i in range(n) for j in range(i + 1, n) if pos[i] == pos[j])
    # doubled midpoints, kept integer
    mids = [tuple(a + b for a, b in zip(pos[i], pos[i + 1])) for i in range(n - 1)]
    crossings = tuple(
        (r, k) for r in range(n - 1) for k in range(r + 2, n - 1) if mids[r] == mids[k]
    )
    degenerate = tuple(i for i in range(n - 1) if pos[i] == pos[i + 1])
    return ViolationReport(overlaps, crossings, degenerate)


class RepairRejected(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def repair(conf: LatticeConformation, report: ViolationReport | None = None,
           sequence: str | None = None, mj: MJTable | None = None) -> LatticeConformation:
    """Fix a single violation by moving one bead to a free neighbouring site.

    Candidate sites for bead ``i`` are lattice neighbours of both bead ``i-1``
    and bead ``i+1`` that are not occupied.  Among candidates that leave no
    violation at all, the one with the lowest contact energy wins (needs
    ``sequence`` and ``mj``; otherwise the first in enumeration order).
    Raises :class:`RepairRejected` when there is more than one violation or
    no candidate works.
    """
    report = report or detect_violations(conf)
    if report.total == 0:
        return conf
    if report.total > 1:
        raise RepairRejected(f"{report.total} violations; only one can be repaired")
    if report.overlaps:
        i, j = report.overlaps[0]
        movable = [j, i]
    else:
        r, k = report.crossings[0]
        movable = [k + 1, k, r + 1, r]
    pos = list(conf.positions)
    n = len(pos)
    moves = neighbor_moves()
    best, best_e = None, math.inf
    for b in movable:
        anchors = [pos[a] for a in (b - 1, b + 1) if 0 <= a < n]
        base = anchors[0]
        for mv in moves:
            site = (base[0] + mv[0], base[1] + mv[1], base[2] + mv[2])
            if site in pos:
                continue
            if any(tuple(s - a for s, a in zip(site, other)) not in moves for other in anchors[1:]):
                continue
            trial = pos.copy()
            trial[b] = site
            cand = LatticeConformation(tuple(trial), conf.source_bits)
            if detect_violations(cand).total or detect_violations(cand).degenerate_turns:
                continue
            e = 0.0
            if sequence is not None and mj is not None:
                e = contact_energy(to_angstrom(cand), sequence, mj)
            if e < best_e:
                best, best_e = cand, e
    if best is None:
        raise RepairRejected("no free neighbouring site removes the violation")
    if best.positions[0] != (0, 0, 0):
        shift = best.positions[0]
        best = LatticeConformation(
            tuple(tuple(c - s for c, s in zip(p, shift)) for p in best.positions),
            conf.source_bits,
        )
    return best


@dataclass(frozen=True)
class CartesianStructure:
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 2 or c.shape[1] != 3:
            raise ValueError(f"coordinates must have shape (N, 3), got {c.shape}")
        object.__setattr__(self, "coords", c)

    def __len__(self):
        return self.coords.shape[0]


def to_angstrom(conf: LatticeConformation, bond: float = BOND_LENGTH) -> CartesianStructure:
    steps = np.diff(conf.as_array().astype(float), axis=0)
    norms = np.linalg.norm(steps, axis=1)
    if np.any(norms == 0):
        bad = [int(i) for i in np.flatnonzero(norms == 0)]
        raise ValueError(f"zero-length turn(s) at {bad} cannot be scaled")
    coords = np.vstack([np.zeros(3), np.cumsum(bond * steps / norms[:, None], axis=0)])
    return CartesianStructure(coords)


def kabsch_rmsd(model, reference) -> float:
    """RMSD after optimal proper rotation and translation of ``model`` onto ``reference``.

    For degenerate (e.g. collinear) inputs the SVD still returns a valid
    proper rotation; the minimum RMSD is unaffected by which one it picks.
    """
    p = np.asarray(getattr(model, "coords", model), dtype=float)
    q = np.asarray(getattr(reference, "coords", reference), dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"bead count mismatch: {p.shape[0]} vs {q.shape[0]}")
    if p.shape[0] < 3:
        raise ValueError("need at least 3 beads for superposition")
    p = p - p.mean(axis=0)
    q = q - q.mean(axis=0)
    u, _, vt = np.linalg.svd(p.T @ q)
    d = np.sign(np.linalg.det(u @ vt)) or 1.0
    rot = u @ np.diag([1.0, 1.0, d]) @ vt
    diff = p @ rot - q
    return float(np.sqrt((diff * diff).sum() / p.shape[0]))


def radius_of_gyration(s) -> float:
    c = np.asarray(getattr(s, "coords", s), dtype=float)
    return float(np.sqrt(((c - c.mean(axis=0)) ** 2).sum(axis=1).mean()))


def contact_energy(s, sequence: str, mj: MJTable, cutoff: float = CONTACT_CUTOFF) -> float:
    """Sum of literal contact-table entries over non-adjacent pairs closer than ``cutoff``."""
    c = np.asarray(getattr(s, "coords", s), dtype=float)
    n = c.shape[0]
    if len(sequence) != n:
        raise ValueError(f"sequence has {len(sequence)} residues, structure {n} beads")
    total = 0.0
    for j in range(n - 2):
        d = np.linalg.norm(c[j + 2:] - c[j], axis=1)
        for off in np.flatnonzero(d < cutoff):
            total += mj(sequence[j], sequence[j + 2 + off])
    return total


# --- free-energy surface -------------------------------------------------------------

@dataclass
class FESGrid:
    energy_edges: np.ndarray
    rg_edges: np.ndarray
    counts: np.ndarray
    free_energy: np.ndarray
    members: dict[tuple[int, int], list[Any]] = field(default_factory=dict)

    def minimum_bin(self) -> tuple[int, int]:
        """Most populated bin; ties go to the lower contact-energy bin, then lower Rg."""
        top = self.counts.max()
        cand = np.argwhere(self.counts == top)
        i, j = min(map(tuple, cand))
        return int(i), int(j)

    def to_csv(self) -> str:
        lines = ["# energy_lo,energy_hi,rg_lo,rg_hi,count,free_energy"]
        for i in range(self.counts.shape[0]):
            for j in range(self.counts.shape[1]):
                e0, e1 = map(float, self.energy_edges[i:i + 2])
                r0, r1 = map(float, self.rg_edges[j:j + 2])
                f = float(self.free_energy[i, j])
                lines.append(f"{e0!r},{e1!r},{r0!r},{r1!r},{int(self.counts[i, j])},"
                             f"{'inf' if math.isinf(f) else repr(f)}")
        return "\n".join(lines) + "\n"


def _edges(values: np.ndarray, bins: int) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo
    pad = 0.01 * span if span > 0 else 0.5
    return np.linspace(lo - pad, hi + pad, bins + 1)


def _bin_index(v: np.ndarray, edges: np.ndarray) -> np.ndarray:
    bins = len(edges) - 1
    idx = np.floor((v - edges[0]) / (edges[-1] - edges[0]) * bins).astype(int)
    return np.clip(idx, 0, bins - 1)


def build_fes(samples: Sequence[tuple[float, float, Any]], bins: int | tuple[int, int] = 30,
              weights: Sequence[int] | None = None) -> FESGrid:
    """2D histogram over (contact energy, Rg) with ``F = -ln(n / n_max)`` (kT = 1).

    ``weights`` gives an integer population per sample (e.g. shot counts);
    each sample is still listed once among its bin's members.
    """
    if not len(samples):
        raise ValueError("need at least one sample")
    if weights is None:
        weights = [1] * len(samples)
    elif len(weights) != len(samples):
        raise ValueError("weights and samples differ in length")
    nb = (bins, bins) if isinstance(bins, int) else tuple(bins)
    e = np.array([s[0] for s in samples], dtype=float)
    rg = np.array([s[1] for s in samples], dtype=float)
    ee, re = _edges(e, nb[0]), _edges(rg, nb[1])
    ie, ir = _bin_index(e, ee), _bin_index(rg, re)
    counts = np.zeros(nb, dtype=np.int64)
    members: dict[tuple[int, int], list[Any]] = {}
    for a, b, s, w in zip(ie, ir, samples, weights):
        counts[a, b] += int(w)
        members.setdefault((int(a), int(b)), []).append(s[2])
    with np.errstate(divide="ignore"):
        free = -np.log(counts / counts.max())
    free[counts == 0] = np.inf
    free[counts == counts.max()] = 0.0
    return FESGrid(ee, re, counts, free, members)


@dataclass
class Representatives:
    bin: tuple[int, int]
    structures: list[Any]
    min_rmsd_structure: Any = None
    min_rmsd: float | None = None
    mean_rmsd: float | None = None


def select_representatives(grid: FESGrid, reference=None) -> Representatives:
    """Members of the minimum-free-energy bin, plus RMSD statistics against ``reference``."""
    b = grid.minimum_bin()
    members = list(grid.members.get(b, []))
    rep = Representatives(b, members)
    if reference is not None and members:
        rmsds = [kabsch_rmsd(m, reference) for m in members]
        k = int(np.argmin(rmsds))
        rep.min_rmsd_structure = members[k]
        rep.min_rmsd = float(rmsds[k])
        rep.mean_rmsd = float(np.mean(rmsds))
    return rep
