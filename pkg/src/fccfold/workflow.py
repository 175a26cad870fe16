"""Batch decoding and analysis of solver samples."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .analysis import (
    CartesianStructure,
    RepairRejected,
    build_fes,
    contact_energy,
    detect_violations,
    kabsch_rmsd,
    radius_of_gyration,
    repair,
    select_representatives,
    to_angstrom,
)
from .hamiltonian import MJTable
from .lattice import LatticeConformation, decode_conformation
from .solvers import SampleSet

log = logging.getLogger(__name__)


@dataclass
class DecodedSample:
    bitstring: str
    energy: float
    count: int
    conformation: LatticeConformation
    violations: dict
    repaired: bool = False
    structure: CartesianStructure | None = None
    contact_energy: float | None = None
    rg: float | None = None
    rejected: str | None = None

    @property
    def coords(self):
        return None if self.structure is None else self.structure.coords

    def as_dict(self, coords: bool = True) -> dict:
        d = {
            "bitstring": self.bitstring,
            "energy": self.energy,
            "count": self.count,
            "lattice": [list(p) for p in self.conformation.positions],
            "violations": self.violations,
            "repaired": self.repaired,
            "rejected": self.rejected,
            "contact_energy": self.contact_energy,
            "rg": self.rg,
        }
        if coords and self.structure is not None:
            d["coords"] = self.structure.coords.round(6).tolist()
        return d


def decode_sample(bitstring: str, energy: float, count: int, n_beads: int,
                  sequence: str | None = None, mj: MJTable | None = None) -> DecodedSample:
    conf = decode_conformation(bitstring, n_beads)
    report = detect_violations(conf)
    out = DecodedSample(bitstring, energy, count, conf, report.as_dict())
    fixed = conf
    if report.total or report.degenerate_turns:
        try:
            fixed = repair(conf, report, sequence, mj)
            out.repaired = fixed is not conf
        except RepairRejected as exc:
            out.rejected = exc.reason
            return out
        if detect_violations(fixed).degenerate_turns:
            out.rejected = "degenerate turn"
            return out
    out.conformation = fixed
    out.structure = to_angstrom(fixed)
    out.rg = radius_of_gyration(out.structure)
    if sequence is not None and mj is not None:
        out.contact_energy = contact_energy(out.structure, sequence, mj)
    return out


def decode_samples(samples: SampleSet, n_beads: int, sequence=None, mj=None) -> list[DecodedSample]:
    return [decode_sample(r.bitstring, r.energy, r.count, n_beads, sequence, mj) for r in samples]


def warn_if_extended(conf: LatticeConformation) -> bool:
    """Log a warning when ``conf`` is a fully stretched chain."""
    p = conf.as_array()
    reach = float(np.sum((p[-1] - p[0]) ** 2))
    if reach == float((2 * (len(p) - 1)) ** 2):
        log.warning("lowest-energy sample is a fully extended chain; the separation "
                    "rewards may dominate the objective")
        return True
    return False


def analyze(samples: SampleSet, sequence: str, mj: MJTable, reference=None,
            bins: int = 30) -> tuple[dict, object]:
    """Decode, filter/repair, and build the contact-energy/Rg landscape.

    Returns a JSON-ready report and the :class:`FESGrid` (``None`` when no
    sample survives filtering).
    """
    n = len(sequence)
    decoded = decode_samples(samples, n, sequence, mj)
    kept = [d for d in decoded if d.structure is not None]
    report: dict = {
        "sequence": sequence,
        "num_samples": len(decoded),
        "num_kept": len(kept),
        "num_rejected": len(decoded) - len(kept),
        "num_repaired": sum(d.repaired for d in kept),
    }
    if kept:
        warn_if_extended(decoded[0].conformation)
        # a repaired structure no longer matches its bitstring's energy
        best = min(kept, key=lambda d: (d.repaired, d.energy, d.bitstring))
        entry = best.as_dict()
        if reference is not None:
            entry["rmsd"] = kabsch_rmsd(best.structure, reference)
        report["best"] = entry
    grid = None
    if kept:
        grid = build_fes([(d.contact_energy, d.rg, d) for d in kept], bins,
                         weights=[d.count for d in kept])
        rep = select_representatives(grid, reference)
        report["fes"] = {
            "bins": list(grid.counts.shape),
            "min_bin": list(rep.bin),
            "min_bin_population": int(grid.counts[rep.bin]),
            "min_bin_members": [d.bitstring for d in rep.structures],
            "min_rmsd": rep.min_rmsd,
            "mean_rmsd": rep.mean_rmsd,
            "min_rmsd_bitstring": getattr(rep.min_rmsd_structure, "bitstring", None),
        }
    return report, grid
