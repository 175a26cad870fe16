"""Parsers and writers for sequences, contact tables, PDB CA traces, samples and Pauli exports."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import CartesianStructure
from .errors import DataError
from .hamiltonian import STANDARD_RESIDUES, MJTable
from .quantum import PauliHamiltonian
from .solvers import Sample, SampleSet


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file in the same directory and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_sequence(text: str) -> str:
    seq = "".join(text.split()).upper()
    if not seq:
        raise DataError("empty sequence")
    for i, ch in enumerate(seq):
        if ch not in STANDARD_RESIDUES:
            raise DataError(f"unknown residue code {ch!r} at position {i + 1}")
    return seq


def _read_text(source) -> str:
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                     and os.path.exists(source)):
        return Path(source).read_text()
    return source


def parse_mj_table(source) -> MJTable:
    """Read a 20x20 contact table from CSV (file path or text).

    The first row and first column hold one-letter residue codes.  The body
    may be full (checked for symmetry to 1e-9) or lower-triangular, in which
    case cells above the diagonal are left empty and are mirrored.
    """
    rows = [r for r in csv.reader(io.StringIO(_read_text(source))) if any(c.strip() for c in r)]
    rows = [r for r in rows if not r[0].lstrip().startswith("#")]
    if len(rows) < 2:
        raise DataError("contact table needs a header row and at least one body row")
    header = [c.strip().upper() for c in rows[0][1:]]
    while header and not header[-1]:
        header.pop()
    labels = [r[0].strip().upper() for r in rows[1:]]
    for codes, where in ((header, "header row"), (labels, "header column")):
        missing = [r for r in STANDARD_RESIDUES if r not in codes]
        if missing:
            raise DataError(f"contact table {where} is missing residue(s): {', '.join(missing)}")
        extra = [c for c in codes if c not in STANDARD_RESIDUES]
        if extra:
            raise DataError(f"contact table {where} has unknown code(s): {', '.join(extra)}")
        if len(set(codes)) != len(codes):
            raise DataError(f"contact table {where} repeats a residue")
    n = len(header)
    vals = np.full((n, n), np.nan)
    col = {c: j for j, c in enumerate(header)}
    for lineno, row in enumerate(rows[1:], start=2):
        i = col[row[0].strip().upper()]
        for j, cell in enumerate(row[1:n + 1]):
            cell = cell.strip()
            if not cell:
                continue
            try:
                vals[i, j] = float(cell)
            except ValueError:
                raise DataError(f"non-numeric cell {cell!r} at row {lineno}, column {j + 2}") from None
    lower = np.tril_indices(n)
    upper_empty = np.all(np.isnan(vals[np.triu_indices(n, 1)]))
    if upper_empty:
        if np.any(np.isnan(vals[lower])):
            raise DataError("lower-triangular contact table has empty cells")
        vals = np.where(np.isnan(vals), vals.T, vals)
    else:
        if np.any(np.isnan(vals)):
            raise DataError("contact table has empty cells")
        if np.max(np.abs(vals - vals.T)) > 1e-9:
            i, j = np.unravel_index(np.argmax(np.abs(vals - vals.T)), vals.shape)
            raise DataError(
                f"contact table is not symmetric: {header[i]}-{header[j]}={vals[i, j]} "
                f"but {header[j]}-{header[i]}={vals[j, i]}"
            )
        vals = 0.5 * (vals + vals.T)
    return MJTable(tuple(header), vals)


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def parse_pdb_ca(source, chain: str | None = None, model: int | None = None) -> CartesianStructure:
    """CA coordinates of one chain of one model, ordered by residue number.

    Defaults to the first model and the first chain encountered.  Only
    alternate locations ``' '`` and ``'A'`` are read.  Gaps in residue
    numbering are rejected.
    """
    text = _read_text(source)
    current_model = None
    seen_model = False
    chosen_chain = chain
    atoms: dict[int, tuple[float, float, float]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        rec = line[:6]
        if rec == "MODEL ":
            try:
                current_model = int(line[10:14])
            except ValueError:
                current_model = (current_model or 0) + 1
            if seen_model and model is None:
                break
            seen_model = True
            continue
        if rec == "ENDMDL" and model is None and seen_model:
            break
        if rec != "ATOM  ":
            continue
        if len(line) < 54:
            raise DataError(f"truncated ATOM record at line {lineno}")
        if model is not None and current_model != model:
            continue
        if line[12:16].strip() != "CA" or line[16] not in (" ", "A"):
            continue
        ch = line[21]
        if chosen_chain is None:
            chosen_chain = ch
        if ch != chosen_chain:
            continue
        try:
            resseq = int(line[22:26])
            xyz = (float(line[30:38]), float(line[38:46]), float(line[46:54]))
        except ValueError:
            raise DataError(f"malformed ATOM record at line {lineno}") from None
        atoms.setdefault(resseq, xyz)
    if not atoms:
        raise DataError("no CA atoms found")
    nums = sorted(atoms)
    gaps = [b for a, b in zip(nums, nums[1:]) if b != a + 1]
    if gaps:
        raise DataError(f"gap in residue numbering before residue {gaps[0]}")
    return CartesianStructure(np.array([atoms[k] for k in nums]))


# --- sample files -------------------------------------------------------------------

def write_samples(path, samples: SampleSet, header: dict | None = None) -> None:
    lines = ["# fccfold samples: bitstring count energy (qubit 0 leftmost)"]
    for k, v in (header or {}).items():
        lines.append(f"# {k}: {v}")
    for r in samples:
        lines.append(f"{r.bitstring} {r.count} {r.energy!r}")
    atomic_write(path, "\n".join(lines) + "\n")


def read_samples(path) -> tuple[SampleSet, dict]:
    header: dict[str, str] = {}
    recs = []
    width = None
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            if ":" in s:
                k, v = s[1:].split(":", 1)
                header[k.strip()] = v.strip()
            continue
        parts = s.split()
        if len(parts) < 3 or set(parts[0]) - {"0", "1"}:
            raise DataError(f"malformed sample line {lineno}: {line!r}")
        if width is None:
            width = len(parts[0])
        elif len(parts[0]) != width:
            raise DataError(f"bitstring length changes at line {lineno}")
        try:
            recs.append(Sample(parts[0], float(parts[2]), int(parts[1]),
                               parts[3] if len(parts) > 3 else ""))
        except ValueError:
            raise DataError(f"malformed sample line {lineno}: {line!r}") from None
    return SampleSet(recs), header


# --- Pauli export -------------------------------------------------------------------

def format_pauli(H: PauliHamiltonian) -> str:
    out = []
    for mask, c in H.sorted_terms():
        out.append(f"{'+' if c >= 0 else '-'}{abs(c)!r} {PauliHamiltonian.label(mask)}")
    return "\n".join(out) + "\n"


def parse_pauli(text: str, num_qubits: int) -> PauliHamiltonian:
    terms: dict[int, float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            coef, label = s.split()
            c = float(coef)
            mask = 0
            if label != "I":
                for q in label.split("Z")[1:]:
                    mask |= 1 << int(q)
        except ValueError:
            raise DataError(f"malformed Pauli term at line {lineno}: {line!r}") from None
        terms[mask] = terms.get(mask, 0.0) + c
    return PauliHamiltonian(num_qubits, terms)


def write_pauli(path, H: PauliHamiltonian, provenance: dict) -> None:
    path = Path(path)
    atomic_write(path, format_pauli(H))
    sidecar = {"num_qubits": H.num_qubits, "num_terms": len(H), **provenance}
    atomic_write(path.with_suffix(path.suffix + ".json"), json.dumps(sidecar, indent=2) + "\n")


# --- manifest -----------------------------------------------------------------------

@dataclass
class RunManifest:
    sequence: str
    mj_digest: str
    sign: str
    axis_seed: int
    lambdas: dict
    num_qubits: int
    strict_continuity: bool = False
    quadratic: bool = False
    seeds: dict = field(default_factory=dict)
    version: str = __version__

    def __post_init__(self):
        if self.num_qubits != 5 * (len(self.sequence) - 1):
            raise DataError(
                f"qubit count {self.num_qubits} inconsistent with {len(self.sequence)} residues"
            )

    def to_json(self) -> str:
        d = asdict(self)
        d["lambdas"] = {k: (None if isinstance(v, float) and math.isnan(v) else v)
                        for k, v in d["lambdas"].items()}
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        d = json.loads(text)
        return cls(**d)

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]
