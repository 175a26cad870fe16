"""Simulated annealing and exhaustive search over binary polynomials."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CapabilityError
from .polynomial import (
    BinaryPolynomial,
    all_energies,
    evaluate,
    evaluate_many,
    index_to_bitstring,
    truncate_to_quadratic,
)

log = logging.getLogger(__name__)

BRUTE_FORCE_CAP = 25


@dataclass(frozen=True)
class Sample:
    bitstring: str
    energy: float
    count: int = 1
    source: str = ""


@dataclass
class SampleSet:
    records: list[Sample] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @classmethod
    def from_counts(cls, counts: dict[str, int], energy_of, source: str) -> "SampleSet":
        recs = [Sample(b, float(energy_of(b)), int(c), source) for b, c in counts.items()]
        return cls(sorted(recs, key=lambda r: (r.energy, r.bitstring)))

    def best(self) -> Sample:
        if not self.records:
            raise ValueError("empty sample set")
        return min(self.records, key=lambda r: (r.energy, r.bitstring))

    def merged(self, other: "SampleSet") -> "SampleSet":
        acc: dict[str, Sample] = {}
        for r in list(self) + list(other):
            if r.bitstring in acc:
                prev = acc[r.bitstring]
                acc[r.bitstring] = Sample(r.bitstring, prev.energy, prev.count + r.count, prev.source)
            else:
                acc[r.bitstring] = r
        return SampleSet(sorted(acc.values(), key=lambda r: (r.energy, r.bitstring)))

    @property
    def total_count(self) -> int:
        return sum(r.count for r in self.records)


@dataclass(frozen=True)
class AnnealSchedule:
    t_start: float
    t_end: float
    sweeps: int = 2000
    restarts: int = 20
    seed: int = 0

    def __post_init__(self):
        if not (self.t_start >= self.t_end > 0):
            raise ValueError(
                f"need t_start >= t_end > 0, got t_start={self.t_start}, t_end={self.t_end}"
            )
        if self.sweeps < 1 or self.restarts < 1:
            raise ValueError("sweeps and restarts must be >= 1")

    @classmethod
    def default_for(cls, poly: BinaryPolynomial, **kw) -> "AnnealSchedule":
        hi = poly.max_abs_coefficient() or 1.0
        lo = poly.min_abs_coefficient() or hi
        return cls(t_start=kw.pop("t_start", None) or 10.0 * hi,
                   t_end=kw.pop("t_end", None) or 1e-3 * lo, **kw)

    def betas(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([1.0 / self.t_start])
        frac = np.arange(self.sweeps) / (self.sweeps - 1)
        return 1.0 / (self.t_start * (self.t_end / self.t_start) ** frac)


@dataclass(frozen=True)
class CompiledPolynomial:
    """Flat array form of a polynomial for the annealing kernels."""

    num_vars: int
    constant: float
    term_offsets: np.ndarray
    term_vars: np.ndarray
    coeffs: np.ndarray
    var_offsets: np.ndarray
    var_terms: np.ndarray

    @classmethod
    def from_polynomial(cls, poly: BinaryPolynomial) -> "CompiledPolynomial":
        items = [(k, c) for k, c in poly.sorted_items() if k]
        offsets = np.zeros(len(items) + 1, dtype=np.int64)
        tv = []
        incident: list[list[int]] = [[] for _ in range(poly.num_vars)]
        for t, (mono, _) in enumerate(items):
            tv.extend(mono)
            offsets[t + 1] = len(tv)
            for v in mono:
                incident[v].append(t)
        voff = np.zeros(poly.num_vars + 1, dtype=np.int64)
        voff[1:] = np.cumsum([len(x) for x in incident])
        return cls(
            poly.num_vars,
            poly.constant_term(),
            offsets,
            np.array(tv, dtype=np.int32),
            np.array([c for _, c in items], dtype=np.float64),
            voff,
            np.array([t for x in incident for t in x], dtype=np.int32),
        )


def _restart_streams(schedule: AnnealSchedule, restart: int, n: int):
    rng = np.random.default_rng([schedule.seed, restart])
    init = rng.integers(0, 2, size=n).astype(np.int8)
    order = rng.permuted(np.tile(np.arange(n, dtype=np.int32), (schedule.sweeps, 1)), axis=1)
    uniforms = rng.random((schedule.sweeps, n))
    return init, np.ascontiguousarray(order, dtype=np.int32), uniforms


def simulated_annealing(
    poly: BinaryPolynomial,
    schedule: AnnealSchedule | None = None,
    quadratic: bool = False,
    kernel=None,
    debug: bool = False,
    keep_trace: float = 0.0,
) -> SampleSet:
    """Best-of-restart bitstrings from geometric-cooling Metropolis annealing.

    With ``quadratic=True`` the search runs on the quadratic truncation of
    ``poly``; reported energies always come from the full ``poly``.
    ``debug=True`` runs the pure-Python kernel and checks every incremental
    energy update against a full re-evaluation.  ``keep_trace`` in (0, 1]
    additionally returns the distinct end-of-sweep states from that final
    fraction of each restart, tagged ``<source>-trace``.
    """
    if poly.num_vars == 0 or not len(poly):
        raise ValueError("cannot anneal an empty polynomial")
    if not 0.0 <= keep_trace <= 1.0:
        raise ValueError(f"keep_trace must lie in [0, 1], got {keep_trace}")
    schedule = schedule or AnnealSchedule.default_for(poly)
    target = truncate_to_quadratic(poly) if quadratic else poly
    comp = CompiledPolynomial.from_polynomial(target)
    if debug:
        kernel = kernels.python_anneal
    run = kernel or kernels.anneal
    betas = schedule.betas()
    n = poly.num_vars
    tag = "sa-quadratic" if quadratic else "sa"
    first_kept = schedule.sweeps - max(1, int(round(keep_trace * schedule.sweeps)))
    counts: dict[str, int] = {}
    trace_counts: dict[str, int] = {}
    for r in range(schedule.restarts):
        init, order, uniforms = _restart_streams(schedule, r, n)
        state = init.copy()
        trace = np.zeros((schedule.sweeps, n), dtype=np.int8) if keep_trace else None
        args = (comp.term_offsets, comp.term_vars, comp.coeffs, comp.var_offsets,
                comp.var_terms, state, order, uniforms, betas, trace)
        if debug:
            e0 = evaluate(target, init)

            def check(st, cur, e0=e0):
                full = evaluate(target, st)
                if abs(full - (e0 + cur)) > 1e-9 * max(1.0, abs(full)):
                    raise AssertionError(f"incremental energy {e0 + cur} != full {full}")

            best_state, _ = run(*args, check=check)
        else:
            best_state, _ = run(*args)
        bits = "".join("1" if b else "0" for b in np.asarray(best_state))
        counts[bits] = counts.get(bits, 0) + 1
        if trace is not None:
            for row in np.unique(trace[first_kept:], axis=0):
                key = "".join("1" if b else "0" for b in row)
                trace_counts[key] = trace_counts.get(key, 0) + 1
    samples = SampleSet.from_counts(counts, lambda b: evaluate(poly, b), tag)
    if trace_counts:
        extra = {b: c for b, c in trace_counts.items() if b not in counts}
        keys = list(extra)
        mat = np.array([[c == "1" for c in b] for b in keys], dtype=bool).reshape(len(keys), n)
        energy = dict(zip(keys, evaluate_many(poly, mat).tolist()))
        traced = SampleSet.from_counts(extra, energy.__getitem__, tag + "-trace")
        samples = SampleSet(sorted(list(samples) + list(traced),
                                   key=lambda r: (r.energy, r.bitstring)))
    return samples


def brute_force(poly: BinaryPolynomial, cap: int = BRUTE_FORCE_CAP) -> tuple[str, float]:
    """Exact minimiser; ties go to the lexicographically smallest bitstring."""
    n = poly.num_vars
    if n > cap:
        raise CapabilityError(
            f"brute force limited to {cap} variables, polynomial has {n}"
        )
    if n == 0:
        return "", poly.constant_term()
    energies = all_energies(poly)
    e_min = energies.min()
    tol = 1e-9 * max(1.0, abs(e_min))
    candidates = np.flatnonzero(energies <= e_min + tol)
    best = min(index_to_bitstring(int(i), n) for i in candidates)
    return best, evaluate(poly, best)
