"""Command-line interface: build, solve, decode, analyze, pipeline.

Exit status: 0 success, 2 usage error, 3 data error, 4 capability error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import CartesianStructure
from .errors import CapabilityError, DataError
from .formats import (
    RunManifest,
    atomic_write,
    file_digest,
    parse_mj_table,
    parse_pdb_ca,
    parse_sequence,
    read_samples,
    write_pauli,
    write_samples,
)
from .hamiltonian import PenaltyFactors, build_hamiltonian
from .polynomial import BinaryPolynomial
from .quantum import AnsatzConfig, VqeConfig, to_pauli, vqe_minimize
from .solvers import AnnealSchedule, SampleSet, brute_force, simulated_annealing
from .workflow import analyze, decode_samples, warn_if_extended

log = logging.getLogger("fccfold")

MJ_ENV = "FCCFOLD_MJ"
EXIT_USAGE, EXIT_DATA, EXIT_CAPABILITY = 2, 3, 4


def _add_build_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("problem")
    g.add_argument("--sequence", help="one-letter residue sequence")
    g.add_argument("--mj", help=f"contact table CSV (default: ${MJ_ENV})")
    g.add_argument("--mj-sign", choices=("negated", "literal"), default="negated",
                   help="objective weight = -table (negated, default) or +table")
    g.add_argument("--seed", type=int, default=0, help="axis-selector seed")
    g.add_argument("--lambda1", type=float)
    g.add_argument("--lambda2", type=float)
    g.add_argument("--lambda3", type=float)
    g.add_argument("--strict-continuity", action="store_true",
                   help="penalise only turns that do not move")


def _add_sa_args(p, keep_trace=0.0):
    g = p.add_argument_group("annealing")
    g.add_argument("--quadratic", action="store_true", help="anneal the quadratic truncation")
    g.add_argument("--sweeps", type=int, default=2000)
    g.add_argument("--restarts", type=int, default=20)
    g.add_argument("--sa-seed", type=int, default=0)
    g.add_argument("--t-start", type=float)
    g.add_argument("--t-end", type=float)
    g.add_argument("--keep-trace", type=float, default=keep_trace,
                   help="also keep end-of-sweep states from this final fraction of each restart")


def _add_vqe_args(p):
    g = p.add_argument_group("vqe")
    g.add_argument("--shots", type=int, default=4000)
    g.add_argument("--cvar-alpha", type=float, default=0.1)
    g.add_argument("--max-iter", type=int, default=500)
    g.add_argument("--layers", type=int, default=1)
    g.add_argument("--entanglement", choices=("linear", "circular"), default="linear")
    g.add_argument("--optimizer", default="Nelder-Mead")
    g.add_argument("--vqe-seed", type=int, default=0)
    g.add_argument("--resume-from-params", help="JSON file with a starting parameter vector")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fccfold", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build the binary polynomial and manifest")
    _add_build_args(p)
    p.add_argument("--pauli", action="store_true", help="also export the Pauli-Z Hamiltonian")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("solve", help="find low-energy bitstrings")
    p.add_argument("method", choices=("sa", "brute", "vqe"))
    _add_build_args(p)
    p.add_argument("--from", dest="from_dir", help="directory written by 'build'")
    p.add_argument("--cap", type=int, default=25, help="brute-force variable cap")
    _add_sa_args(p)
    _add_vqe_args(p)
    p.add_argument("--out", default=".")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("decode", help="bitstrings to lattice and Angstrom structures")
    p.add_argument("--samples", required=True)
    p.add_argument("--sequence")
    p.add_argument("--mj")
    p.add_argument("--top", type=int, default=0, help="decode only the first N samples")
    p.add_argument("--out", default=".")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("analyze", help="metrics, free-energy surface, representatives")
    p.add_argument("--samples", required=True)
    p.add_argument("--sequence", required=True)
    p.add_argument("--mj")
    p.add_argument("--reference", help="PDB file with the experimental structure")
    p.add_argument("--chain")
    p.add_argument("--model", type=int)
    p.add_argument("--ref-start", type=int,
                   help="1-based CA position where the sequence starts in the reference")
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--out", default=".")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("pipeline", help="build, solve, decode and analyze in one go")
    _add_build_args(p)
    p.add_argument("--solver", choices=("sa", "brute", "vqe"), default="sa")
    p.add_argument("--cap", type=int, default=25)
    _add_sa_args(p, keep_trace=1.0)
    _add_vqe_args(p)
    p.add_argument("--reference")
    p.add_argument("--chain")
    p.add_argument("--model", type=int)
    p.add_argument("--ref-start", type=int)
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--out", default=".")
    p.add_argument("--json", action="store_true")
    return parser


def _load_mj(path):
    path = path or os.environ.get(MJ_ENV)
    if not path:
        raise DataError(f"no contact table given (use --mj or set {MJ_ENV})")
    if not Path(path).is_file():
        raise DataError(f"contact table not found: {path}")
    return parse_mj_table(Path(path)), file_digest(path)


def _build(args):
    if not args.sequence:
        raise DataError("--sequence is required")
    seq = parse_sequence(args.sequence)
    mj, digest = _load_mj(args.mj)
    penalties = None
    if len(seq) < 3:
        log.warning("sequence of %d residues has no non-adjacent pairs; objective is empty", len(seq))
        penalties = PenaltyFactors(1.0, args.lambda1 if args.lambda1 is not None else 1.0,
                                   args.lambda2 or 0.0, args.lambda3 or 0.0, 0.0, len(seq) - 1.0, 0.0)
    h = build_hamiltonian(seq, mj, args.mj_sign, args.seed, args.strict_continuity,
                          args.lambda1, args.lambda2, args.lambda3, penalties=penalties)
    manifest = RunManifest(
        sequence=seq, mj_digest=digest, sign=args.mj_sign, axis_seed=args.seed,
        lambdas=h.penalties.as_dict(), num_qubits=h.num_vars,
        strict_continuity=args.strict_continuity, quadratic=getattr(args, "quadratic", False),
    )
    return h, manifest, mj


def _emit(args, payload: dict, name: str):
    out = Path(args.out)
    atomic_write(out / name, json.dumps(payload, indent=2, default=_jsonable) + "\n")
    if args.json:
        print(json.dumps(payload, indent=2, default=_jsonable))


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def cmd_build(args) -> int:
    h, manifest, _ = _build(args)
    out = Path(args.out)
    atomic_write(out / "polynomial.json", h.polynomial.to_json() + "\n")
    atomic_write(out / "manifest.json", manifest.to_json())
    summary = {"sequence": h.sequence, "num_qubits": h.num_vars,
               "num_terms": len(h.polynomial), "objective_terms": len(h.objective),
               "penalties": h.penalties.as_dict(), "manifest_digest": manifest.digest()}
    if args.pauli:
        H = to_pauli(h.polynomial, 1e-12)
        write_pauli(out / "hamiltonian.pauli", H, {
            "sequence": h.sequence, "axis_seed": args.seed,
            "lambdas": h.penalties.as_dict(), "mj_digest": manifest.mj_digest})
        summary["pauli_terms"] = len(H)
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        print(f"{h.sequence}: {h.num_vars} qubits, {len(h.polynomial)} terms -> {out}")
    return 0


def _problem(args):
    if getattr(args, "from_dir", None):
        d = Path(args.from_dir)
        try:
            poly = BinaryPolynomial.from_json((d / "polynomial.json").read_text())
            manifest = RunManifest.from_json((d / "manifest.json").read_text())
        except (OSError, KeyError, ValueError) as exc:
            raise DataError(f"cannot read build output in {d}: {exc}") from None
        return poly, manifest
    h, manifest, _ = _build(args)
    return h.polynomial, manifest


def _solve(method, poly, manifest, args) -> SampleSet:
    if method == "brute":
        bits, energy = brute_force(poly, args.cap)
        return SampleSet.from_counts({bits: 1}, lambda b: energy, "brute")
    if method == "sa":
        manifest.seeds["sa"] = args.sa_seed
        manifest.quadratic = args.quadratic
        sched = AnnealSchedule.default_for(
            poly, t_start=args.t_start, t_end=args.t_end, sweeps=args.sweeps,
            restarts=args.restarts, seed=args.sa_seed)
        return simulated_annealing(poly, sched, quadratic=args.quadratic,
                                   keep_trace=args.keep_trace)
    manifest.seeds["vqe"] = args.vqe_seed
    theta0 = None
    if args.resume_from_params:
        try:
            theta0 = np.array(json.loads(Path(args.resume_from_params).read_text())["theta"])
        except (OSError, KeyError, ValueError) as exc:
            raise DataError(f"cannot read parameters: {exc}") from None
    H = to_pauli(poly, 1e-12)
    ansatz = AnsatzConfig(poly.num_vars, args.layers, args.entanglement)
    res = vqe_minimize(H, ansatz, VqeConfig(args.shots, args.cvar_alpha, args.max_iter,
                                            args.optimizer, args.vqe_seed, theta0))
    atomic_write(Path(args.out) / "vqe_params.json", json.dumps(
        {"theta": res.theta.tolist(), "energy": res.energy, "iterations": res.iterations,
         "trace": res.trace, "message": res.optimizer_message}, indent=1) + "\n")
    return res.samples


def cmd_solve(args) -> int:
    poly, manifest = _problem(args)
    samples = _solve(args.method, poly, manifest, args)
    out = Path(args.out)
    atomic_write(out / "manifest.json", manifest.to_json())
    write_samples(out / "samples.txt", samples,
                  {"manifest": manifest.digest(), "sequence": manifest.sequence,
                   "method": args.method})
    best = samples.best()
    payload = {"method": args.method, "num_samples": len(samples),
               "best": {"bitstring": best.bitstring, "energy": best.energy}}
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(f"best {best.bitstring} energy {best.energy!r} ({len(samples)} distinct samples)")
    return 0


def cmd_decode(args) -> int:
    samples, header = read_samples(args.samples)
    if not len(samples):
        raise DataError("sample file is empty")
    seq = parse_sequence(args.sequence or header.get("sequence", ""))
    mj = _load_mj(args.mj)[0] if (args.mj or os.environ.get(MJ_ENV)) else None
    recs = list(samples)[: args.top] if args.top else list(samples)
    decoded = decode_samples(SampleSet(recs), len(seq), seq, mj)
    _emit(args, {"sequence": seq, "structures": [d.as_dict() for d in decoded]},
          "structures.json")
    return 0


def _reference(args, n):
    if not args.reference:
        return None
    ref = parse_pdb_ca(Path(args.reference), args.chain, args.model)
    if args.ref_start is not None:
        lo = args.ref_start - 1
        if lo < 0 or lo + n > len(ref):
            raise DataError(f"window of {n} residues from CA {args.ref_start} exceeds the "
                            f"{len(ref)} CA atoms of the reference")
        ref = CartesianStructure(ref.coords[lo:lo + n])
    if len(ref) != n:
        raise DataError(f"reference has {len(ref)} CA atoms, sequence {n} residues "
                        "(use --ref-start to pick a window)")
    return ref


def _analyze(args, samples, seq, mj) -> dict:
    ref = _reference(args, len(seq))
    report, grid = analyze(samples, seq, mj, ref, args.bins)
    if grid is not None:
        atomic_write(Path(args.out) / "fes.csv", grid.to_csv())
    if report["num_kept"] == 0:
        log.warning("no sample is violation-free or repairable")
    return report


def cmd_analyze(args) -> int:
    samples, _ = read_samples(args.samples)
    seq = parse_sequence(args.sequence)
    mj, _ = _load_mj(args.mj)
    _emit(args, _analyze(args, samples, seq, mj), "report.json")
    return 0


def cmd_pipeline(args) -> int:
    h, manifest, mj = _build(args)
    out = Path(args.out)
    atomic_write(out / "polynomial.json", h.polynomial.to_json() + "\n")
    samples = _solve(args.solver, h.polynomial, manifest, args)
    atomic_write(out / "manifest.json", manifest.to_json())
    write_samples(out / "samples.txt", samples,
                  {"manifest": manifest.digest(), "sequence": h.sequence, "method": args.solver})
    warn_if_extended(decode_samples(SampleSet([samples.best()]), h.n_beads)[0].conformation)
    report = _analyze(args, samples, h.sequence, mj)
    report["manifest"] = json.loads(manifest.to_json())
    report["solver"] = args.solver
    _emit(args, report, "report.json")
    if not args.json:
        best = report.get("best")
        if best is None:
            print("no violation-free structure among the samples")
        else:
            msg = f"best {best['bitstring']} energy {best['energy']!r}"
            if "rmsd" in best:
                msg += f" RMSD {best['rmsd']:.3f} A"
            print(msg)
    return 0


COMMANDS = {"build": cmd_build, "solve": cmd_solve, "decode": cmd_decode,
            "analyze": cmd_analyze, "pipeline": cmd_pipeline}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (DataError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
