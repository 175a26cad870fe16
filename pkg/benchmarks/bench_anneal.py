"""Time the compiled annealing kernel against the pure-Python one.

    python3 benchmarks/bench_anneal.py [--sequences GYML GGYMLG ...] [--sweeps 500]

Both kernels consume the same pre-drawn random streams, so the sample sets
must agree exactly; the script aborts if they do not.
"""
import argparse
import time
from pathlib import Path

from fccfold import kernels
from fccfold.formats import parse_mj_table
from fccfold.hamiltonian import build_hamiltonian
from fccfold.solvers import AnnealSchedule, simulated_annealing

MJ = Path(__file__).resolve().parents[1] / "tests" / "data" / "synthetic_mj.csv"


def timed(poly, sched, kernel):
    t = time.perf_counter()
    out = simulated_annealing(poly, sched, kernel=kernel)
    return time.perf_counter() - t, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sequences", nargs="+", default=["GYML", "GGYMLG", "GGYMLGSW"])
    ap.add_argument("--sweeps", type=int, default=500)
    ap.add_argument("--restarts", type=int, default=4)
    args = ap.parse_args()
    if kernels.compiled_anneal is None:
        raise SystemExit("compiled kernel not built (or FCCFOLD_PURE_PYTHON set)")
    mj = parse_mj_table(MJ)
    print(f"{'sequence':10s} {'vars':>5s} {'terms':>6s} {'compiled s':>11s} "
          f"{'python s':>9s} {'speedup':>8s}")
    for seq in args.sequences:
        poly = build_hamiltonian(seq, mj, seed=0).polynomial
        sched = AnnealSchedule.default_for(poly, sweeps=args.sweeps, restarts=args.restarts, seed=0)
        tc, fast = timed(poly, sched, kernels.compiled_anneal)
        tp, slow = timed(poly, sched, kernels.python_anneal)
        if [(r.bitstring, r.count) for r in fast] != [(r.bitstring, r.count) for r in slow]:
            raise SystemExit(f"{seq}: kernels disagree")
        print(f"{seq:10s} {poly.num_vars:5d} {len(poly):6d} {tc:11.3f} {tp:9.3f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
