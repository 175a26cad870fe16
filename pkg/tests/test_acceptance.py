"""Acceptance gate: one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v -s`` to see the lines inline; they
are also collected in the terminal summary.  Criterion 9 needs user data:
``FCCFOLD_MJ`` (a genuine Miyazawa-Jernigan table in the CSV schema of the
README) and ``FCCFOLD_4TUT_PDB`` (the 4TUT entry); ``FCCFOLD_4TUT_START`` and
``FCCFOLD_4TUT_CHAIN`` optionally pick the CA window and chain.
"""
import json
import math
import os
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from conftest import ACCEPTANCE, DATA
from fccfold.analysis import (
    build_fes,
    contact_energy,
    detect_violations,
    kabsch_rmsd,
    radius_of_gyration,
    to_angstrom,
)
from fccfold.cli import main
from fccfold.formats import file_digest
from fccfold.hamiltonian import build_hamiltonian
from fccfold.lattice import LatticeConformation, enumerate_turn_table, neighbor_moves, num_qubits
from fccfold.polynomial import evaluate, evaluate_many
from fccfold.quantum import AnsatzConfig, VqeConfig, pauli_term_count, to_pauli, vqe_minimize
from fccfold.solvers import AnnealSchedule, brute_force, simulated_annealing

import geometry_oracle as geo

# measured with to_pauli on GYMLGSWT[:N], axis seed 0, synthetic table
PAULI_COUNTS = {3: 105, 4: 366, 5: 715, 6: 1166, 7: 1720, 8: 2377}


@contextmanager
def criterion(k, title):
    info = {"detail": ""}
    status = "FAIL"
    try:
        yield info
        status = "PASS"
    except pytest.skip.Exception as exc:
        status = "SKIP"
        info["detail"] = str(exc)
        raise
    finally:
        line = f"{title}: {info['detail']}"
        ACCEPTANCE[k] = (status, line)
        print(f"\ncriterion {k}: {status} {line}")


def test_criterion_01_turn_table():
    with criterion(1, "turn table") as c:
        best = min(_timed(enumerate_turn_table) for _ in range(5))
        table = enumerate_turn_table()
        nonzero = {d for d in table.values() if d != (0, 0, 0)}
        zeros = sum(d == (0, 0, 0) for d in table.values())
        diag = sum(sorted(map(abs, d)) == [0, 1, 1] for d in nonzero)
        axis = sum(sorted(map(abs, d)) == [0, 0, 2] for d in nonzero)
        c["detail"] = (f"{len(nonzero)} distinct nonzero ({diag} diagonal, {axis} axis), "
                       f"{zeros} zero, {best * 1e3:.3f} ms")
        assert len(table) == 32 and len(nonzero) == 18 and zeros == 14
        assert (diag, axis) == (12, 6)
        assert best < 1e-3


def _timed(fn):
    t = time.perf_counter()
    fn()
    return time.perf_counter() - t


def test_criterion_02_qubit_count():
    with criterion(2, "qubit count") as c:
        counts = {n: num_qubits(n) for n in range(2, 21)}
        c["detail"] = f"N=10 -> {counts[10]}"
        assert all(v == 5 * (n - 1) for n, v in counts.items())
        assert counts[10] == 45
        assert build_hamiltonian("DRVYIHPFHL", _mj()).num_vars == 45


def _mj():
    from fccfold.formats import parse_mj_table
    return parse_mj_table(DATA / "synthetic_mj.csv")


def test_criterion_03_oracle_equivalence():
    with criterion(3, "polynomial vs geometry") as c:
        mj = _mj()
        t0 = time.perf_counter()
        worst = 0.0
        for seq in ("GYM", "GYML"):
            h = build_hamiltonian(seq, mj, seed=0)
            bits = geo.all_bit_rows(h.num_vars)
            want = geo.assembled(bits, seq, mj, h.selectors, h.penalties)
            got = evaluate_many(h.polynomial, bits)
            worst = max(worst, float(np.abs(got - want).max()))
            # scalar path on a spread of states
            for i in range(0, len(bits), 97):
                worst = max(worst, abs(evaluate(h.polynomial, bits[i]) - want[i]))
        dt = time.perf_counter() - t0
        c["detail"] = f"2^10 and 2^15 states, max |diff| {worst:.2e}, {dt:.1f} s"
        assert worst <= 1e-9 and dt < 60


def test_criterion_04_pauli_equivalence():
    with criterion(4, "Pauli diagonal") as c:
        mj = _mj()
        t0 = time.perf_counter()
        h3 = build_hamiltonian("GYM", mj, seed=0)
        H3 = to_pauli(h3.polynomial)
        bits = geo.all_bit_rows(10)
        strings = ["".join(map(str, r)) for r in bits]
        d3 = max(abs(H3.expectation(s) - evaluate(h3.polynomial, s)) for s in strings)
        d3 = max(d3, float(np.abs(H3.diagonal() - evaluate_many(h3.polynomial, bits)).max()))
        h6 = build_hamiltonian("GGYMLG", mj, seed=0)
        H6 = to_pauli(h6.polynomial)
        rng = np.random.default_rng(2024)
        sample = rng.integers(0, 2, (1000, h6.num_vars))
        d6 = max(abs(H6.expectation("".join(map(str, r))) - evaluate(h6.polynomial, r))
                 for r in sample)
        dt = time.perf_counter() - t0
        c["detail"] = f"N=3 all 1024 max {d3:.2e}; N=6 1000 random max {d6:.2e}; {dt:.1f} s"
        assert d3 <= 1e-9 and d6 <= 1e-9 and dt < 60


def test_criterion_05_pauli_scaling():
    with criterion(5, "Pauli term scaling") as c:
        mj = _mj()
        ns = sorted(PAULI_COUNTS)
        counts = [pauli_term_count(build_hamiltonian("GYMLGSWT"[:n], mj, seed=0).polynomial)
                  for n in ns]
        fit = np.polyfit(ns, counts, 2)
        resid = np.array(counts) - np.polyval(fit, ns)
        r2 = 1 - (resid ** 2).sum() / ((np.array(counts) - np.mean(counts)) ** 2).sum()
        c["detail"] = f"counts {dict(zip(ns, counts))}, quadratic R^2 {r2:.6f}"
        assert dict(zip(ns, counts)) == PAULI_COUNTS
        assert r2 >= 0.99


def test_criterion_06_sa_vs_brute_force():
    with criterion(6, "SA vs brute force (N=4)") as c:
        mj = _mj()
        t0 = time.perf_counter()
        hits = 0
        for seed in range(5):
            h = build_hamiltonian("GYML", mj, seed=seed)
            _, e_min = brute_force(h.polynomial)
            sched = AnnealSchedule.default_for(h.polynomial, restarts=20, seed=seed)
            best = simulated_annealing(h.polynomial, sched).best().energy
            hits += abs(best - e_min) <= 1e-9 * max(1.0, abs(e_min))
        dt = time.perf_counter() - t0
        c["detail"] = f"{hits}/5 seeds at the optimum, {dt:.1f} s"
        assert hits == 5 and dt < 120


def test_criterion_07_vqe_ground_state():
    with criterion(7, "CVaR-VQE (N=3, alpha 0.1, 4000 shots)") as c:
        mj = _mj()
        h = build_hamiltonian("GYM", mj, seed=0)
        _, e_min = brute_force(h.polynomial)
        H = to_pauli(h.polynomial, 1e-12)
        t0 = time.perf_counter()
        hits, iters = 0, []
        for seed in range(5):
            res = vqe_minimize(H, AnsatzConfig(10, 1),
                               VqeConfig(shots=4000, cvar_alpha=0.1, max_iterations=500, seed=seed))
            iters.append(res.iterations)
            hits += abs(res.samples.best().energy - e_min) <= 1e-9
        dt = time.perf_counter() - t0
        c["detail"] = f"{hits}/5 seeds sampled an optimal bitstring, iterations {iters}, {dt:.1f} s"
        assert hits >= 4 and max(iters) <= 500 and dt < 600


def test_criterion_08_geometry():
    with criterion(8, "geometry properties") as c:
        rng = np.random.default_rng(8)
        drift = 0.0
        for i in range(200):
            x = rng.normal(scale=5, size=(int(rng.integers(3, 12)), 3))
            rot = Rotation.random(random_state=i).as_matrix()
            drift = max(drift, kabsch_rmsd(x @ rot.T + rng.normal(scale=20, size=3), x))
        moves = neighbor_moves()
        bond_err = cos_err = 0.0
        for _ in range(200):
            pos = [(0, 0, 0)]
            for m in rng.integers(0, 18, int(rng.integers(2, 10))):
                pos.append(tuple(a + b for a, b in zip(pos[-1], moves[m])))
            conf = LatticeConformation(tuple(pos))
            s = to_angstrom(conf)
            steps = np.diff(s.coords, axis=0)
            lat = np.diff(conf.as_array().astype(float), axis=0)
            bond_err = max(bond_err, float(np.abs(np.linalg.norm(steps, axis=1) - 3.8).max()))
            for a, b, u, v in zip(lat, lat[1:], steps, steps[1:]):
                ca = a @ b / np.linalg.norm(a) / np.linalg.norm(b)
                cu = u @ v / np.linalg.norm(u) / np.linalg.norm(v)
                cos_err = max(cos_err, abs(ca - cu))
        line = np.array([[0, 0, 0], [3.8, 0, 0], [7.6, 0, 0]])
        rg_ok = (radius_of_gyration(np.zeros((1, 3))) == 0.0
                 and abs(radius_of_gyration(line[:2]) - 1.9) <= 1e-12
                 and abs(radius_of_gyration(line) - math.sqrt(2 * 3.8 ** 2 / 3)) <= 1e-12)
        mj = _mj()
        line5 = np.array([[3.8 * i, 0, 0] for i in range(5)])
        ce_ok = (contact_energy(line, "GYM", mj) == mj("G", "M")
                 and abs(contact_energy(line5, "GYMLW", mj)
                         - (mj("G", "M") + mj("Y", "L") + mj("M", "W"))) <= 1e-12
                 and contact_energy(np.array([[0, 0, 0], [3.8, 0, 0], [9, 0, 0]]), "GYM", mj) == 0)
        c["detail"] = (f"rigid-motion RMSD {drift:.1e}, bond error {bond_err:.1e}, "
                       f"cosine error {cos_err:.1e}, Rg examples {rg_ok}, contact examples {ce_ok}")
        assert drift <= 1e-9 and bond_err <= 1e-6 and cos_err <= 1e-12 and rg_ok and ce_ok


def test_criterion_09_end_to_end(tmp_path):
    with criterion(9, "GGYMLG pipeline vs 4TUT") as c:
        mj_path = os.environ.get("FCCFOLD_MJ")
        pdb = os.environ.get("FCCFOLD_4TUT_PDB")
        if not mj_path or not pdb:
            pytest.skip("needs a genuine contact table (FCCFOLD_MJ) and the 4TUT entry "
                        "(FCCFOLD_4TUT_PDB); neither ships with the package")
        if file_digest(mj_path) == file_digest(DATA / "synthetic_mj.csv"):
            pytest.skip("FCCFOLD_MJ points at the synthetic test table")
        argv = ["pipeline", "--sequence", "GGYMLG", "--mj", mj_path, "--reference", pdb,
                "--out", str(tmp_path)]
        if os.environ.get("FCCFOLD_4TUT_START"):
            argv += ["--ref-start", os.environ["FCCFOLD_4TUT_START"]]
        if os.environ.get("FCCFOLD_4TUT_CHAIN"):
            argv += ["--chain", os.environ["FCCFOLD_4TUT_CHAIN"]]
        t0 = time.perf_counter()
        rc = main(argv)
        dt = time.perf_counter() - t0
        assert rc == 0, f"pipeline exit status {rc}"
        report = json.loads((tmp_path / "report.json").read_text())
        best = report.get("best")
        assert best is not None, "no violation-free structure"
        c["detail"] = (f"lowest-energy valid structure RMSD {best['rmsd']:.3f} A "
                       f"(repaired={best['repaired']}), min-bin min RMSD "
                       f"{report['fes']['min_rmsd']:.3f} A, {dt:.0f} s")
        # kept structures are violation-free, either as decoded or after repair
        assert best["rejected"] is None and best["rmsd"] <= 4.5 and dt < 600


def test_criterion_10_fes():
    with criterion(10, "free-energy surface") as c:
        rng = np.random.default_rng(10)
        lowest = math.inf
        nonneg = True
        for _ in range(50):
            n = int(rng.integers(1, 300))
            pts = [(float(e), float(r), i) for i, (e, r) in
                   enumerate(zip(rng.normal(-5, 2, n), rng.uniform(2, 8, n)))]
            g = build_fes(pts, 30)
            lowest = min(lowest, float(g.free_energy.min()))
            nonneg &= bool(np.all(g.free_energy >= 0)) and g.free_energy.min() == 0.0
        g = build_fes([(-3.0, 5.0, "a")] * 90 + [(0.0, 8.0, "b")] * 10, bins=2)
        pair = (float(g.free_energy[0, 0]), float(g.free_energy[1, 1]))
        c["detail"] = f"min F {lowest}, all non-negative {nonneg}, (90,10) -> {pair}"
        assert nonneg and lowest == 0.0
        assert pair[0] == 0.0 and abs(pair[1] - math.log(9)) <= 1e-12
