import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fccfold.polynomial import (
    BinaryPolynomial,
    all_energies,
    bitstring_to_index,
    evaluate,
    evaluate_many,
    index_to_bitstring,
    truncate_to_quadratic,
)


@st.composite
def polynomials(draw, max_vars=6):
    n = draw(st.integers(1, max_vars))
    keys = draw(st.lists(st.lists(st.integers(0, n - 1), max_size=4), max_size=12))
    coefs = draw(st.lists(st.floats(-5, 5, allow_nan=False), min_size=len(keys),
                          max_size=len(keys)))
    return BinaryPolynomial(n, dict(zip(map(tuple, keys), coefs)))


def brute_eval(terms, bits):
    return sum(c * all(bits[i] for i in m) for m, c in terms.items())


def test_evaluate_examples():
    assert evaluate(BinaryPolynomial(3), "101") == 0.0
    assert evaluate(BinaryPolynomial(3, {(): 3.5}), "010") == 3.5
    assert evaluate(BinaryPolynomial(3, {(0, 1): 2}), "110") == 2.0


def test_truncate_examples():
    p = BinaryPolynomial(3, {(0, 1): 1.5, (2,): -1, (): 2})
    assert truncate_to_quadratic(p) == p
    q = BinaryPolynomial(3, {(0, 1, 2): 5, (0,): 1})
    assert truncate_to_quadratic(q) == BinaryPolynomial(3, {(0,): 1})


def test_multilinear_reduction():
    x = BinaryPolynomial.variable(2, 0)
    assert x * x == x
    p = BinaryPolynomial(2, {(1, 0, 1): 2.0})
    assert p.terms == {(0, 1): 2.0}


def test_zero_coefficients_pruned():
    p = BinaryPolynomial(2, {(0,): 1.0}) - BinaryPolynomial(2, {(0,): 1.0})
    assert len(p) == 0


def test_out_of_range_term():
    with pytest.raises(ValueError):
        BinaryPolynomial(2, {(2,): 1.0})


def test_bit_length_checked():
    with pytest.raises(ValueError, match="2 variables, got 3"):
        evaluate(BinaryPolynomial(2, {(0,): 1}), "101")


@given(polynomials(), polynomials())
def test_arithmetic_matches_pointwise(p, q):
    n = max(p.num_vars, q.num_vars)
    p, q = BinaryPolynomial(n, p.terms), BinaryPolynomial(n, q.terms)
    for bits in itertools.product((0, 1), repeat=n):
        ep, eq = evaluate(p, bits), evaluate(q, bits)
        assert evaluate(p + q, bits) == pytest.approx(ep + eq, abs=1e-9)
        assert evaluate(p * q, bits) == pytest.approx(ep * eq, abs=1e-9)
        assert evaluate(2.5 * p - q, bits) == pytest.approx(2.5 * ep - eq, abs=1e-9)


@given(polynomials())
def test_all_energies_and_evaluate_many(p):
    n = p.num_vars
    rows = np.array(list(itertools.product((0, 1), repeat=n)))[:, ::-1]
    direct = [brute_eval(p.terms, r) for r in rows]
    assert np.allclose(all_energies(p), direct, atol=1e-9)
    assert np.allclose(evaluate_many(p, rows), direct, atol=1e-9)


@given(st.integers(1, 6), st.data())
def test_truth_table_interpolation(n, data):
    vals = data.draw(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1 << n,
                              max_size=1 << n))
    p = BinaryPolynomial.from_truth_table(n, range(n), vals)
    for s in range(1 << n):
        assert evaluate(p, index_to_bitstring(s, n)) == pytest.approx(vals[s], abs=1e-9)


@given(st.integers(0, 255))
def test_index_bitstring_round_trip(i):
    assert bitstring_to_index(index_to_bitstring(i, 8)) == i


@settings(max_examples=30)
@given(polynomials())
def test_json_round_trip(p):
    assert BinaryPolynomial.from_json(p.to_json()) == p
