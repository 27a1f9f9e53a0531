from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oddindex.clifford import (
    blade_sign,
    build_algebra,
    multiply,
    spin_rep,
    symbol,
    symbol_apply,
    trace_spin_via_symbol,
    unit_form,
)
from oddindex.errors import InvalidArgumentError, PreconditionError


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_generator_relations(n):
    alg = build_algebra(n)
    eye = np.eye(alg.spin_dim)
    for i, a in enumerate(alg.generator_reps):
        assert np.allclose(a.conj().T @ a, eye, atol=1e-14)
        assert np.allclose(a.conj().T, -a, atol=1e-14)
        for j, b in enumerate(alg.generator_reps):
            expected = -2 * eye if i == j else 0 * eye
            assert np.max(np.abs(a @ b + b @ a - expected)) < 1e-14


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11])
def test_chirality_is_identity(n):
    alg = build_algebra(n)
    assert alg.spin_dim == 2 ** ((n - 1) // 2)
    assert np.allclose(spin_rep(alg.chirality()), np.eye(alg.spin_dim))


@pytest.mark.parametrize("n", [2, 1, 13, 4])
def test_bad_dimension(n):
    with pytest.raises(InvalidArgumentError):
        build_algebra(n)


def test_small_products():
    alg = build_algebra(3)
    c1, c2, c3 = (alg.generator(i) for i in (1, 2, 3))
    assert (c1 * c1).allclose(alg.scalar(-1))
    assert (c2 * c1).allclose(-(c1 * c2))
    assert multiply(c1 * c2, c2 * c3).allclose(-(c1 * c3))
    assert np.allclose(spin_rep(c1 * c2 * c3), -np.eye(2))
    assert np.allclose(spin_rep(alg.scalar(1)), np.eye(2))


def test_mismatched_algebras():
    with pytest.raises(InvalidArgumentError):
        multiply(build_algebra(3).generator(1), build_algebra(5).generator(1))


def test_blade_sign_matches_matrices():
    alg = build_algebra(5)
    for a in range(32):
        for b in range(32):
            lhs = alg.monomial_rep(a) @ alg.monomial_rep(b)
            assert np.allclose(lhs, blade_sign(a, b) * alg.monomial_rep(a ^ b))


@pytest.mark.parametrize("n", [3, 5, 7])
def test_representations_are_multiplicative(n):
    alg = build_algebra(n)
    rng = np.random.default_rng(n)
    for _ in range(5):
        a, b = alg.random_element(rng, False), alg.random_element(rng, False)
        assert np.max(np.abs(spin_rep(a * b) - spin_rep(a) @ spin_rep(b))) < 1e-12 * 2**n
        assert np.max(np.abs(symbol(a * b).matrix - symbol(a).matrix @ symbol(b).matrix)) < 1e-12 * 4**n


def test_multiplication_associative_and_bilinear():
    alg = build_algebra(5)
    rng = np.random.default_rng(4)
    a, b, c = (alg.random_element(rng, False) for _ in range(3))
    assert ((a * b) * c).allclose(a * (b * c), atol=1e-12 * 50)
    assert (a * (b + c * 2.5)).allclose(a * b + (a * c) * 2.5, atol=1e-12 * 50)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_chirality_central(n):
    alg = build_algebra(n)
    G, Gs = spin_rep(alg.chirality()), symbol(alg.chirality()).matrix
    for i in range(1, n + 1):
        c = alg.generator(i)
        assert np.allclose(G @ spin_rep(c), spin_rep(c) @ G)
        assert np.allclose(Gs @ symbol(c).matrix, symbol(c).matrix @ Gs)


def test_symbol_examples():
    alg = build_algebra(5)
    one = unit_form(5)
    out = symbol_apply(alg.generator(1), one)
    assert out[0b1] == 1 and np.count_nonzero(out) == 1
    top = symbol_apply(alg.monomial(*range(1, 6)), one)
    assert top[alg.top_mask] == 1 and np.count_nonzero(top) == 1
    assert np.allclose(symbol(alg.scalar(2.5)).matrix, 2.5 * np.eye(32))
    for i in range(1, 6):
        s = symbol(alg.generator(i)).matrix
        assert np.allclose(s @ s, -np.eye(32))


def test_symbol_of_monomial_gives_basis_form():
    alg = build_algebra(7)
    one = unit_form(7)
    for mask in range(1, 128, 7):
        idx = [i + 1 for i in range(7) if mask >> i & 1]
        out = symbol_apply(alg.monomial(*idx), one)
        assert out[mask] == 1 and np.count_nonzero(out) == 1


def test_trace_examples():
    alg = build_algebra(3)
    assert abs(trace_spin_via_symbol(alg.generator(1))) < 1e-14
    assert abs(trace_spin_via_symbol(alg.monomial(1, 2, 3)) - (-2)) < 1e-14
    assert abs(trace_spin_via_symbol(alg.monomial(1, 2))) < 1e-14


def test_trace_rejects_scalar_part():
    alg = build_algebra(3)
    with pytest.raises(PreconditionError):
        trace_spin_via_symbol(alg.scalar(1) + alg.generator(2))


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_trace_formula_random(n):
    alg = build_algebra(n)
    rng = np.random.default_rng(100 + n)
    for _ in range(200 if n < 9 else 40):
        a = alg.random_element(rng)
        assert abs(trace_spin_via_symbol(a) - np.trace(spin_rep(a))) < 1e-10


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(1, 5), min_size=1), st.complex_numbers(max_magnitude=10, allow_nan=False))
def test_trace_formula_monomials(indices, coeff):
    alg = build_algebra(5)
    a = alg.monomial(*sorted(indices), coeff=coeff)
    assert abs(trace_spin_via_symbol(a) - np.trace(spin_rep(a))) < 1e-10 * max(1, abs(coeff))
