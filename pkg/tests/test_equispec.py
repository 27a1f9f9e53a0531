from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oddindex.circle import CircleModel, MatrixLoop
from oddindex.equispec import (
    GroupAction,
    RepElement,
    character_trace,
    equivariant_eigendecompose,
    isotypic_projectors,
    mode_character,
    rep_from_traces,
)
from oddindex.errors import InvalidArgumentError, NonEquivariantOperatorError
from tests.oracles import random_equivariant


def test_projector_examples():
    (P,) = isotypic_projectors(GroupAction.trivial(3))
    assert np.allclose(P, np.eye(3))
    P0, P1 = isotypic_projectors(GroupAction(2, np.diag([1, -1])))
    assert np.allclose(P0, np.diag([1, 0])) and np.allclose(P1, np.diag([0, 1]))


def test_cyclic_permutation_projectors():
    U = np.roll(np.eye(3), 1, axis=0)
    projs = isotypic_projectors(GroupAction(3, U))
    w, v = np.linalg.eig(U)
    for P in projs:
        assert np.linalg.matrix_rank(P, tol=1e-10) == 1
        # the range is an eigenvector of U, hence a discrete Fourier vector
        x = P[:, np.argmax(np.linalg.norm(P, axis=0))]
        lam = (x.conj() @ U @ x) / (x.conj() @ x)
        assert np.allclose(U @ x, lam * x)
    assert np.allclose(sum(projs), np.eye(3))


@pytest.mark.parametrize("p", [1, 2, 3, 5])
def test_projectors_properties(p):
    rng = np.random.default_rng(p)
    _, action = random_equivariant(rng, 9, p)
    projs = action.projectors
    assert np.allclose(sum(projs), np.eye(9), atol=1e-10)
    for P in projs:
        assert np.allclose(P, P.conj().T, atol=1e-10)
        assert np.allclose(P @ P, P, atol=1e-10)
        assert np.allclose(P @ action.U, action.U @ P, atol=1e-10)


def test_action_validation():
    with pytest.raises(InvalidArgumentError):
        GroupAction(2, np.diag([1, 2]))
    with pytest.raises(InvalidArgumentError):
        GroupAction(2, np.diag([1, 1j]))
    with pytest.raises(InvalidArgumentError):
        GroupAction(0, np.eye(1))


def test_decompose_examples():
    spec = equivariant_eigendecompose(np.diag([5.0]), GroupAction.trivial(1))
    assert [(pt.value, pt.mult) for pt in spec.points] == [(5.0, (1,))]
    spec = equivariant_eigendecompose(np.eye(2), GroupAction(2, np.diag([1, -1])))
    assert len(spec.points) == 1 and spec.points[0].mult == (1, 1)


def test_circle_dirac_characters():
    model = CircleModel(MatrixLoop.monomial(0), 16, p=2)
    spec = equivariant_eigendecompose(model.dirac, model.action)
    for pt in spec.points:
        n = int(round(pt.value))
        expected = [0, 0]
        expected[n % 2] = 1
        assert list(pt.mult) == expected


def test_non_equivariant_rejected():
    D = np.array([[0, 1], [1, 0]], dtype=complex)
    with pytest.raises(NonEquivariantOperatorError):
        equivariant_eigendecompose(D, GroupAction(2, np.diag([1, -1])))


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_reconstruction_and_multiset(p):
    rng = np.random.default_rng(10 + p)
    D, action = random_equivariant(rng, 12, p)
    assert np.allclose(sum(P @ D @ P for P in action.projectors), D, atol=1e-10)
    spec = equivariant_eigendecompose(D, action)
    assert spec.dimension == 12
    assert np.allclose(np.sort(spec.eigenvalues()), np.linalg.eigvalsh(D), atol=1e-9)
    assert all(a.value < b.value for a, b in zip(spec.points, spec.points[1:]))


def test_character_trace_examples():
    assert character_trace(RepElement((1, 0)), 1) == pytest.approx(1)
    assert abs(character_trace(RepElement((-1, -1)), 1)) < 1e-15
    assert character_trace(RepElement((0, 2)), 0) == pytest.approx(2)
    with pytest.raises(InvalidArgumentError):
        character_trace(RepElement((1, 0)), 2)


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=7))
def test_character_orthogonality(coeffs):
    r = RepElement(tuple(coeffs))
    traces = [character_trace(r, h) for h in range(r.p)]
    assert rep_from_traces(traces, r.p) == r


def test_mode_character_convention():
    assert list(mode_character(np.arange(-2, 3), 3)) == [2, 1, 0, 2, 1]
    action = GroupAction.from_characters(mode_character(np.arange(-2, 3), 3), 3)
    theta = 2 * np.pi / 3
    # (r f)(x) = f(x - 2pi/p) multiplies e^{inx} by e^{-i n 2pi/p}
    assert np.allclose(np.diag(action.U), np.exp(-1j * np.arange(-2, 3) * theta))


def test_rep_arithmetic():
    a, b = RepElement((1, 2)), RepElement((0, -3))
    assert a + b == RepElement((1, -1)) and a - b == RepElement((1, 5))
    assert (-a).dimension == -3
    with pytest.raises(InvalidArgumentError):
        a + RepElement((1,))
