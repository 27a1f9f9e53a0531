from __future__ import annotations

import numpy as np
import pytest

from oddindex.circle import CircleModel, MatrixLoop, d_path
from oddindex.equispec import GroupAction, RepElement
from oddindex.errors import (
    InsufficientResolutionError,
    InvalidArgumentError,
    LevelSelectionError,
    NonConvergenceError,
)
from oddindex.specflow import (
    OperatorFamily,
    choose_level,
    homotopy_invariance_check,
    spectral_flow,
    spectral_flow_per_character,
)
from tests.oracles import random_equivariant_hermitian


def test_constant_family():
    D = np.diag([1.0, -2.0, 3.0])
    fam = OperatorFamily.linear(D, D, GroupAction.trivial(3))
    res = spectral_flow_per_character(fam)
    assert res.scalar_flow == 0 and res.equivariant_flow == RepElement((0,))
    assert res.level == 0.0


def test_choose_level_examples():
    model = CircleModel(MatrixLoop.monomial(1), 16)
    assert choose_level(d_path(model)) == -0.5
    fam = OperatorFamily.linear(np.diag([2.0, -3.0]), np.diag([5.0, -2.0]), GroupAction.trivial(2))
    assert choose_level(fam) == 0.0
    zero = OperatorFamily.linear(np.zeros((2, 2)), np.zeros((2, 2)), GroupAction.trivial(2))
    with pytest.raises(LevelSelectionError):
        choose_level(zero)


def test_level_on_endpoint_eigenvalue():
    fam = OperatorFamily.linear(np.diag([-0.5, 1.0]), np.diag([1.0, 2.0]), GroupAction.trivial(2))
    with pytest.raises(LevelSelectionError):
        spectral_flow_per_character(fam, level=-0.5)


def test_single_crossing_upward_positive():
    fam = OperatorFamily.linear(np.diag([-1.0]), np.diag([1.0]), GroupAction.trivial(1))
    res = spectral_flow(fam)
    assert res.scalar_flow == 1
    assert len(res.crossings) == 1 and res.crossings[0].count == 1
    assert res.crossings[0].u_left < 0.5 <= res.crossings[0].u_right


@pytest.mark.parametrize("k,expected", [(1, 1), (3, 3), (-2, -2)])
def test_circle_scalar_flow(k, expected):
    res = spectral_flow_per_character(d_path(CircleModel(MatrixLoop.monomial(k), 64)))
    assert res.scalar_flow == expected


def test_circle_p2_flow_per_character():
    res = spectral_flow_per_character(d_path(CircleModel(MatrixLoop.monomial(2), 64, p=2)))
    assert res.equivariant_flow == RepElement((1, 1))
    assert res.scalar_flow == sum(res.equivariant_flow)


def test_reversal_negates():
    fam = d_path(CircleModel(MatrixLoop.diagonal((3, -6)), 64, p=3))
    fwd = spectral_flow_per_character(fam, level=-0.5)
    back = spectral_flow_per_character(fam.reversed(), level=-0.5)
    assert back.equivariant_flow == -fwd.equivariant_flow


def test_additivity_under_concatenation():
    fam = d_path(CircleModel(MatrixLoop.diagonal((2, -4)), 48, p=2))
    # u = 0.5 has zero eigenvalues, so split at a generic point with a level off the spectrum
    level = -0.5
    whole = spectral_flow_per_character(fam, level).equivariant_flow
    a = spectral_flow_per_character(fam.restricted(0.0, 0.37), level).equivariant_flow
    b = spectral_flow_per_character(fam.restricted(0.37, 1.0), level).equivariant_flow
    assert a + b == whole


def test_reparametrization_invariance():
    fam = d_path(CircleModel(MatrixLoop.monomial(3), 40, p=3))
    fn = fam.refiner
    warped = OperatorFamily.from_function(lambda u: fn(u**2), fam.action)
    assert homotopy_invariance_check(fam, warped)


def test_bump_perturbation_invariance():
    model = CircleModel(MatrixLoop.monomial(2), 32, p=2)
    fam = d_path(model)
    X = random_equivariant_hermitian(np.random.default_rng(0), model.action, scale=2.0)
    bumped = OperatorFamily.from_function(lambda u: fam.refiner(u) + np.sin(np.pi * u) * X, model.action)
    assert homotopy_invariance_check(fam, bumped)


def test_different_endpoints_rejected():
    act = GroupAction.trivial(1)
    fa = OperatorFamily.linear(np.diag([-1.0]), np.diag([1.0]), act)
    fb = OperatorFamily.linear(np.diag([-1.0]), np.diag([2.0]), act)
    with pytest.raises(InvalidArgumentError):
        homotopy_invariance_check(fa, fb)


def test_coarse_samples_without_refiner():
    act = GroupAction.trivial(2)
    samples = [(0.0, np.diag([-1.0, -1.0])), (1.0, np.diag([1.0, 1.0]))]
    # a window of radius 2*|delta| always certifies a straight two-sample path
    assert spectral_flow_per_character(OperatorFamily(samples, act)).scalar_flow == 2
    twisted = [(0.0, np.diag([-1.0, 3.0])), (0.5, np.diag([-1.0, 3.0])), (1.0, np.diag([1.0, 3.0]))]
    fam = OperatorFamily(twisted, act)
    assert spectral_flow_per_character(fam).scalar_flow == 1


def test_uncertified_interval_without_refiner():
    act = GroupAction.trivial(1)
    fam = OperatorFamily([(0.0, np.diag([-1.0])), (1.0, np.diag([1.0]))], act)
    with pytest.raises(InsufficientResolutionError):
        spectral_flow_per_character(fam, level=0.0, guard_factor=0.1)


def test_bisection_refines_crossing():
    act = GroupAction.trivial(1)
    fam = OperatorFamily.from_function(lambda u: np.diag([2 * u - 0.7]), act, grid=2)
    res = spectral_flow_per_character(fam, level=0.0, guard_factor=0.2)
    assert res.scalar_flow == 1 and res.refinements > 0
    (c,) = res.crossings
    assert c.u_left <= 0.35 <= c.u_right and c.u_right - c.u_left < 0.5


def test_depth_cap_on_discontinuous_family():
    act = GroupAction.trivial(1)

    def jump(u):
        return np.diag([-1.0 if u < 0.3 else 1.0])

    fam = OperatorFamily.from_function(jump, act, grid=2)
    with pytest.raises(NonConvergenceError):
        spectral_flow_per_character(fam, level=0.0, guard_factor=0.1, max_depth=12)
    # at the default factor the endpoint difference alone certifies the count
    assert spectral_flow_per_character(fam, level=0.0).scalar_flow == 1


def test_validation():
    act = GroupAction.trivial(1)
    with pytest.raises(InvalidArgumentError):
        OperatorFamily([(0.0, np.eye(1))], act)
    with pytest.raises(InvalidArgumentError):
        OperatorFamily([(0.0, np.eye(1)), (0.9, np.eye(1))], act)
    with pytest.raises(InvalidArgumentError):
        OperatorFamily([(0.0, np.eye(1)), (0.5, np.eye(1)), (0.5, np.eye(1)), (1.0, np.eye(1))], act)
    with pytest.raises(InvalidArgumentError):
        OperatorFamily([(0.0, np.eye(2)), (1.0, np.eye(2))], act)
