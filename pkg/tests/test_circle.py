from __future__ import annotations

import json

import numpy as np
import pytest

from oddindex.circle import (
    CircleModel,
    MatrixLoop,
    d_path,
    equivariant_index,
    interior_spectrum,
    kernel_cokernel,
    load_loop,
    loop_from_json,
    p_path,
    toeplitz_compression,
    winding_number,
)
from oddindex.equispec import RepElement
from oddindex.errors import InvalidArgumentError, ResolutionError

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def twisted_loop() -> MatrixLoop:
    """diag(e^{i theta}, 1) H diag(1, e^{i theta}); not diagonalisable by a constant unitary."""
    return MatrixLoop.diagonal((1, 0)) @ MatrixLoop.constant(H) @ MatrixLoop.diagonal((0, 1))


def test_model_invariants():
    model = CircleModel(MatrixLoop.diagonal((1, -1)), 24)
    assert np.allclose(np.diag(model.dirac), np.repeat(np.arange(-24, 25), 2))
    P = model.hardy_sign
    assert np.allclose(P @ P, np.eye(model.dim)) and np.allclose(P, P.conj().T)


def test_guard_band_enforced():
    with pytest.raises(InvalidArgumentError):
        CircleModel(MatrixLoop.monomial(3), 31)
    CircleModel(MatrixLoop.monomial(3), 32)


def test_loop_must_be_unitary():
    with pytest.raises(InvalidArgumentError):
        MatrixLoop({0: np.eye(2), 1: np.eye(2)})


def test_toeplitz_examples():
    model = CircleModel(MatrixLoop.monomial(0), 16)
    assert np.allclose(toeplitz_compression(model), np.eye(17))
    T = toeplitz_compression(CircleModel(MatrixLoop.monomial(1), 16))
    assert np.allclose(T, np.eye(17, k=-1))
    V = np.array([[0, 1j], [1, 0]])
    T = toeplitz_compression(CircleModel(MatrixLoop.constant(V), 16))
    assert np.allclose(T, np.kron(np.eye(17), V))


def test_kernel_examples():
    ker, coker = kernel_cokernel(CircleModel(MatrixLoop.monomial(1), 64))
    assert ker == RepElement((0,)) and coker == RepElement((1,))
    ker, coker = kernel_cokernel(CircleModel(MatrixLoop.monomial(2), 64, p=2))
    assert ker == RepElement((0, 0)) and coker == RepElement((1, 1))
    ker, coker = kernel_cokernel(CircleModel(MatrixLoop.monomial(0), 64))
    assert ker.dimension == 0 and coker.dimension == 0


def test_index_examples():
    assert equivariant_index(CircleModel(MatrixLoop.monomial(1), 64)).dimension == -1
    assert equivariant_index(CircleModel(MatrixLoop.monomial(-2), 64)).dimension == 2
    assert equivariant_index(CircleModel(MatrixLoop.diagonal((2, -2)), 64, p=2)) == RepElement((0, 0))


def test_index_matches_winding_for_twisted_loop():
    g = twisted_loop()
    assert winding_number(g) == 2
    assert equivariant_index(CircleModel(g, 64)).dimension == -2


def test_winding_examples():
    assert winding_number(MatrixLoop.monomial(5)) == 5
    assert winding_number(MatrixLoop.diagonal((1, -2))) == -1
    assert winding_number(MatrixLoop.constant(H)) == 0
    with pytest.raises(ResolutionError):
        winding_number(MatrixLoop.monomial(40), points=16)


def test_log_derivative():
    g = twisted_loop()
    theta = np.linspace(0, 2 * np.pi, 7)
    h = 1e-6
    fd = (g(theta + h) - g(theta - h)) / (2 * h)
    assert np.allclose(g.log_derivative(theta), np.linalg.inv(g(theta)) @ fd, atol=1e-8)


def test_d_path_examples():
    k = 3
    model = CircleModel(MatrixLoop.monomial(k), 40)
    fam = d_path(model)
    assert np.array_equal(fam.start, model.dirac)
    D1 = fam.end
    modes = model.mode_of_index
    interior = np.abs(modes) <= model.Lambda - k
    assert np.allclose(np.diag(D1)[interior], modes[interior] + k)
    const = d_path(CircleModel(MatrixLoop.constant(H), 24))
    assert np.allclose(const.start, const.end)


def test_p_path_examples():
    model = CircleModel(MatrixLoop.monomial(1), 32)
    fam = p_path(model)
    assert np.allclose(np.abs(np.linalg.eigvalsh(fam.start)), 1)
    vals = np.linalg.eigvalsh(fam.at(0.5))
    assert np.count_nonzero(np.abs(vals) < 1e-6) == 1

    model = CircleModel(MatrixLoop.monomial(2), 32)
    u = 0.3
    interior, _ = interior_spectrum(model, p_path(model).at(u))
    for target, mult in ((1 - 2 * u, 0), (2 * u - 1, 2)):
        assert np.count_nonzero(np.abs(interior - target) < 1e-6) == mult
    rest = interior[np.abs(np.abs(interior) - 1) > 1e-6]
    assert rest.size == 2


def test_equivariance_filter():
    with pytest.raises(InvalidArgumentError):
        CircleModel(MatrixLoop.monomial(3), 64, p=2)
    with pytest.raises(InvalidArgumentError):
        loop_from_json({"N": 1, "p": 2, "terms": [{"j": 1, "matrix": [[1]]}]})


def test_loop_file_roundtrip(tmp_path):
    g = twisted_loop()
    data = g.to_json()
    data["p"] = 1
    path = tmp_path / "loop.json"
    path.write_text(json.dumps(data))
    loaded, p = load_loop(path)
    assert p == 1 and loaded.N == 2
    theta = np.linspace(0, 1, 5)
    assert np.allclose(loaded(theta), g(theta))


def test_loop_file_complex_formats():
    loop, p = loop_from_json({"N": 1, "p": 3, "terms": [{"j": 3, "matrix": [["0+1j"]]}]})
    assert p == 3 and loop.coefficient(3)[0, 0] == 1j
    with pytest.raises(InvalidArgumentError):
        loop_from_json({"N": 1, "terms": [{"matrix": [[1]]}]})


def test_kernel_stable_under_doubling():
    g = MatrixLoop.diagonal((-3, 3, 0))
    m = CircleModel(g, 64, p=3)
    assert kernel_cokernel(m) == kernel_cokernel(m.with_truncation(128))
