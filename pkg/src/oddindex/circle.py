"""Fourier-truncated Dirac and Toeplitz data on the circle twisted by C^N.

Basis vectors are e^{i n theta} (x) f_a for |n| <= Lambda, ordered mode-major:
index = (n + Lambda) * N + a.  The Dirac operator -i d/dtheta is diag(n) (x) Id_N;
the spin structure is the trivial one so the spectrum is Z and the Hardy space
contains the zero mode.

Operators of the form g^{-1} X g with X diagonal in the Fourier basis are
compressed exactly: the intermediate space is widened by the loop degree so no
truncation happens between the two multiplications.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .equispec import GroupAction, RepElement, mode_character
from .errors import (
    IllConditionedKernelError,
    InvalidArgumentError,
    ResolutionError,
    TruncationTooSmallError,
)
from .specflow import DEFAULT_GRID, OperatorFamily

SVD_TOL = 1e-7
SVD_GAP = 1e3


class MatrixLoop:
    """g(theta) = sum_j A_j e^{i j theta}, a unitary N x N Fourier polynomial."""

    def __init__(self, coeffs: dict, N: int | None = None, check: bool = True):
        clean = {}
        for j, A in coeffs.items():
            A = np.atleast_2d(np.asarray(A, dtype=complex))
            if np.any(A):
                clean[int(j)] = A
        if N is None:
            if not clean:
                raise InvalidArgumentError("cannot infer N from an empty loop")
            N = next(iter(clean.values())).shape[0]
        for A in clean.values():
            if A.shape != (N, N):
                raise InvalidArgumentError(f"Fourier coefficient of shape {A.shape}, expected {(N, N)}")
        self.N = int(N)
        self.coeffs = dict(sorted(clean.items()))
        self.degree = max((abs(j) for j in self.coeffs), default=0)
        if check:
            self.check_unitary()

    # -- constructors ---------------------------------------------------------

    @classmethod
    def monomial(cls, k: int, N: int = 1) -> "MatrixLoop":
        return cls({k: np.eye(N)}, N)

    @classmethod
    def diagonal(cls, ks) -> "MatrixLoop":
        N = len(ks)
        coeffs: dict[int, np.ndarray] = {}
        for a, k in enumerate(ks):
            coeffs.setdefault(int(k), np.zeros((N, N), dtype=complex))[a, a] = 1.0
        return cls(coeffs, N)

    @classmethod
    def constant(cls, V) -> "MatrixLoop":
        V = np.atleast_2d(np.asarray(V, dtype=complex))
        return cls({0: V}, V.shape[0])

    def __matmul__(self, other: "MatrixLoop") -> "MatrixLoop":
        """Pointwise product theta -> g(theta) h(theta)."""
        out: dict[int, np.ndarray] = {}
        for j, A in self.coeffs.items():
            for l, B in other.coeffs.items():
                out[j + l] = out.get(j + l, 0) + A @ B
        return MatrixLoop(out, self.N)

    def adjoint(self) -> "MatrixLoop":
        return MatrixLoop({-j: A.conj().T for j, A in self.coeffs.items()}, self.N, check=False)

    # -- evaluation -----------------------------------------------------------

    def __call__(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.zeros((theta.size, self.N, self.N), dtype=complex)
        for j, A in self.coeffs.items():
            out += np.exp(1j * j * theta)[:, None, None] * A
        return out

    def derivative(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.zeros((theta.size, self.N, self.N), dtype=complex)
        for j, A in self.coeffs.items():
            out += (1j * j * np.exp(1j * j * theta))[:, None, None] * A
        return out

    def log_derivative(self, theta) -> np.ndarray:
        """omega = g^{-1} dg/dtheta, using g^{-1} = g^* for a unitary loop."""
        return np.conj(np.swapaxes(self(theta), 1, 2)) @ self.derivative(theta)

    def coefficient(self, j: int) -> np.ndarray:
        return self.coeffs.get(j, np.zeros((self.N, self.N), dtype=complex))

    def check_unitary(self, tol: float = 1e-8) -> None:
        theta = np.linspace(0, 2 * np.pi, 4 * (self.degree + 1), endpoint=False)
        vals = self(theta)
        eye = np.eye(self.N)
        err = max(np.max(np.abs(g.conj().T @ g - eye)) for g in vals)
        if err > tol:
            raise InvalidArgumentError(f"loop is not unitary (deviation {err:.2e})")

    def is_invariant(self, p: int) -> bool:
        """True when g(theta + 2 pi / p) = g(theta), i.e. only modes divisible by p occur."""
        return all(j % p == 0 for j in self.coeffs)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "terms": [
                {"j": j, "matrix": [[[z.real, z.imag] for z in row] for row in A]}
                for j, A in self.coeffs.items()
            ],
        }


def _parse_complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InvalidArgumentError(f"complex entry must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", ""))
    return complex(x)


def loop_from_json(data: dict) -> tuple[MatrixLoop, int]:
    """Parse a loop specification; returns the loop and the group order p."""
    try:
        N = int(data["N"])
        p = int(data.get("p", 1))
        coeffs = {}
        for term in data["terms"]:
            mat = np.array([[_parse_complex(z) for z in row] for row in term["matrix"]], dtype=complex)
            j = int(term["j"])
            coeffs[j] = coeffs.get(j, 0) + mat
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"malformed loop specification: {exc}") from exc
    loop = MatrixLoop(coeffs, N)
    if not loop.is_invariant(p):
        raise InvalidArgumentError(
            f"loop has Fourier modes {sorted(loop.coeffs)} not divisible by p={p}; "
            "it is not invariant under the rotation action"
        )
    return loop, p


def load_loop(path) -> tuple[MatrixLoop, int]:
    with open(Path(path), encoding="utf-8") as fh:
        return loop_from_json(json.load(fh))


def multiplication_matrix(loop: MatrixLoop, domain_modes, range_modes) -> np.ndarray:
    """Matrix of f -> g f from span(domain_modes) to span(range_modes), both (x) C^N."""
    domain_modes = np.asarray(domain_modes)
    range_modes = np.asarray(range_modes)
    N = loop.N
    out = np.zeros((range_modes.size * N, domain_modes.size * N), dtype=complex)
    pos = {int(m): i for i, m in enumerate(range_modes)}
    for c, n in enumerate(domain_modes):
        for j, A in loop.coeffs.items():
            r = pos.get(int(n) + j)
            if r is not None:
                out[r * N:(r + 1) * N, c * N:(c + 1) * N] = A
    return out


def winding_number(loop: MatrixLoop, points: int | None = None) -> int:
    """Degree of theta -> det g(theta) by phase continuation."""
    if points is None:
        points = 64 * (loop.degree + 1)
    theta = np.linspace(0, 2 * np.pi, points + 1)
    dets = np.linalg.det(loop(theta))
    steps = np.angle(dets[1:] / dets[:-1])
    if np.max(np.abs(steps)) > np.pi / 2:
        raise ResolutionError("phase of det g jumps by more than pi/2 between grid points")
    total = np.sum(steps) / (2 * np.pi)
    w = int(np.rint(total))
    if abs(total - w) > 1e-6:
        raise ResolutionError(f"winding estimate {total} is not close to an integer")
    return w


class CircleModel:
    """Truncated Dirac/Toeplitz data for a loop g on S^1 and a rotation action of Z_p."""

    def __init__(self, loop: MatrixLoop, Lambda: int, p: int = 1, enforce_guard: bool = True):
        if p < 1:
            raise InvalidArgumentError("group order must be positive")
        if not loop.is_invariant(p):
            raise InvalidArgumentError(
                f"loop modes {sorted(loop.coeffs)} are not all divisible by p={p}"
            )
        if enforce_guard and Lambda < 8 * (loop.degree + 1):
            raise InvalidArgumentError(
                f"truncation Lambda={Lambda} below the guard band 8*(d+1)={8 * (loop.degree + 1)}"
            )
        if Lambda < 2 * loop.degree + 1:
            raise InvalidArgumentError("truncation too small for the loop degree")
        self.loop = loop
        self.Lambda = int(Lambda)
        self.p = int(p)
        self.N = loop.N

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.Lambda, self.Lambda + 1)

    @property
    def dim(self) -> int:
        return self.modes.size * self.N

    @cached_property
    def mode_of_index(self) -> np.ndarray:
        return np.repeat(self.modes, self.N)

    @cached_property
    def dirac(self) -> np.ndarray:
        return np.diag(self.mode_of_index.astype(complex))

    @cached_property
    def hardy_plus(self) -> np.ndarray:
        return np.diag((self.mode_of_index >= 0).astype(complex))

    @cached_property
    def hardy_sign(self) -> np.ndarray:
        """P = P_+ - P_-."""
        return np.diag(np.where(self.mode_of_index >= 0, 1.0, -1.0).astype(complex))

    @cached_property
    def action(self) -> GroupAction:
        return GroupAction.from_characters(mode_character(self.mode_of_index, self.p), self.p)

    def _conjugated(self, symbol) -> np.ndarray:
        """Compression of g^{-1} X g for X = diag(symbol(n)) in the Fourier basis."""
        d = self.loop.degree
        wide = np.arange(-self.Lambda - d, self.Lambda + d + 1)
        M = multiplication_matrix(self.loop, self.modes, wide)
        X = np.repeat(symbol(wide), self.N).astype(complex)
        out = M.conj().T @ (X[:, None] * M)
        return (out + out.conj().T) / 2

    @cached_property
    def conjugated_dirac(self) -> np.ndarray:
        return self._conjugated(lambda n: n.astype(float))

    @cached_property
    def conjugated_sign(self) -> np.ndarray:
        return self._conjugated(lambda n: np.where(n >= 0, 1.0, -1.0))

    @cached_property
    def dirac_velocity(self) -> np.ndarray:
        """d/du D_u along the linear path; constant."""
        return self.conjugated_dirac - self.dirac

    def dirac_at(self, u: float) -> np.ndarray:
        return (1 - u) * self.dirac + u * self.conjugated_dirac

    def sign_at(self, u: float) -> np.ndarray:
        return (1 - u) * self.hardy_sign + u * self.conjugated_sign

    def edge_weight(self, vectors: np.ndarray, margin: int | None = None) -> np.ndarray:
        """Weight of each column on modes within ``margin`` of the truncation edge."""
        if margin is None:
            margin = 2 * self.loop.degree + 1
        edge = np.abs(self.mode_of_index) > self.Lambda - margin
        return np.sum(np.abs(vectors[edge, :]) ** 2, axis=0)

    def with_truncation(self, Lambda: int) -> "CircleModel":
        return CircleModel(self.loop, Lambda, self.p, enforce_guard=False)


def toeplitz_compression(model: CircleModel) -> np.ndarray:
    """Square section P_+ g P_+ on modes 0..Lambda."""
    hardy = np.arange(0, model.Lambda + 1)
    return multiplication_matrix(model.loop, hardy, hardy)


@dataclass(frozen=True)
class _Nullity:
    per_character: tuple[int, ...]
    smallest_nonzero: float


def _section_nullity(loop: MatrixLoop, Lambda: int, p: int, tol: float, gap: float) -> _Nullity:
    """Per-character nullity of P_+ g on modes 0..Lambda-d, a one-sided exact section."""
    d = loop.degree
    dom = np.arange(0, Lambda - d + 1)
    rng = np.arange(0, Lambda + 1)
    T = multiplication_matrix(loop, dom, rng)
    dom_char = np.repeat(mode_character(dom, p), loop.N)
    rng_char = np.repeat(mode_character(rng, p), loop.N)
    nulls = []
    smallest = np.inf
    for j in range(p):
        block = T[np.ix_(rng_char == j, dom_char == j)]
        ncols = block.shape[1]
        if ncols == 0:
            nulls.append(0)
            continue
        s = np.linalg.svd(block, compute_uv=False) if block.shape[0] else np.zeros(0)
        s = np.concatenate([s, np.zeros(max(0, ncols - s.size))])
        ambiguous = (s > tol) & (s <= tol * gap)
        if np.any(ambiguous):
            raise IllConditionedKernelError(
                f"singular values {s[ambiguous]} fall in the gap ({tol:g}, {tol * gap:g}]"
            )
        nulls.append(int(np.count_nonzero(s <= tol)))
        if np.any(s > tol):
            smallest = min(smallest, float(np.min(s[s > tol])))
    return _Nullity(tuple(nulls), smallest)


def kernel_cokernel(model: CircleModel, svd_tol: float = SVD_TOL,
                    gap_ratio: float = SVD_GAP) -> tuple[RepElement, RepElement]:
    """ker T_g and coker T_g (realised as ker T_{g*}) as representations of Z_p.

    Every null vector of the rectangular section is an exact kernel element of
    the Toeplitz operator, and all kernel elements are supported on modes
    below the loop degree, so the count is exact once Lambda >= 2d.  The count
    is repeated at doubled truncation as a stability check.
    """
    results = []
    for Lam in (model.Lambda, 2 * model.Lambda):
        ker = _section_nullity(model.loop, Lam, model.p, svd_tol, gap_ratio)
        coker = _section_nullity(model.loop.adjoint(), Lam, model.p, svd_tol, gap_ratio)
        results.append((ker.per_character, coker.per_character))
    if results[0] != results[1]:
        raise TruncationTooSmallError(
            f"kernel/cokernel changed when Lambda was doubled: {results[0]} -> {results[1]}"
        )
    ker, coker = results[0]
    return RepElement(ker), RepElement(coker)


def equivariant_index(model: CircleModel, svd_tol: float = SVD_TOL) -> RepElement:
    ker, coker = kernel_cokernel(model, svd_tol)
    return ker - coker


def d_path(model: CircleModel, grid: int = DEFAULT_GRID) -> OperatorFamily:
    """D_u = (1 - u) D + u g^{-1} D g, compressed."""
    vel = model.dirac_velocity
    return OperatorFamily.from_function(model.dirac_at, model.action, grid, velocity=lambda u: vel)


def p_path(model: CircleModel, grid: int = DEFAULT_GRID) -> OperatorFamily:
    """P_u = (1 - u) P + u g^{-1} P g, compressed."""
    vel = model.conjugated_sign - model.hardy_sign
    return OperatorFamily.from_function(model.sign_at, model.action, grid, velocity=lambda u: vel)


def interior_spectrum(model: CircleModel, op: np.ndarray, margin: int | None = None,
                      weight_tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Split eigenvalues of ``op`` into (interior, edge) by eigenvector localisation."""
    vals, vecs = np.linalg.eigh(op)
    w = model.edge_weight(vecs, margin)
    return vals[w <= weight_tol], vals[w > weight_tol]
