"""Spectral data of Hermitian matrices commuting with a Z_p action.

Characters are labelled j = 0..p-1 with chi_j(generator) = exp(2 pi i j / p).
On the circle, the rotation by 2 pi / p acts on functions by
(r.f)(theta) = f(theta - 2 pi / p), so the Fourier mode e^{i n theta} has
eigenvalue exp(-2 pi i n / p) and carries character (-n) mod p.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidArgumentError, NonEquivariantOperatorError


def mode_character(n, p: int):
    """Character index carried by the Fourier mode e^{i n theta}."""
    return (-np.asarray(n)) % p


class GroupAction:
    """Unitary action of the generator of Z_p on a finite-dimensional space."""

    def __init__(self, p: int, U: np.ndarray, check: bool = True):
        if p < 1:
            raise InvalidArgumentError(f"group order must be >= 1, got {p}")
        U = np.asarray(U, dtype=complex)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise InvalidArgumentError("action matrix must be square")
        self.p = int(p)
        self.U = U
        if check:
            dim = U.shape[0]
            if np.linalg.norm(U.conj().T @ U - np.eye(dim)) > 1e-12 * max(1, dim):
                raise InvalidArgumentError("action matrix is not unitary")
            if np.linalg.norm(np.linalg.matrix_power(U, self.p) - np.eye(dim)) > 1e-10 * max(1, dim):
                raise InvalidArgumentError(f"U^p != Id for p={self.p}")

    @classmethod
    def trivial(cls, dim: int) -> "GroupAction":
        return cls(1, np.eye(dim))

    @classmethod
    def from_characters(cls, chars, p: int) -> "GroupAction":
        """Diagonal action whose i-th basis vector carries character chars[i]."""
        chars = np.asarray(chars) % p
        return cls(p, np.diag(np.exp(2j * np.pi * chars / p)))

    @property
    def dim(self) -> int:
        return self.U.shape[0]

    @cached_property
    def is_diagonal(self) -> bool:
        return not np.any(self.U - np.diag(np.diag(self.U)))

    def power(self, k: int) -> np.ndarray:
        if self.is_diagonal:
            return np.diag(np.diag(self.U) ** (k % self.p))
        return np.linalg.matrix_power(self.U, k % self.p)

    def character_value(self, j: int, k: int) -> complex:
        return np.exp(2j * np.pi * j * k / self.p)

    @cached_property
    def projectors(self) -> list[np.ndarray]:
        p = self.p
        powers = [self.power(k) for k in range(p)]
        return [
            sum(np.conj(self.character_value(j, k)) * powers[k] for k in range(p)) / p
            for j in range(p)
        ]

    @cached_property
    def bases(self) -> list[np.ndarray]:
        """Orthonormal basis (columns) of each isotypic component."""
        if self.is_diagonal:
            phases = np.angle(np.diag(self.U)) * self.p / (2 * np.pi)
            chars = np.rint(phases).astype(int) % self.p
            eye = np.eye(self.dim, dtype=complex)
            return [eye[:, chars == j] for j in range(self.p)]
        out = []
        for proj in self.projectors:
            w, v = np.linalg.eigh((proj + proj.conj().T) / 2)
            out.append(v[:, w > 0.5])
        return out

    @cached_property
    def _diagonal_indices(self) -> list[np.ndarray]:
        return [np.flatnonzero(np.any(B, axis=1)) for B in self.bases]

    def block(self, D: np.ndarray, j: int) -> np.ndarray:
        """Compression of D to the character-j isotypic component."""
        if self.is_diagonal:
            idx = self._diagonal_indices[j]
            return D[np.ix_(idx, idx)]
        B = self.bases[j]
        return B.conj().T @ D @ B

    def commutator_norm(self, D: np.ndarray) -> float:
        if self.is_diagonal:
            d = np.diag(self.U)
            return float(np.linalg.norm(D * d[None, :] - d[:, None] * D))
        return float(np.linalg.norm(D @ self.U - self.U @ D))

    def check_equivariant(self, D: np.ndarray, rtol: float = 1e-8) -> None:
        """Frobenius-norm test |DU - UD| <= rtol |D|."""
        scale = max(np.linalg.norm(D), 1e-300)
        c = self.commutator_norm(D)
        if c > rtol * scale and c > 1e-12:
            raise NonEquivariantOperatorError(
                f"operator does not commute with the action: |[D,U]| = {c:.3e}, |D| = {scale:.3e}"
            )


def isotypic_projectors(action: GroupAction) -> list[np.ndarray]:
    return action.projectors


@dataclass(frozen=True)
class RepElement:
    """Virtual representation of Z_p as a vector of character multiplicities."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @classmethod
    def zero(cls, p: int) -> "RepElement":
        return cls((0,) * p)

    @classmethod
    def character(cls, j: int, p: int) -> "RepElement":
        c = [0] * p
        c[j % p] = 1
        return cls(tuple(c))

    @property
    def p(self) -> int:
        return len(self.coeffs)

    @property
    def dimension(self) -> int:
        return sum(self.coeffs)

    def _check(self, other: "RepElement") -> None:
        if other.p != self.p:
            raise InvalidArgumentError("representations of different groups")

    def __add__(self, other: "RepElement") -> "RepElement":
        self._check(other)
        return RepElement(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "RepElement":
        return RepElement(tuple(-a for a in self.coeffs))

    def __sub__(self, other: "RepElement") -> "RepElement":
        return self + (-other)

    def __iter__(self):
        return iter(self.coeffs)

    def as_list(self) -> list[int]:
        return list(self.coeffs)


def character_trace(r: RepElement, h_power: int) -> complex:
    p = r.p
    if not 0 <= h_power < p:
        raise InvalidArgumentError(f"h_power must lie in [0, {p}), got {h_power}")
    return complex(sum(c * np.exp(2j * np.pi * j * h_power / p) for j, c in enumerate(r.coeffs)))


def rep_from_traces(traces, p: int) -> RepElement:
    """Recover integer multiplicities from character values at every group element."""
    traces = np.asarray(traces, dtype=complex)
    coeffs = []
    for j in range(p):
        val = sum(traces[k] * np.exp(-2j * np.pi * j * k / p) for k in range(p)) / p
        coeffs.append(int(np.rint(val.real)))
    return RepElement(tuple(coeffs))


@dataclass(frozen=True)
class SpectralPoint:
    value: float
    mult: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.mult)


@dataclass(frozen=True)
class IsotypicSpectrum:
    points: tuple[SpectralPoint, ...]
    p: int

    @property
    def dimension(self) -> int:
        return sum(pt.total for pt in self.points)

    def eigenvalues(self) -> np.ndarray:
        return np.concatenate(
            [np.full(pt.total, pt.value) for pt in self.points] or [np.zeros(0)]
        )


def block_eigenvalues(D: np.ndarray, action: GroupAction) -> list[np.ndarray]:
    """Sorted eigenvalues of each isotypic block of an equivariant Hermitian D."""
    return [np.linalg.eigvalsh(action.block(D, j)) for j in range(action.p)]


def equivariant_eigendecompose(D: np.ndarray, action: GroupAction, cluster_tol: float | None = None,
                               check: bool = True) -> IsotypicSpectrum:
    D = np.asarray(D, dtype=complex)
    if check:
        action.check_equivariant(D)
    p = action.p
    tagged = []
    for j, vals in enumerate(block_eigenvalues(D, action)):
        tagged.extend((float(v), j) for v in vals)
    tagged.sort()
    if not tagged:
        return IsotypicSpectrum((), p)
    if cluster_tol is None:
        diameter = tagged[-1][0] - tagged[0][0]
        cluster_tol = 1e-8 * max(diameter, 1.0)

    points = []
    group = [tagged[0]]
    for item in tagged[1:]:
        if item[0] - group[-1][0] <= cluster_tol:
            group.append(item)
        else:
            points.append(group)
            group = [item]
    points.append(group)

    out = []
    for grp in points:
        mult = [0] * p
        for _, j in grp:
            mult[j] += 1
        out.append(SpectralPoint(float(np.mean([v for v, _ in grp])), tuple(mult)))
    return IsotypicSpectrum(tuple(out), p)
