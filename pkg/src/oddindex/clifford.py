"""Odd complex Clifford algebras C(n), their spin representation and symbol map.

Basis monomials c_I = c_{i1} c_{i2} ... c_{ik} (i1 < ... < ik) are encoded as
bitmasks: bit ``i - 1`` is set when generator ``c_i`` occurs.  The same
encoding indexes the exterior algebra basis e_S used by the symbol map.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InvalidArgumentError, PreconditionError

MAX_N = 11

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def blade_sign(a: int, b: int) -> int:
    """Sign of c_A c_B relative to c_{A xor B} when every c_i squares to -1."""
    swaps = 0
    x = a >> 1
    while x:
        swaps += _popcount(x & b)
        x >>= 1
    swaps += _popcount(a & b)  # each contraction c_i c_i = -1
    return -1 if swaps & 1 else 1


def _kron_all(mats):
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


class CliffordAlgebra:
    """C(n) for odd n together with its irreducible spin representation.

    The generator matrices satisfy c_i c_j + c_j c_i = -2 delta_ij and are
    normalised so that the chirality (sqrt(-1))^(m+1) c_1...c_n acts as +Id.
    """

    def __init__(self, n: int):
        if not isinstance(n, (int, np.integer)) or n % 2 == 0 or not 3 <= n <= MAX_N:
            raise InvalidArgumentError(f"n must be odd with 3 <= n <= {MAX_N}, got {n!r}")
        self.n = int(n)
        self.m = (self.n - 1) // 2
        self.spin_dim = 2**self.m
        self.generator_reps = self._build_generators()
        self._monomial_cache: dict[int, np.ndarray] = {0: np.eye(self.spin_dim, dtype=complex)}
        self._symbol_perms = [self._symbol_generator(i) for i in range(self.n)]

    def _build_generators(self) -> list[np.ndarray]:
        m = self.m
        gammas = []
        # Jordan-Wigner: Hermitian, pairwise anticommuting, squaring to +Id.
        for k in range(m):
            left = [_Z] * k
            right = [_I2] * (m - k - 1)
            gammas.append(_kron_all(left + [_X] + right))
            gammas.append(_kron_all(left + [_Y] + right))
        gammas.append(_kron_all([_Z] * m))
        gens = [1j * g for g in gammas]
        chir = (1j) ** (m + 1) * reduce(np.matmul, gens)
        if np.allclose(chir, -np.eye(self.spin_dim)):
            gens[-1] = -gens[-1]
        return gens

    def _symbol_generator(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        # sigma(c_i) = e_i ^ - iota(e_i*) is a signed permutation of the e_S basis.
        bit = 1 << i
        size = 1 << self.n
        states = np.arange(size)
        below = np.array([_popcount(s & (bit - 1)) for s in range(size)])
        sign = np.where(below % 2 == 0, 1.0, -1.0)
        sign = np.where(states & bit, -sign, sign)
        return states ^ bit, sign

    # -- element constructors ------------------------------------------------

    def element(self, terms: dict) -> "CliffordElement":
        return CliffordElement(self, terms)

    def scalar(self, value: complex) -> "CliffordElement":
        return CliffordElement(self, {0: value})

    def generator(self, i: int) -> "CliffordElement":
        """The generator c_i, 1-based as in the usual notation."""
        if not 1 <= i <= self.n:
            raise InvalidArgumentError(f"generator index {i} outside 1..{self.n}")
        return CliffordElement(self, {1 << (i - 1): 1.0})

    def monomial(self, *indices: int, coeff: complex = 1.0) -> "CliffordElement":
        """Product c_{i1} c_{i2} ... in the given order (need not be sorted)."""
        out = self.scalar(coeff)
        for i in indices:
            out = out * self.generator(i)
        return out

    def chirality(self) -> "CliffordElement":
        return self.monomial(*range(1, self.n + 1), coeff=(1j) ** (self.m + 1))

    @property
    def top_mask(self) -> int:
        return (1 << self.n) - 1

    def random_element(self, rng: np.random.Generator, nonscalar: bool = True) -> "CliffordElement":
        size = 1 << self.n
        coeffs = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        if nonscalar:
            coeffs[0] = 0.0
        return CliffordElement(self, dict(enumerate(coeffs)))

    def monomial_rep(self, mask: int) -> np.ndarray:
        mat = self._monomial_cache.get(mask)
        if mat is None:
            mat = np.eye(self.spin_dim, dtype=complex)
            for i in range(self.n):
                if mask >> i & 1:
                    mat = mat @ self.generator_reps[i]
            self._monomial_cache[mask] = mat
        return mat

    def symbol_monomial(self, mask: int) -> tuple[np.ndarray, np.ndarray]:
        """sigma(c_I) as (target index, sign) arrays over the e_S basis."""
        size = 1 << self.n
        target = np.arange(size)
        sign = np.ones(size)
        for i in reversed(range(self.n)):
            if mask >> i & 1:
                # the rightmost factor acts first
                t_gen, s_gen = self._symbol_perms[i]
                sign = sign * s_gen[target]
                target = t_gen[target]
        return target, sign

    def __repr__(self) -> str:
        return f"CliffordAlgebra(n={self.n})"


class CliffordElement:
    """An element sum_I a_I c_I stored in canonical (increasing-index) form."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: CliffordAlgebra, terms: dict):
        top = algebra.top_mask
        clean = {}
        for mask, coeff in terms.items():
            mask = int(mask)
            if mask < 0 or mask > top:
                raise InvalidArgumentError(f"monomial mask {mask} outside the algebra")
            if coeff != 0:
                clean[mask] = complex(coeff)
        self.algebra = algebra
        self.terms = clean

    def _check(self, other: "CliffordElement") -> None:
        if other.algebra is not self.algebra:
            raise InvalidArgumentError("elements belong to different Clifford algebras")

    def __add__(self, other):
        if not isinstance(other, CliffordElement):
            other = self.algebra.scalar(other)
        self._check(other)
        out = dict(self.terms)
        for mask, c in other.terms.items():
            out[mask] = out.get(mask, 0) + c
        return CliffordElement(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return CliffordElement(self.algebra, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, CliffordElement):
            return CliffordElement(self.algebra, {k: v * other for k, v in self.terms.items()})
        return multiply(self, other)

    def __rmul__(self, other):
        return CliffordElement(self.algebra, {k: other * v for k, v in self.terms.items()})

    def coefficient(self, mask: int) -> complex:
        return self.terms.get(mask, 0j)

    @property
    def scalar_part(self) -> complex:
        return self.terms.get(0, 0j)

    def allclose(self, other: "CliffordElement", atol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.coefficient(k) - other.coefficient(k)) <= atol for k in keys)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mask in sorted(self.terms):
            idx = [str(i + 1) for i in range(self.algebra.n) if mask >> i & 1]
            name = "c" + ".".join(idx) if idx else "1"
            parts.append(f"({self.terms[mask]:.6g}){name}")
        return " + ".join(parts)


def build_algebra(n: int) -> CliffordAlgebra:
    return CliffordAlgebra(n)


def multiply(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    a._check(b)
    out: dict[int, complex] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            mask = ma ^ mb
            out[mask] = out.get(mask, 0) + blade_sign(ma, mb) * ca * cb
    return CliffordElement(a.algebra, out)


def spin_rep(a: CliffordElement) -> np.ndarray:
    alg = a.algebra
    mat = np.zeros((alg.spin_dim, alg.spin_dim), dtype=complex)
    for mask, coeff in a.terms.items():
        mat += coeff * alg.monomial_rep(mask)
    return mat


@dataclass(frozen=True)
class SymbolImage:
    """sigma(a) as a dense operator on the exterior algebra, basis indexed by bitmask."""

    matrix: np.ndarray
    n: int

    def apply(self, form: np.ndarray) -> np.ndarray:
        return self.matrix @ form


def symbol(a: CliffordElement) -> SymbolImage:
    alg = a.algebra
    size = 1 << alg.n
    mat = np.zeros((size, size), dtype=complex)
    cols = np.arange(size)
    for mask, coeff in a.terms.items():
        target, sign = alg.symbol_monomial(mask)
        mat[target, cols] += coeff * sign
    return SymbolImage(mat, alg.n)


def symbol_apply(a: CliffordElement, form: np.ndarray) -> np.ndarray:
    """sigma(a) applied to an exterior form without materialising the matrix."""
    alg = a.algebra
    out = np.zeros(1 << alg.n, dtype=complex)
    for mask, coeff in a.terms.items():
        target, sign = alg.symbol_monomial(mask)
        np.add.at(out, target, coeff * sign * form)
    return out


def unit_form(n: int) -> np.ndarray:
    """The degree-0 form 1 in the exterior algebra of C^n."""
    form = np.zeros(1 << n, dtype=complex)
    form[0] = 1.0
    return form


def trace_spin_via_symbol(a: CliffordElement) -> complex:
    """Tr_S(a) = -sqrt(-1) (-2 sqrt(-1))^m (sigma(a) 1)_[n] for non-scalar a."""
    if abs(a.scalar_part) != 0:
        raise PreconditionError("trace formula only holds for elements with zero scalar part")
    alg = a.algebra
    top = symbol_apply(a, unit_form(alg.n))[alg.top_mask]
    return -1j * (-2j) ** alg.m * top
