"""Truncated graded-commutative polynomial algebras of differential forms.

A :class:`FormAlgebra` fixes named generators with form degrees and a top
degree ``dmax``; products of degree above ``dmax`` vanish.  Even generators
commute, odd generators anticommute and square to zero.  Coefficients are any
Python numbers; rational coefficients stay exact as :class:`fractions.Fraction`
until they meet a float or complex.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from ..errors import InvalidArgumentError, PreconditionError


class FormAlgebra:
    def __init__(self, generators: Mapping[str, int], dmax: int):
        names = list(generators)
        degrees = [int(generators[g]) for g in names]
        if len(set(names)) != len(names):
            raise InvalidArgumentError("generator names must be distinct")
        if any(d <= 0 for d in degrees):
            raise InvalidArgumentError("generator degrees must be positive")
        self.names = tuple(names)
        self.degrees = tuple(degrees)
        self.dmax = int(dmax)
        self._index = {g: i for i, g in enumerate(names)}

    @classmethod
    def even(cls, names: Iterable[str], dmax: int) -> "FormAlgebra":
        """Algebra of 2-form generators only (Chern roots)."""
        return cls({g: 2 for g in names}, dmax)

    def __eq__(self, other):
        return (isinstance(other, FormAlgebra) and self.names == other.names
                and self.degrees == other.degrees and self.dmax == other.dmax)

    def __hash__(self):
        return hash((self.names, self.degrees, self.dmax))

    def __repr__(self):
        gens = ", ".join(f"{g}:{d}" for g, d in zip(self.names, self.degrees))
        return f"FormAlgebra({{{gens}}}, dmax={self.dmax})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise InvalidArgumentError(f"unknown generator {name!r}") from None

    def is_odd(self, i: int) -> bool:
        return self.degrees[i] % 2 == 1

    def degree(self, mono: tuple[int, ...]) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees))

    def monomial_key(self, powers: Mapping[str, int]) -> tuple[int, ...]:
        key = [0] * len(self.names)
        for g, e in powers.items():
            key[self.index(g)] = int(e)
        return tuple(key)

    def monomial_name(self, mono: tuple[int, ...]) -> str:
        parts = []
        for g, e in zip(self.names, mono):
            if e == 1:
                parts.append(g)
            elif e > 1:
                parts.append(f"{g}^{e}")
        return "*".join(parts) or "1"

    # -- element constructors ------------------------------------------------

    def zero(self) -> "FormSeries":
        return FormSeries(self, {})

    def const(self, c) -> "FormSeries":
        return FormSeries(self, {(0,) * len(self.names): c})

    def one(self) -> "FormSeries":
        return self.const(1)

    def gen(self, name: str) -> "FormSeries":
        i = self.index(name)
        key = [0] * len(self.names)
        key[i] = 1
        return FormSeries(self, {tuple(key): 1})

    def from_terms(self, terms: Mapping) -> "FormSeries":
        """Build from {monomial: coeff} where monomials are dicts of powers or exponent tuples."""
        out = {}
        for mono, c in terms.items():
            key = self.monomial_key(dict(mono)) if not isinstance(mono, tuple) or (
                mono and isinstance(mono[0], tuple)) else tuple(mono)
            out[key] = out.get(key, 0) + c
        return FormSeries(self, out)


def _odd_sign(alg: FormAlgebra, a: tuple[int, ...], b: tuple[int, ...]) -> int:
    """Sign from moving the odd generators of b past those of a into index order."""
    swaps = 0
    odd_a_after = 0
    for i in reversed(range(len(a))):
        if alg.is_odd(i):
            if b[i]:
                swaps += odd_a_after
            if a[i]:
                odd_a_after += 1
    return -1 if swaps % 2 else 1


class FormSeries:
    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: FormAlgebra, terms: Mapping[tuple[int, ...], object]):
        clean = {}
        n = len(algebra.names)
        for mono, c in terms.items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n or any(e < 0 for e in mono):
                raise InvalidArgumentError(f"bad monomial {mono} for {algebra}")
            if any(e > 1 for i, e in enumerate(mono) if algebra.is_odd(i)):
                continue
            if algebra.degree(mono) > algebra.dmax:
                continue
            if c != 0:
                clean[mono] = c
        self.algebra = algebra
        self.terms = clean

    def _coerce(self, other) -> "FormSeries":
        if isinstance(other, FormSeries):
            if other.algebra != self.algebra:
                raise InvalidArgumentError("series live in different algebras")
            return other
        return self.algebra.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return FormSeries(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return FormSeries(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, FormSeries):
            return FormSeries(self.algebra, {m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        alg = self.algebra
        out: dict = {}
        for ma, ca in self.terms.items():
            da = alg.degree(ma)
            for mb, cb in other.terms.items():
                if da + alg.degree(mb) > alg.dmax:
                    continue
                mono = tuple(x + y for x, y in zip(ma, mb))
                if any(mono[i] > 1 for i in range(len(mono)) if alg.is_odd(i)):
                    continue
                out[mono] = out.get(mono, 0) + _odd_sign(alg, ma, mb) * ca * cb
        return FormSeries(alg, out)

    def __rmul__(self, other):
        return FormSeries(self.algebra, {m: other * c for m, c in self.terms.items()})

    def __truediv__(self, other):
        if isinstance(other, FormSeries):
            return self * other.inverse()
        if isinstance(other, int):
            other = Fraction(other)
        return self * (1 / other)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.algebra.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            other = self.algebra.const(other)
        if not isinstance(other, FormSeries):
            return NotImplemented
        return self.algebra == other.algebra and (self - other).terms == {}

    __hash__ = None

    @property
    def constant(self):
        return self.terms.get((0,) * len(self.algebra.names), 0)

    def coefficient(self, powers) -> object:
        key = self.algebra.monomial_key(powers) if isinstance(powers, Mapping) else tuple(powers)
        return self.terms.get(key, 0)

    def nilpotent_part(self) -> "FormSeries":
        return self - self.constant

    def degree_part(self, k: int) -> "FormSeries":
        alg = self.algebra
        return FormSeries(alg, {m: c for m, c in self.terms.items() if alg.degree(m) == k})

    def top_part(self) -> "FormSeries":
        return self.degree_part(self.algebra.dmax)

    def is_even(self) -> bool:
        return all(self.algebra.degree(m) % 2 == 0 for m in self.terms)

    def inverse(self) -> "FormSeries":
        c = self.constant
        if c == 0:
            raise PreconditionError("series with zero constant term is not invertible")
        if isinstance(c, int):
            c = Fraction(c)
        x = self.nilpotent_part() * (1 / c)
        # 1/(c(1+x)) = c^-1 sum (-x)^k, finite since x is nilpotent
        out = self.algebra.one()
        term = self.algebra.one()
        for _ in range(self.algebra.dmax):
            term = term * (-x)
            if not term.terms:
                break
            out = out + term
        return out * (1 / c)

    def compose(self, coeffs: Sequence) -> "FormSeries":
        """sum_k coeffs[k] * self^k; self must have zero constant term."""
        if self.constant != 0:
            raise PreconditionError("composition needs a series without constant term")
        out = self.algebra.zero()
        power = self.algebra.one()
        for k, c in enumerate(coeffs):
            if k:
                power = power * self
                if not power.terms:
                    break
            if c != 0:
                out = out + power * c
        return out

    def apply(self, derivative: Callable[[int], object]) -> "FormSeries":
        """f(self) by Taylor expansion about the constant term; derivative(k) = f^(k)(c)."""
        x = self.nilpotent_part()
        out = self.algebra.zero()
        power = self.algebra.one()
        for k in range(self.algebra.dmax + 1):
            if k:
                power = power * x
                if not power.terms:
                    break
            out = out + power * (derivative(k) / math.factorial(k))
        return out

    def map_coefficients(self, fn: Callable) -> "FormSeries":
        return FormSeries(self.algebra, {m: fn(c) for m, c in self.terms.items()})

    def allclose(self, other: "FormSeries", atol: float = 1e-12) -> bool:
        other = self._coerce(other)
        keys = set(self.terms) | set(other.terms)
        return all(abs(complex(self.terms.get(k, 0)) - complex(other.terms.get(k, 0))) <= atol for k in keys)

    def max_abs_diff(self, other: "FormSeries") -> float:
        other = self._coerce(other)
        keys = set(self.terms) | set(other.terms)
        return max((abs(complex(self.terms.get(k, 0)) - complex(other.terms.get(k, 0))) for k in keys),
                   default=0.0)

    def __repr__(self):
        if not self.terms:
            return "0"
        alg = self.algebra
        items = sorted(self.terms.items(), key=lambda kv: (alg.degree(kv[0]), kv[0]))
        return " + ".join(f"({c})*{alg.monomial_name(m)}" for m, c in items)


# -- univariate coefficient-list helpers (exact when fed Fractions) -----------

def series_reciprocal(coeffs: Sequence, order: int) -> list:
    """Coefficients of 1/f up to x^order; f[0] must be nonzero."""
    if coeffs[0] == 0:
        raise PreconditionError("reciprocal of a series with zero constant term")
    f = list(coeffs) + [0] * (order + 1 - len(coeffs))
    out = [Fraction(1) / f[0] if isinstance(f[0], (int, Fraction)) else 1 / f[0]]
    for n in range(1, order + 1):
        acc = sum(f[k] * out[n - k] for k in range(1, n + 1))
        out.append(-acc * out[0])
    return out


def divide_series(num: Sequence, den: Sequence, order: int) -> list:
    """Coefficients of num/den up to x^order, cancelling a common power of x."""
    shift = next((i for i, c in enumerate(den) if c != 0), None)
    if shift is None:
        raise PreconditionError("division by the zero series")
    if any(c != 0 for c in list(num)[:shift]):
        raise PreconditionError("quotient is not a power series")
    num = list(num)[shift:]
    den = list(den)[shift:]
    inv = series_reciprocal(den, order)
    num = num + [0] * (order + 1 - len(num))
    return [sum(num[k] * inv[n - k] for k in range(n + 1)) for n in range(order + 1)]


def sin_coefficients(order: int, scale=Fraction(1)) -> list:
    """Taylor coefficients of sin(scale * x) up to x^order."""
    out = []
    for n in range(order + 1):
        if n % 2 == 0:
            out.append(Fraction(0))
        else:
            out.append(Fraction((-1) ** ((n - 1) // 2), math.factorial(n)) * scale**n)
    return out


def sinh_coefficients(order: int, scale=Fraction(1)) -> list:
    return [Fraction(0) if n % 2 == 0 else Fraction(1, math.factorial(n)) * scale**n
            for n in range(order + 1)]


def half_angle_ratio_coefficients(order: int) -> list:
    """(x/2) / sin(x/2) up to x^order, exact rationals."""
    return divide_series([Fraction(0), Fraction(1, 2)], sin_coefficients(order + 1, Fraction(1, 2)), order)


def series_arith(a: FormSeries, b: FormSeries | None = None, op: str = "mul", coeffs=None) -> FormSeries:
    """Dispatch for the basic operations: add, mul, invert, compose."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "invert":
        return a.inverse()
    if op == "compose":
        return a.compose(coeffs)
    raise InvalidArgumentError(f"unknown series operation {op!r}")
