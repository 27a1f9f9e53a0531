"""Pfaffians of antisymmetric matrices over a commutative ring."""
from __future__ import annotations

from typing import Sequence

from ..errors import InvalidArgumentError
from .series import FormSeries


def _is_zero(x, atol: float) -> bool:
    if isinstance(x, FormSeries):
        return all(abs(complex(c)) <= atol for c in x.terms.values())
    return abs(complex(x)) <= atol


def check_antisymmetric(A: Sequence[Sequence], atol: float = 1e-12) -> None:
    n = len(A)
    if any(len(row) != n for row in A):
        raise InvalidArgumentError("matrix must be square")
    for i in range(n):
        if not _is_zero(A[i][i], atol):
            raise InvalidArgumentError(f"diagonal entry ({i},{i}) is nonzero")
        for j in range(i + 1, n):
            if not _is_zero(A[i][j] + A[j][i], atol):
                raise InvalidArgumentError(f"entries ({i},{j}) and ({j},{i}) are not opposite")
        for j in range(n):
            if isinstance(A[i][j], FormSeries) and not A[i][j].is_even():
                raise InvalidArgumentError("Pfaffian entries must be even forms")


def _pf(A, idx: tuple[int, ...]):
    if not idx:
        return 1
    first, rest = idx[0], idx[1:]
    total = None
    for pos, j in enumerate(rest):
        a = A[first][j]
        if _is_zero(a, 0.0):
            continue
        sub = _pf(A, rest[:pos] + rest[pos + 1:])
        term = a * sub if pos % 2 == 0 else -(a * sub)
        total = term if total is None else total + term
    return total if total is not None else A[first][rest[0]] * 0


def pfaffian(A: Sequence[Sequence], check: bool = True, atol: float = 1e-12):
    """Perfect-matching expansion along the first row; entries must commute."""
    n = len(A)
    if n % 2:
        raise InvalidArgumentError(f"Pfaffian needs even size, got {n}")
    if check:
        check_antisymmetric(A, atol)
    return _pf(A, tuple(range(n)))
