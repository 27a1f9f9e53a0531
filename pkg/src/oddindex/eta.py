"""Truncated equivariant eta functions and the heat-integral form of the index.

For a Hermitian matrix the t-integral defining the truncated eta function at
s = 0 has a closed form per eigenvalue,

    pi^{-1/2} int_eps^inf lambda e^{-t lambda^2} t^{-1/2} dt = sign(lambda) erfc(|lambda| sqrt(eps)),

so no quadrature enters the definition.  Along a path D_u the one-form
alpha(X) = (eps/pi)^{1/2} Tr(h X e^{-eps D^2}) satisfies d eta_eps = -2 alpha,
hence sf(h) = int alpha and Ind(h, T_g) = -int alpha.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import erfc

from .equispec import GroupAction
from .errors import EquivarianceViolationError, InvalidArgumentError, NonConvergenceError
from .specflow import OperatorFamily

IMAG_TOL = 1e-8
QUAD_ORDER = 32
MAX_QUAD_ORDER = 1024
QUAD_TOL = 1e-4


@dataclass(frozen=True)
class EtaContext:
    D: np.ndarray
    action: GroupAction
    h_power: int = 0
    epsilon: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidArgumentError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 <= self.h_power < self.action.p:
            raise InvalidArgumentError(f"h_power {self.h_power} outside [0, {self.action.p})")
        self.action.check_equivariant(np.asarray(self.D))


def _characters(action: GroupAction, h_power: int) -> np.ndarray:
    return np.array([action.character_value(j, h_power) for j in range(action.p)])


def _realify(value: complex, real: bool, what: str):
    if not real:
        return complex(value)
    if abs(value.imag) > IMAG_TOL:
        raise EquivarianceViolationError(
            f"{what} has imaginary part {value.imag:.3e}; use real=False for complex characters"
        )
    return float(value.real)


def eta_per_character(D: np.ndarray, action: GroupAction, epsilon: float) -> np.ndarray:
    """Truncated eta of each isotypic block (real numbers, one per character)."""
    out = np.zeros(action.p)
    for j in range(action.p):
        lam = np.linalg.eigvalsh(action.block(D, j))
        out[j] = np.sum(np.sign(lam) * erfc(np.abs(lam) * math.sqrt(epsilon)))
    return out


def eta_truncated(ctx: EtaContext, real: bool = True):
    per = eta_per_character(np.asarray(ctx.D, dtype=complex), ctx.action, ctx.epsilon)
    value = np.sum(_characters(ctx.action, ctx.h_power) * per)
    return _realify(value, real, "truncated eta")


def eta_invariant(D: np.ndarray, action: GroupAction, h_power: int = 0, real: bool = True,
                  zero_tol: float = 1e-12):
    """epsilon -> 0 limit for a finite matrix: sum over nonzero eigenvalues of chi(h) sign(lambda)."""
    per = np.zeros(action.p)
    for j in range(action.p):
        lam = np.linalg.eigvalsh(action.block(D, j))
        per[j] = np.sum(np.sign(lam) * (np.abs(lam) > zero_tol))
    return _realify(np.sum(_characters(action, h_power) * per), real, "eta invariant")


def alpha_per_character(D: np.ndarray, X: np.ndarray, action: GroupAction, epsilon: float) -> np.ndarray:
    """(eps/pi)^{1/2} Tr(X_j e^{-eps D_j^2}) for each isotypic block j."""
    out = np.zeros(action.p)
    pref = math.sqrt(epsilon / math.pi)
    for j in range(action.p):
        lam, vec = np.linalg.eigh(action.block(D, j))
        Xj = action.block(X, j)
        diag = np.sum(vec.conj() * (Xj @ vec), axis=0).real
        out[j] = pref * np.sum(np.exp(-epsilon * lam**2) * diag)
    return out


def alpha_form(D: np.ndarray, X: np.ndarray, action: GroupAction, h_power: int, epsilon: float,
               real: bool = True):
    D = np.asarray(D, dtype=complex)
    X = np.asarray(X, dtype=complex)
    action.check_equivariant(D)
    action.check_equivariant(X)
    if np.max(np.abs(X - X.conj().T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(X), initial=0.0)):
        raise InvalidArgumentError("direction X must be Hermitian")
    value = np.sum(_characters(action, h_power) * alpha_per_character(D, X, action, epsilon))
    return _realify(value, real, "alpha")


def variation_check(D: np.ndarray, X: np.ndarray, action: GroupAction, h_power: int,
                    epsilon: float, step: float = 1e-4) -> tuple[complex, complex]:
    """(central difference of eta_eps along D + tX at t = 0, 2 * alpha(X)).

    Both values are returned as complex numbers since characters of Z_p with
    p > 2 are complex.
    """
    chars = _characters(action, h_power)

    def eta_at(t):
        return np.sum(chars * eta_per_character(D + t * X, action, epsilon))

    fd = (eta_at(step) - eta_at(-step)) / (2 * step)
    two_alpha = 2 * alpha_form(D, X, action, h_power, epsilon, real=False)
    return complex(fd), complex(two_alpha)


def _velocity_of(family: OperatorFamily) -> Callable[[float], np.ndarray]:
    vel = getattr(family, "velocity", None)
    if vel is not None:
        return vel
    if family.refiner is None:
        raise InvalidArgumentError("heat integral needs a refinable family")
    fn = family.refiner
    h = 1e-5

    def fd(u):
        a, b = max(u - h, 0.0), min(u + h, 1.0)
        return (fn(b) - fn(a)) / (b - a)

    return fd


def _alpha_path_integral(family: OperatorFamily, epsilon: float, order: int) -> np.ndarray:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    us = 0.5 * (nodes + 1.0)
    ws = 0.5 * weights
    vel = _velocity_of(family)
    vals = np.array([alpha_per_character(family.at(u), vel(u), family.action, epsilon) for u in us])
    # node-ordered compensated summation per character
    return np.array([math.fsum(ws * vals[:, j]) for j in range(family.action.p)])


def alpha_integral_per_character(family: OperatorFamily, epsilon: float,
                                 quadrature_order: int = QUAD_ORDER,
                                 tol: float = QUAD_TOL) -> np.ndarray:
    """int_0^1 alpha(dD/du) du per character block, with Gauss-Legendre order doubling."""
    if not epsilon > 0:
        raise InvalidArgumentError("epsilon must be positive")
    order = quadrature_order
    prev = _alpha_path_integral(family, epsilon, order)
    while True:
        order *= 2
        cur = _alpha_path_integral(family, epsilon, order)
        if np.max(np.abs(cur - prev)) <= tol:
            return cur
        if order >= MAX_QUAD_ORDER:
            raise NonConvergenceError(
                f"heat integral unstable under quadrature doubling (change {np.max(np.abs(cur - prev)):.2e})"
            )
        prev = cur


def heat_index_integral(family: OperatorFamily, h_power: int, epsilon: float,
                        quadrature_order: int = QUAD_ORDER, real: bool = True):
    """Ind(h, T_g) as minus the integral of the alpha one-form along the path."""
    if not 0 <= h_power < family.action.p:
        raise InvalidArgumentError(f"h_power {h_power} outside [0, {family.action.p})")
    per = alpha_integral_per_character(family, epsilon, quadrature_order)
    value = -np.sum(_characters(family.action, h_power) * per)
    return _realify(value, real, "heat index integral")


def heat_index_traces(family: OperatorFamily, epsilon: float,
                      quadrature_order: int = QUAD_ORDER) -> np.ndarray:
    """heat_index_integral at every h_power in one pass (complex, indexed by h)."""
    per = alpha_integral_per_character(family, epsilon, quadrature_order)
    return np.array([-np.sum(_characters(family.action, h) * per) for h in range(family.action.p)])


def admissible_epsilons(Lambda: int) -> tuple[float, float]:
    """The epsilon window [30, 120] / Lambda^2 in which edge modes are suppressed."""
    return 30.0 / Lambda**2, 120.0 / Lambda**2
