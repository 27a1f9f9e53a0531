"""Fixed-point contributions to the equivariant index of Toeplitz operators.

Conventions (fixed once, see :func:`calibrate_circle`):

* The normal sine matrix is ``2 sin(SINE_UNIT * (R^nu + Theta) / 2)`` with
  ``Theta`` and ``R^nu`` block-diagonal, block i equal to ``(theta_i + v_i) J``
  with ``J = [[0, 1], [-1, 0]]``.  Its Pfaffian is then
  ``prod_i 2 SINE_UNIT sin((theta_i + v_i) / 2)``.
* The prefactor is ``GLOBAL_SIGN * (-i / 2 pi)^(m + 1 - s)`` where the ambient
  dimension is ``2m + 1 = dimF + 2s``.

With SINE_UNIT = -i the product form ``(-i/2pi)^(m+1) ch j_V prod(-pi / sin)``
and the Pfaffian form agree identically.  GLOBAL_SIGN = -1 is what makes the
full-circle evaluation equal the numerically computed Toeplitz index.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import cosm, sinm

from ..errors import InvalidArgumentError, SingularAngleError
from .pfaffian import pfaffian
from .series import (
    FormAlgebra,
    FormSeries,
    divide_series,
    half_angle_ratio_coefficients,
    sinh_coefficients,
)

SINE_UNIT = -1j
GLOBAL_SIGN = -1


# -- univariate characteristic series ----------------------------------------

def beta_integral(j: int) -> Fraction:
    """int_0^1 (u(1-u))^j du, exactly, by expanding the binomial."""
    return sum((Fraction(math.comb(j, i) * (-1) ** i, j + i + 1) for i in range(j + 1)), Fraction(0))


def chern_coefficient(j: int) -> Fraction:
    """Weight of Tr((g^-1 dg)^(2j+1)) in the odd Chern character."""
    return beta_integral(j) / math.factorial(j)


def _root_series(roots, algebra: FormAlgebra | None) -> tuple[list[FormSeries], FormAlgebra]:
    out = []
    for r in roots:
        if isinstance(r, FormSeries):
            algebra = algebra or r.algebra
            out.append(r)
        else:
            if algebra is None:
                raise InvalidArgumentError("root names need an algebra")
            out.append(algebra.gen(r))
    if algebra is None:
        algebra = FormAlgebra({}, 0)
    return out, algebra


def _product_of(coeffs, roots, algebra: FormAlgebra) -> FormSeries:
    out = algebra.one()
    for r in roots:
        if r.constant != 0:
            raise InvalidArgumentError("Chern roots must be nilpotent")
        out = out * (r.compose([0] + list(coeffs[1:])) + coeffs[0])
    return out


def ahat_factor(roots: Sequence, algebra: FormAlgebra | None = None) -> FormSeries:
    """prod_i (x_i/2) / sin(x_i/2), exact rational coefficients."""
    roots, algebra = _root_series(roots, algebra)
    coeffs = half_angle_ratio_coefficients(algebra.dmax)
    return _product_of(coeffs, roots, algebra)


def jv_factor(roots: Sequence, algebra: FormAlgebra | None = None) -> FormSeries:
    """prod_i (i u_i/2) / sinh(i u_i/2), built from the sinh series at argument i/2."""
    roots, algebra = _root_series(roots, algebra)
    order = algebra.dmax
    y_over_sinh = divide_series([Fraction(0), Fraction(1)], sinh_coefficients(order + 1), order)
    coeffs = [c * (0.5j) ** n for n, c in enumerate(y_over_sinh)]
    return _product_of(coeffs, roots, algebra)


def odd_chern_character(traces: Mapping[int, FormSeries], algebra: FormAlgebra | None = None) -> FormSeries:
    """sum_j c_j Tr(omega^(2j+1)) for trace data indexed by j."""
    if algebra is None:
        if not traces:
            raise InvalidArgumentError("empty trace data needs an algebra")
        algebra = next(iter(traces.values())).algebra
    out = algebra.zero()
    for j, tr in sorted(traces.items()):
        if j < 0:
            raise InvalidArgumentError("trace index must be nonnegative")
        out = out + tr * chern_coefficient(j)
    return out


# -- fixed-point data -----------------------------------------------------------

@dataclass
class FixedPointData:
    dimF: int
    angles: tuple[float, ...]
    F_roots: tuple[str, ...]
    nu_roots: tuple[str, ...]
    algebra: FormAlgebra
    chern_character: FormSeries
    integrator: dict = field(default_factory=dict)

    def __post_init__(self):
        self.angles = tuple(float(t) for t in self.angles)
        self.F_roots = tuple(self.F_roots)
        self.nu_roots = tuple(self.nu_roots)
        if self.dimF < 1 or self.dimF % 2 == 0:
            raise InvalidArgumentError(f"fixed components must have odd dimension, got {self.dimF}")
        if len(self.F_roots) != (self.dimF - 1) // 2:
            raise InvalidArgumentError(f"need {(self.dimF - 1) // 2} tangent roots, got {len(self.F_roots)}")
        if len(self.nu_roots) != len(self.angles):
            raise InvalidArgumentError("one normal root per rotation angle is required")
        if self.algebra.dmax != self.dimF:
            raise InvalidArgumentError("truncation degree must equal dimF")
        for name in self.F_roots + self.nu_roots:
            if self.algebra.degrees[self.algebra.index(name)] != 2:
                raise InvalidArgumentError(f"root {name} must be a 2-form")
        for t in self.angles:
            if math.isclose(math.remainder(t, 2 * math.pi), 0.0, abs_tol=1e-12):
                raise SingularAngleError(f"rotation angle {t} is a multiple of 2 pi")
            if not 0 < t < 2 * math.pi:
                raise InvalidArgumentError(f"angle {t} outside (0, 2 pi)")
        if self.chern_character.algebra != self.algebra:
            raise InvalidArgumentError("Chern character lives in a different algebra")
        self.integrator = {
            (k if isinstance(k, tuple) else self.algebra.monomial_key(k)): complex(v)
            for k, v in self.integrator.items()
        }

    @property
    def s(self) -> int:
        return len(self.angles)

    @property
    def codim(self) -> int:
        return 2 * self.s

    @property
    def m(self) -> int:
        return (self.dimF + self.codim - 1) // 2

    def integrate(self, form: FormSeries, atol: float = 1e-13) -> complex:
        """Apply the integrator to the top-degree part of ``form``."""
        total = 0j
        for mono, c in form.top_part().terms.items():
            if mono in self.integrator:
                total += complex(c) * self.integrator[mono]
            elif abs(complex(c)) > atol:
                raise InvalidArgumentError(
                    f"no integral supplied for monomial {self.algebra.monomial_name(mono)}"
                )
        return total


def sin_normal_factor(data: FixedPointData) -> FormSeries:
    """prod_i [2 sin((theta_i + v_i)/2)]^-1 as a truncated series."""
    out = data.algebra.one()
    for theta, name in zip(data.angles, data.nu_roots):
        half = theta / 2
        if abs(math.sin(half)) < 1e-12:
            raise SingularAngleError(f"sin({half}) vanishes")
        arg = data.algebra.gen(name) * 0.5 + half
        # derivatives of sin at theta/2 cycle through sin, cos, -sin, -cos
        cyc = (math.sin(half), math.cos(half), -math.sin(half), -math.cos(half))
        out = out * (arg.apply(lambda k: cyc[k % 4]) * 2).inverse()
    return out


def prefactor(data: FixedPointData, sign: int = GLOBAL_SIGN) -> complex:
    return sign * (-1j / (2 * math.pi)) ** (data.m + 1 - data.s)


def density_pfaffian_form(data: FixedPointData, sign: int = GLOBAL_SIGN) -> FormSeries:
    """prefactor * Ahat(F) ch(g) Pf(2 sin(SINE_UNIT (R + Theta)/2))^-1, full truncated series.

    The sine matrix is assembled from sin(A + B) = sin A cos B + cos A sin B with
    A = SINE_UNIT Theta / 2 evaluated numerically and B = SINE_UNIT R / 2 nilpotent.
    """
    alg = data.algebra
    n = data.codim
    theta = np.zeros((n, n))
    for i, t in enumerate(data.angles):
        theta[2 * i, 2 * i + 1] = t
        theta[2 * i + 1, 2 * i] = -t
    A = SINE_UNIT * theta / 2
    sinA, cosA = sinm(A), cosm(A)

    zero = alg.zero()
    B = [[zero for _ in range(n)] for _ in range(n)]
    for i, name in enumerate(data.nu_roots):
        v = alg.gen(name) * (SINE_UNIT / 2)
        B[2 * i][2 * i + 1] = v
        B[2 * i + 1][2 * i] = -v

    def matmul(X, Y):
        return [[sum((X[i][k] * Y[k][j] for k in range(n)), zero) for j in range(n)] for i in range(n)]

    ident = [[alg.one() if i == j else zero for j in range(n)] for i in range(n)]
    sinB = [[zero] * n for _ in range(n)]
    cosB = [[zero] * n for _ in range(n)]
    power = ident
    for k in range(alg.dmax + 1):
        if k:
            power = matmul(power, B)
        coeff = Fraction((-1) ** (k // 2), math.factorial(k))
        target = cosB if k % 2 == 0 else sinB
        for i in range(n):
            for j in range(n):
                target[i][j] = target[i][j] + power[i][j] * coeff

    sine = [[(sum((cosB[k][j] * complex(sinA[i][k]) + sinB[k][j] * complex(cosA[i][k]) for k in range(n)),
                  zero)) * 2 for j in range(n)] for i in range(n)]
    pf = pfaffian(sine) if n else alg.one()
    if not isinstance(pf, FormSeries):
        pf = alg.const(pf)
    body = ahat_factor(data.F_roots, alg) * data.chern_character * pf.inverse()
    return body * prefactor(data, sign)


def density_product_form(data: FixedPointData, sign: int = GLOBAL_SIGN) -> FormSeries:
    """sign * (-i/2pi)^(m+1) * ch(g) j_V(R^F) prod_i (-pi / sin((v_i + theta_i)/2))."""
    alg = data.algebra
    normal = alg.one()
    for theta, name in zip(data.angles, data.nu_roots):
        half = theta / 2
        cyc = (math.sin(half), math.cos(half), -math.sin(half), -math.cos(half))
        sine = (alg.gen(name) * 0.5 + half).apply(lambda k: cyc[k % 4])
        normal = normal * (sine.inverse() * (-math.pi))
    body = data.chern_character * jv_factor(data.F_roots, alg) * normal
    return body * (sign * (-1j / (2 * math.pi)) ** (data.m + 1))


def lefschetz_contribution(data: FixedPointData, sign: int = GLOBAL_SIGN) -> complex:
    """Contribution of one fixed component, using the closed-form normal factor."""
    alg = data.algebra
    inv_pf = sin_normal_factor(data) * (SINE_UNIT ** (-data.s))
    density = ahat_factor(data.F_roots, alg) * data.chern_character * inv_pf
    return prefactor(data, sign) * data.integrate(density)


def lefschetz_number(components: Sequence[FixedPointData], sign: int = GLOBAL_SIGN) -> complex:
    """Sum over fixed components; an empty fixed-point set gives exactly 0."""
    return sum((lefschetz_contribution(c, sign) for c in components), 0j)


# -- circle data and calibration ----------------------------------------------

def circle_trace_integral(loop, points: int | None = None) -> complex:
    """int_0^{2pi} Tr(g^-1 g') dtheta; the trapezoid rule is exact for the trig polynomial."""
    if points is None:
        points = 4 * loop.degree + 4
    theta = np.linspace(0, 2 * np.pi, points, endpoint=False)
    vals = np.trace(loop.log_derivative(theta), axis1=1, axis2=2)
    return complex(np.mean(vals) * 2 * np.pi)


def circle_fixed_point_data(loop) -> FixedPointData:
    """M = S^1 fixed by the identity: ch(g) = Tr(g^-1 dg), integrated numerically."""
    alg = FormAlgebra({"dtheta": 1}, 1)
    return FixedPointData(
        dimF=1, angles=(), F_roots=(), nu_roots=(), algebra=alg,
        chern_character=alg.gen("dtheta"),
        integrator={(1,): circle_trace_integral(loop)},
    )


def calibrate_circle(loop, Lambda: int = 64) -> tuple[complex, int]:
    """(raw fixed-point value with sign +1, numeric Toeplitz index) for the full circle."""
    from ..circle import CircleModel, equivariant_index

    raw = lefschetz_contribution(circle_fixed_point_data(loop), sign=1)
    index = equivariant_index(CircleModel(loop, max(Lambda, 8 * (loop.degree + 1)))).dimension
    return raw, index


# -- file format ----------------------------------------------------------------

def _parse_number(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InvalidArgumentError(f"complex entry must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", ""))
    return complex(x)


def _series_from_json(alg: FormAlgebra, terms) -> FormSeries:
    out = {}
    for t in terms:
        key = alg.monomial_key(t.get("monomial", {}))
        out[key] = out.get(key, 0) + _parse_number(t["coeff"])
    return FormSeries(alg, out)


def fixed_point_from_json(data: dict) -> FixedPointData:
    try:
        dimF = int(data["dimF"])
        angles = [float(t) for t in data.get("angles", [])]
        if "codim" in data and int(data["codim"]) != 2 * len(angles):
            raise InvalidArgumentError("codim must be twice the number of angles")
        F_roots = list(data.get("F_roots", []))
        nu_roots = list(data.get("nu_roots", []))
        gens = {r: 2 for r in F_roots + nu_roots}
        for name, deg in data.get("generators", {}).items():
            if name in gens:
                raise InvalidArgumentError(f"generator {name} declared twice")
            gens[name] = int(deg)
        alg = FormAlgebra(gens, dimF)
        if "chern_traces" in data:
            traces = {int(j): _series_from_json(alg, terms) for j, terms in data["chern_traces"].items()}
            ch = odd_chern_character(traces, alg)
        else:
            ch = _series_from_json(alg, data["chern_character"])
        integrator = {
            alg.monomial_key(t["monomial"]): _parse_number(t["value"]) for t in data.get("integrator", [])
        }
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidArgumentError):
            raise
        raise InvalidArgumentError(f"malformed fixed-point data: {exc}") from exc
    return FixedPointData(dimF, tuple(angles), tuple(F_roots), tuple(nu_roots), alg, ch, integrator)


def load_fixed_points(path) -> list[FixedPointData]:
    """A file holds either one component or {"components": [...]}."""
    with open(Path(path), encoding="utf-8") as fh:
        data = json.load(fh)
    comps = data["components"] if isinstance(data, dict) and "components" in data else [data]
    return [fixed_point_from_json(c) for c in comps]
