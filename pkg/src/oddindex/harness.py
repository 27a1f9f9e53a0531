"""Scenario configuration, verification suites and reports."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import charclass
from .charclass.lefschetz import _parse_number as parse_number
from .circle import CircleModel, MatrixLoop, d_path, kernel_cokernel, loop_from_json, p_path, winding_number
from .clifford import build_algebra, spin_rep, trace_spin_via_symbol
from .equispec import character_trace
from .errors import ConfigurationError, OddIndexError
from .eta import admissible_epsilons, heat_index_integral, variation_check
from .specflow import DEFAULT_GRID, spectral_flow_per_character

SCHEMA_VERSION = 1
VARIATION_POINTS = (0.3711, 0.2903, 0.6137, 0.8219)
SUITES = ("clifford", "index", "specflow", "eta", "lefschetz")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


@dataclass
class Scenario:
    Lambda: int = 64
    p: Optional[int] = None
    k: int = 1
    loop: Optional[dict] = None
    loop_file: Optional[str] = None
    grid: int = DEFAULT_GRID
    delta: Optional[float] = None
    epsilons: Optional[list] = None
    quad_order: int = 32
    h_power: Optional[int] = None
    fixed_points: Optional[str] = None
    clifford_dims: list = field(default_factory=lambda: [3, 5, 7])
    clifford_samples: int = 200
    checks: list = field(default_factory=lambda: list(SUITES))
    output: Optional[str] = None
    seed: int = 0

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**data)

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("output")
        return out


@dataclass
class Prepared:
    """A validated scenario with its loop and model built."""

    scenario: Scenario
    loop: MatrixLoop
    p: int
    model: CircleModel
    epsilons: list


def prepare(s: Scenario) -> Prepared:
    """Validate parameters; every problem surfaces as a ConfigurationError."""
    for name in s.checks:
        if name not in SUITES:
            raise ConfigurationError(f"unknown check {name!r}; choose from {', '.join(SUITES)}")
    try:
        if s.loop_file is not None:
            path = Path(s.loop_file)
            if not path.is_file():
                raise ConfigurationError(f"loop file not found: {path}")
            data = json.loads(path.read_text(encoding="utf-8"))
        elif s.loop is not None:
            data = dict(s.loop)
        else:
            data = {"N": 1, "terms": [{"j": s.k, "matrix": [[1]]}]}
        if s.p is not None:
            data["p"] = s.p
        loop, p = loop_from_json(data)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"loop file is not valid JSON: {exc}") from exc
    except OddIndexError as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(str(exc)) from exc

    guard = 8 * (loop.degree + 1)
    if s.Lambda < guard:
        raise ConfigurationError(f"Lambda={s.Lambda} is inside the guard band; need >= {guard}")
    if s.grid < 2:
        raise ConfigurationError("grid needs at least 2 samples")
    if s.quad_order < 1:
        raise ConfigurationError("quadrature order must be positive")
    if s.delta is not None and not 0 < s.delta <= 0.5:
        raise ConfigurationError("delta must lie in (0, 1/2]")
    if s.h_power is not None and not 0 <= s.h_power < p:
        raise ConfigurationError(f"h_power must lie in [0, {p})")
    lo, hi = admissible_epsilons(s.Lambda)
    eps = list(s.epsilons) if s.epsilons else [lo, 2 * lo]
    for e in eps:
        if not lo * (1 - 1e-12) <= e <= hi * (1 + 1e-12):
            raise ConfigurationError(f"epsilon {e} outside the window [{lo:.4g}, {hi:.4g}]")
    if "lefschetz" in s.checks and s.fixed_points is not None and not Path(s.fixed_points).is_file():
        raise ConfigurationError(f"fixed-point file not found: {s.fixed_points}")
    for n in s.clifford_dims:
        if n % 2 == 0 or not 3 <= n <= 11:
            raise ConfigurationError(f"Clifford dimension {n} must be odd in [3, 11]")
    return Prepared(s, loop, p, CircleModel(loop, s.Lambda, p), eps)


# -- records -------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


@dataclass
class Record:
    name: str
    inputs: dict
    computed: object
    oracle: object
    tolerance: float
    passed: bool
    error: Optional[str] = None

    def to_json(self) -> dict:
        return _jsonable(asdict(self))


@dataclass
class Report:
    scenario: dict
    records: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_FAIL

    def to_json(self, include_timing: bool = True) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "scenario": _jsonable(self.scenario),
            "records": [r.to_json() for r in self.records],
            "summary": {
                "total": len(self.records),
                "failed": sum(not r.passed for r in self.records),
                "passed": self.passed,
            },
        }
        if include_timing:
            out["timing"] = dict(self.timing)
        return out

    def dumps(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_json(include_timing), sort_keys=True, indent=2) + "\n"


def _close(a, b, tol: float) -> bool:
    return bool(np.max(np.abs(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)), initial=0.0) <= tol)


# -- suites --------------------------------------------------------------------

def suite_clifford(prep: Prepared) -> list[Record]:
    s = prep.scenario
    rng = np.random.default_rng(s.seed)
    out = []
    for n in s.clifford_dims:
        alg = build_algebra(n)
        worst = 0.0
        for _ in range(s.clifford_samples):
            a = alg.random_element(rng)
            worst = max(worst, abs(trace_spin_via_symbol(a) - np.trace(spin_rep(a))))
        out.append(Record(f"clifford-trace n={n}", {"n": n, "samples": s.clifford_samples},
                          worst, 0.0, 1e-10, worst <= 1e-10))
    return out


def _index(prep: Prepared):
    ker, coker = kernel_cokernel(prep.model)
    return ker, coker, ker - coker


def suite_index(prep: Prepared) -> list[Record]:
    ker, coker, ind = _index(prep)
    w = winding_number(prep.loop)
    inputs = {"Lambda": prep.model.Lambda, "N": prep.loop.N, "p": prep.p}
    return [Record("index-winding", inputs,
                   {"index": ind.as_list(), "kernel": ker.as_list(), "cokernel": coker.as_list(),
                    "total": ind.dimension},
                   {"total": -w}, 0.0, ind.dimension == -w)]


def suite_specflow(prep: Prepared) -> list[Record]:
    s = prep.scenario
    level = None if s.delta is None else -s.delta
    _, _, ind = _index(prep)
    inputs = {"grid": s.grid, "delta": s.delta, "p": prep.p}
    fd = spectral_flow_per_character(d_path(prep.model, s.grid), level)
    # the sign path has endpoint spectrum {-1, 1}; any level in (-1, 0) is admissible
    fp = spectral_flow_per_character(p_path(prep.model, s.grid), -0.5 if level is None else level)
    return [
        Record("dirac-flow = -index", inputs, {"flow": fd.equivariant_flow.as_list(), "level": fd.level},
               {"flow": (-ind).as_list()}, 0.0, fd.equivariant_flow == -ind),
        Record("sign-flow = dirac-flow", inputs, {"flow": fp.equivariant_flow.as_list(), "level": fp.level},
               {"flow": fd.equivariant_flow.as_list()}, 0.0, fp.equivariant_flow == fd.equivariant_flow),
    ]


def suite_eta(prep: Prepared) -> list[Record]:
    s = prep.scenario
    _, _, ind = _index(prep)
    fam = d_path(prep.model, s.grid)
    hs = [s.h_power] if s.h_power is not None else list(range(prep.p))
    hi = admissible_epsilons(s.Lambda)[1]
    out = []
    cache = {}

    def heat(h, eps):
        if (h, eps) not in cache:
            cache[h, eps] = heat_index_integral(fam, h, eps, s.quad_order, real=False)
        return cache[h, eps]

    for h in hs:
        target = character_trace(ind, h)
        for eps in prep.epsilons:
            val = heat(h, eps)
            out.append(Record(f"heat-integral h={h} eps={eps:.6g}",
                              {"h_power": h, "epsilon": eps, "quad_order": s.quad_order},
                              val, target, 1e-3, _close(val, target, 1e-3)))
            if 2 * eps <= hi * (1 + 1e-12):
                drift = abs(heat(h, 2 * eps) - val)
                out.append(Record(f"heat-drift h={h} eps={eps:.6g}", {"h_power": h, "epsilon": eps},
                                  drift, 0.0, 1e-4, drift <= 1e-4))
        # d eta_eps along the Dirac path; the identity holds with d eta = -2 alpha
        # away from zero eigenvalues, where eta_eps jumps
        u = next(x for x in VARIATION_POINTS if np.min(np.abs(np.linalg.eigvalsh(fam.at(x)))) > 1e-2)
        D, X = fam.at(u), prep.model.dirac_velocity
        fd, two_alpha = variation_check(D, X, prep.model.action, h, prep.epsilons[0])
        rel = abs(fd + two_alpha) / max(abs(two_alpha), 1.0)
        out.append(Record(f"eta-variation h={h}", {"h_power": h, "epsilon": prep.epsilons[0], "u": u},
                          fd, -two_alpha, 1e-5, rel <= 1e-5))
    return out


def suite_lefschetz(prep: Prepared) -> list[Record]:
    s = prep.scenario
    out = []
    _, _, ind = _index(prep)
    full = charclass.lefschetz_contribution(charclass.circle_fixed_point_data(prep.loop))
    out.append(Record("lefschetz full circle h=e", {"N": prep.loop.N}, full, ind.dimension, 1e-8,
                      _close(full, ind.dimension, 1e-8)))
    for h in range(1, prep.p):
        val = charclass.lefschetz_number([])
        target = character_trace(ind, h)
        out.append(Record(f"lefschetz fixed-point-free h={h}", {"h_power": h}, val, target, 1e-8,
                          _close(val, target, 1e-8)))
    if s.fixed_points is not None:
        comps = charclass.load_fixed_points(s.fixed_points)
        raw = json.loads(Path(s.fixed_points).read_text(encoding="utf-8"))
        total = charclass.lefschetz_number(comps)
        cross = sum((c.integrate(charclass.density_pfaffian_form(c)) for c in comps), 0j)
        out.append(Record("lefschetz fixed-point file", {"file": s.fixed_points, "components": len(comps)},
                          total, cross, 1e-10, _close(total, cross, 1e-10)))
        if isinstance(raw, dict) and "expected" in raw:
            exp = parse_number(raw["expected"])
            out.append(Record("lefschetz expected value", {"file": s.fixed_points}, total, exp, 1e-8,
                              _close(total, exp, 1e-8)))
    return out


SUITE_FUNCS: dict[str, Callable[[Prepared], list[Record]]] = {
    "clifford": suite_clifford,
    "index": suite_index,
    "specflow": suite_specflow,
    "eta": suite_eta,
    "lefschetz": suite_lefschetz,
}


def run_scenario(s: Scenario) -> Report:
    """Run the requested checks in declared order; raises ConfigurationError on bad input."""
    prep = prepare(s)
    report = Report(s.echo())
    for name in s.checks:
        t0 = time.perf_counter()
        try:
            records = SUITE_FUNCS[name](prep)
        except OddIndexError as exc:
            records = [Record(name, {}, None, None, 0.0, False, f"{type(exc).__name__}: {exc}")]
        report.timing[name] = round(time.perf_counter() - t0, 6)
        report.records.extend(records)
    return report


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, (complex, np.complexfloating)):
        if abs(x.imag) < 1e-12:
            return f"{x.real:.6g}"
        return f"{x.real:.6g}{x.imag:+.6g}j"
    if isinstance(x, (float, np.floating)):
        return f"{x:.6g}"
    if isinstance(x, dict):
        return " ".join(f"{k}={_fmt(v)}" for k, v in x.items())
    if isinstance(x, (list, tuple)):
        return "[" + ",".join(_fmt(v) for v in x) + "]"
    return str(x)


def format_table(report: Report) -> str:
    rows = [("check", "computed", "oracle", "tol", "status")]
    for r in report.records:
        status = "pass" if r.passed else "FAIL"
        computed = r.error if r.error else _fmt(r.computed)
        rows.append((r.name, computed, _fmt(r.oracle), f"{r.tolerance:g}", status))
    widths = [max(len(row[i]) for row in rows) for i in range(5)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    failed = sum(not r.passed for r in report.records)
    lines.append(f"{len(report.records)} checks, {failed} failed")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, path: str | None = None, stream=None) -> None:
    """Write the JSON report (if a path is given) and print the table."""
    if path is not None:
        try:
            Path(path).write_text(report.dumps(), encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    if stream is not None:
        stream.write(format_table(report))
