"""Scalar and equivariant spectral flow of sampled Hermitian paths.

The flow through a level c is computed per isotypic block as the drop of the
counting function N_{<c} between the endpoints.  Each block is a Hermitian path
in its own right, so scalar counting suffices there and the isotypic label of
every crossing comes for free.  Between consecutive samples the change of the
counting function is certified against the number of eigenvalues inside a
guard window around the level; uncertified intervals are bisected through the
family's refiner.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .equispec import GroupAction, RepElement
from .errors import (
    InsufficientResolutionError,
    InvalidArgumentError,
    LevelSelectionError,
    NonConvergenceError,
)

log = logging.getLogger(__name__)

DEFAULT_GRID = 33
MAX_DEPTH = 20
MAX_DELTA = 0.5
LEVEL_MARGIN = 1e-6
# With a factor >= 1 Weyl's inequality makes every interval certify; smaller
# factors demand finer sampling near crossings.
GUARD_FACTOR = 2.0


class OperatorFamily:
    """A path u -> D_u on [0, 1] of Hermitian matrices commuting with ``action``."""

    def __init__(self, samples, action: GroupAction,
                 refiner: Optional[Callable[[float], np.ndarray]] = None,
                 check: bool = True,
                 velocity: Optional[Callable[[float], np.ndarray]] = None):
        samples = [(float(u), np.asarray(D, dtype=complex)) for u, D in samples]
        if len(samples) < 2:
            raise InvalidArgumentError("a family needs at least the two endpoint samples")
        us = [u for u, _ in samples]
        if us[0] != 0.0 or us[-1] != 1.0:
            raise InvalidArgumentError("samples must start at u=0 and end at u=1")
        if any(b <= a for a, b in zip(us, us[1:])):
            raise InvalidArgumentError("sample parameters must be strictly increasing")
        dim = samples[0][1].shape
        for _, D in samples:
            if D.shape != dim or D.shape != (action.dim, action.dim):
                raise InvalidArgumentError("all samples must share the action's dimension")
            if check:
                action.check_equivariant(D)
        self.samples = samples
        self.action = action
        self.refiner = refiner
        self.velocity = velocity

    @classmethod
    def from_function(cls, fn: Callable[[float], np.ndarray], action: GroupAction,
                      grid: int = DEFAULT_GRID, check: bool = True,
                      velocity: Optional[Callable[[float], np.ndarray]] = None) -> "OperatorFamily":
        us = np.linspace(0.0, 1.0, grid)
        return cls([(u, fn(u)) for u in us], action, refiner=fn, check=check, velocity=velocity)

    @classmethod
    def linear(cls, D0: np.ndarray, D1: np.ndarray, action: GroupAction,
               grid: int = DEFAULT_GRID) -> "OperatorFamily":
        D0 = np.asarray(D0, dtype=complex)
        D1 = np.asarray(D1, dtype=complex)
        step = D1 - D0
        return cls.from_function(lambda u: (1 - u) * D0 + u * D1, action, grid,
                                 velocity=lambda u: step)

    @property
    def start(self) -> np.ndarray:
        return self.samples[0][1]

    @property
    def end(self) -> np.ndarray:
        return self.samples[-1][1]

    def at(self, u: float) -> np.ndarray:
        if self.refiner is None:
            raise InsufficientResolutionError("family has no refiner")
        return np.asarray(self.refiner(u), dtype=complex)

    def reversed(self) -> "OperatorFamily":
        samples = [(1.0 - u, D) for u, D in reversed(self.samples)]
        fn = None if self.refiner is None else (lambda u, f=self.refiner: f(1.0 - u))
        vel = None if self.velocity is None else (lambda u, v=self.velocity: -v(1.0 - u))
        return OperatorFamily(samples, self.action, fn, check=False, velocity=vel)

    def restricted(self, a: float, b: float) -> "OperatorFamily":
        """The sub-path on [a, b], rescaled to [0, 1]; requires a refiner."""
        fn = self.refiner
        if fn is None:
            raise InsufficientResolutionError("restriction needs a refiner")
        grid = len(self.samples)
        vel = None if self.velocity is None else (lambda t, v=self.velocity: (b - a) * v(a + (b - a) * t))
        return OperatorFamily.from_function(lambda t: fn(a + (b - a) * t), self.action, grid,
                                            check=False, velocity=vel)


@dataclass(frozen=True)
class Crossing:
    u_left: float
    u_right: float
    character: int
    count: int  # signed; positive means eigenvalues moved up through the level


@dataclass
class FlowResult:
    scalar_flow: int
    equivariant_flow: RepElement
    level: float
    crossings: list[Crossing] = field(default_factory=list)
    refinements: int = 0


def _count_below(vals: np.ndarray, level: float) -> int:
    return int(np.searchsorted(vals, level, side="left"))


def _block_motion(action: GroupAction, delta: np.ndarray) -> float:
    """Largest spectral norm over isotypic blocks; bounds every eigenvalue's motion (Weyl)."""
    out = 0.0
    for j in range(action.p):
        blk = action.block(delta, j)
        if blk.size:
            w = np.linalg.eigvalsh((blk + blk.conj().T) / 2)
            out = max(out, float(np.max(np.abs(w))))
    return out


def choose_level(family: OperatorFamily, max_delta: float = MAX_DELTA,
                 zero_tol: float = 1e-9) -> float:
    """Return -delta with delta half the smallest nonzero |eigenvalue| at the endpoints.

    When both endpoints are invertible the level is 0.
    """
    ends = [np.linalg.eigvalsh(family.start), np.linalg.eigvalsh(family.end)]
    scale = max(1.0, max(np.max(np.abs(e)) if e.size else 0.0 for e in ends))
    tol = zero_tol * scale
    invertible = all(e.size == 0 or np.min(np.abs(e)) > tol for e in ends)
    if invertible:
        return 0.0
    nonzero = np.concatenate([np.abs(e)[np.abs(e) > tol] for e in ends])
    if nonzero.size == 0:
        raise LevelSelectionError("endpoint spectra are identically zero; no admissible level")
    delta = min(0.5 * float(np.min(nonzero)), max_delta)
    level = -delta
    for e in ends:
        if e.size and np.min(np.abs(e - level)) < LEVEL_MARGIN:
            raise LevelSelectionError(f"endpoint eigenvalue sits at the candidate level {level}")
    return level


def spectral_flow_per_character(family: OperatorFamily, level: float | None = None,
                                max_depth: int = MAX_DEPTH,
                                guard_factor: float = GUARD_FACTOR) -> FlowResult:
    action = family.action
    p = action.p
    if level is None:
        level = choose_level(family)

    # eigen-data per sample, per block
    us = [u for u, _ in family.samples]
    mats = [D for _, D in family.samples]
    eigs = [[np.linalg.eigvalsh(action.block(D, j)) for j in range(p)] for D in mats]

    for k in (0, -1):
        for vals in eigs[k]:
            if vals.size and np.min(np.abs(vals - level)) < LEVEL_MARGIN:
                raise LevelSelectionError(f"endpoint eigenvalue within {LEVEL_MARGIN} of level {level}")

    crossings: list[Crossing] = []
    refinements = 0
    depths = [0] * (len(us) - 1)
    i = 0
    while i < len(us) - 1:
        guard = guard_factor * _block_motion(action, mats[i + 1] - mats[i])
        ok = True
        for j in range(p):
            a, b = eigs[i][j], eigs[i + 1][j]
            dn = _count_below(a, level) - _count_below(b, level)
            window = max(
                int(np.count_nonzero(np.abs(a - level) <= guard)),
                int(np.count_nonzero(np.abs(b - level) <= guard)),
            )
            if abs(dn) > window:
                ok = False
                break
        if ok:
            for j in range(p):
                dn = _count_below(eigs[i][j], level) - _count_below(eigs[i + 1][j], level)
                if dn:
                    crossings.append(Crossing(us[i], us[i + 1], j, dn))
            i += 1
            continue
        if family.refiner is None:
            raise InsufficientResolutionError(
                f"cannot certify the flow on [{us[i]}, {us[i + 1]}] without a refiner"
            )
        d = depths[i] + 1
        if d > max_depth:
            raise NonConvergenceError(f"bisection depth cap {max_depth} exceeded near u={us[i]}")
        um = 0.5 * (us[i] + us[i + 1])
        Dm = family.at(um)
        us.insert(i + 1, um)
        mats.insert(i + 1, Dm)
        eigs.insert(i + 1, [np.linalg.eigvalsh(action.block(Dm, j)) for j in range(p)])
        depths[i:i + 1] = [d, d]
        refinements += 1
        log.debug("refined interval at u=%.6g (depth %d)", um, d)

    flows = [0] * p
    for c in crossings:
        flows[c.character] += c.count
    total = [_count_below(eigs[0][j], level) - _count_below(eigs[-1][j], level) for j in range(p)]
    assert total == flows
    crossings.sort(key=lambda c: (c.u_left, c.character))
    return FlowResult(sum(flows), RepElement(tuple(flows)), float(level), crossings, refinements)


def spectral_flow(family: OperatorFamily, level: float | None = None) -> FlowResult:
    return spectral_flow_per_character(family, level)


def homotopy_invariance_check(family_a: OperatorFamily, family_b: OperatorFamily,
                              level: float | None = None, atol: float = 1e-10) -> bool:
    if family_a.action.p != family_b.action.p or family_a.action.dim != family_b.action.dim:
        raise InvalidArgumentError("families carry different group actions")
    if not np.allclose(family_a.action.U, family_b.action.U, atol=atol):
        raise InvalidArgumentError("families carry different group actions")
    for x, y in ((family_a.start, family_b.start), (family_a.end, family_b.end)):
        if x.shape != y.shape or np.max(np.abs(x - y)) > atol:
            raise InvalidArgumentError("families do not share their endpoints")
    if level is None:
        level = choose_level(family_a)
    fa = spectral_flow_per_character(family_a, level)
    fb = spectral_flow_per_character(family_b, level)
    return fa.equivariant_flow == fb.equivariant_flow
