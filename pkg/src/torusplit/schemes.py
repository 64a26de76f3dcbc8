"""Splitting-scheme catalog and the time-stepping propagator.

A scheme is an ordered list of stages. Laplacian stages act diagonally in
Fourier space; the potential phase acts by collocation (transform to the
physical grid, multiply by a unimodular phase, transform back). Every
stage is an exact discrete L2 isometry, so the propagator conserves the
L2 norm to rounding.

Stage phases on mode k (with the convention that -Laplacian has symbol
+k^2):

    resolvent, scale g:  exp(2i arctan(g h k^2 / 2))   (midpoint/Cayley)
    exact, scale g:      exp(i g h k^2)
    potential, scale t:  pointwise exp(i t h V(x_j))
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .grids import FourierField, PotentialSpec, SpectralGrid
from .operators import SpectralOperator, dft_matrix

__all__ = [
    "StageKind",
    "Stage",
    "Scheme",
    "stability_function",
    "builtin_scheme",
    "scheme_names",
    "step",
    "evolve",
    "scheme_matrix",
    "resolvent_scales",
]

_CONSISTENCY_TOL = 1e-12


class StageKind(Enum):
    POTENTIAL = "P"
    RESOLVENT = "R"
    EXACT = "E"


@dataclass(frozen=True)
class Stage:
    kind: StageKind
    scale: float

    def __post_init__(self):
        if not math.isfinite(self.scale):
            raise ValueError("stage scale must be finite")
        if self.kind is not StageKind.POTENTIAL and self.scale == 0.0:
            raise ValueError("Laplacian stage scale must be nonzero")


@dataclass(frozen=True)
class Scheme:
    """Ordered stage list, stored in application order (first applied first)."""

    name: str
    stages: tuple
    declared_order: int

    def __post_init__(self):
        stages = tuple(self.stages)
        if not stages:
            raise ValueError("a scheme needs at least one stage")
        lap = sum(s.scale for s in stages if s.kind is not StageKind.POTENTIAL)
        pot = sum(s.scale for s in stages if s.kind is StageKind.POTENTIAL)
        if abs(lap - 1.0) > _CONSISTENCY_TOL:
            raise ValueError(f"Laplacian stage scales sum to {lap}, expected 1")
        if abs(pot - 1.0) > _CONSISTENCY_TOL:
            raise ValueError(f"potential stage scales sum to {pot}, expected 1")
        object.__setattr__(self, "stages", stages)

    def reversed(self) -> "Scheme":
        """Adjoint stage order (the product read the other way)."""
        return Scheme(self.name + "-reversed-stages", tuple(reversed(self.stages)),
                      self.declared_order)


def stability_function(z: complex) -> complex:
    """Midpoint/Cayley rational approximation R(z) = (1 + z/2) / (1 - z/2)."""
    if z == 2:
        raise ZeroDivisionError("R has a pole at z = 2")
    return (1.0 + z / 2.0) / (1.0 - z / 2.0)


def _strang_composition(gammas: Sequence[float]) -> tuple:
    """Symmetric composition of the order-2 palindrome P(g/2) R(g) P(g/2)."""
    stages = []
    for g in reversed(gammas):  # application order: rightmost factor first
        stages += [Stage(StageKind.POTENTIAL, g / 2.0),
                   Stage(StageKind.RESOLVENT, g),
                   Stage(StageKind.POTENTIAL, g / 2.0)]
    return tuple(stages)


_CBRT2 = 2.0 ** (1.0 / 3.0)
TRIPLE_JUMP = (1.0 / (2.0 - _CBRT2), -_CBRT2 / (2.0 - _CBRT2), 1.0 / (2.0 - _CBRT2))

# Yoshida's order-6 symmetric composition, solution A (s = 7).
_YOSHIDA_W = (-1.17767998417887, 0.235573213359357, 0.784513610477560)
YOSHIDA6 = (
    _YOSHIDA_W[2], _YOSHIDA_W[1], _YOSHIDA_W[0],
    1.0 - 2.0 * sum(_YOSHIDA_W),
    _YOSHIDA_W[0], _YOSHIDA_W[1], _YOSHIDA_W[2],
)

# Suzuki & Umeno order-8 symmetric composition (s = 15).
_SUZUKI_W = (
    0.74167036435061295344822780,
    -0.40910082580003159399730010,
    0.19075471029623837995387626,
    -0.57386247111608226665638773,
    0.29906418130365592384446354,
    0.33462491824529818378495798,
    0.31529309239676659663205666,
)
SUZUKI8 = tuple(reversed(_SUZUKI_W)) + (1.0 - 2.0 * sum(_SUZUKI_W),) + _SUZUKI_W


def _catalog() -> dict:
    p, r, e = StageKind.POTENTIAL, StageKind.RESOLVENT, StageKind.EXACT
    return {
        # exp(ihV) R(-ih Lap): resolvent applied first.
        "lie-midpoint": Scheme("lie-midpoint",
                               (Stage(r, 1.0), Stage(p, 1.0)), 1),
        # R(-ih Lap) exp(ihV)
        "lie-midpoint-reversed": Scheme("lie-midpoint-reversed",
                                        (Stage(p, 1.0), Stage(r, 1.0)), 1),
        # exp(ihV/2) R(-ih Lap) exp(ihV/2)
        "strang-v-outside": Scheme("strang-v-outside",
                                   (Stage(p, 0.5), Stage(r, 1.0), Stage(p, 0.5)), 2),
        # R(-ih Lap/2) exp(ihV) R(-ih Lap/2)
        "strang-r-outside": Scheme("strang-r-outside",
                                   (Stage(r, 0.5), Stage(p, 1.0), Stage(r, 0.5)), 2),
        # exp(-ih Lap) exp(ihV): exact Laplacian flow, potential kick first.
        "exact-splitting": Scheme("exact-splitting",
                                  (Stage(p, 1.0), Stage(e, 1.0)), 1),
        "tj4": Scheme("tj4", _strang_composition(TRIPLE_JUMP), 4),
        "yoshida6": Scheme("yoshida6", _strang_composition(YOSHIDA6), 6),
        "suzuki8": Scheme("suzuki8", _strang_composition(SUZUKI8), 8),
    }


_CATALOG = _catalog()


def scheme_names() -> list:
    return list(_CATALOG)


def builtin_scheme(name: str) -> Scheme:
    try:
        return _CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown scheme {name!r} (known: {', '.join(_CATALOG)})")


def resolvent_scales(scheme: Scheme) -> list:
    """Scales of the resolvent stages, in application order."""
    return [s.scale for s in scheme.stages if s.kind is StageKind.RESOLVENT]


def _laplacian_phase(stage: Stage, h: float, k2: np.ndarray) -> np.ndarray:
    if stage.kind is StageKind.RESOLVENT:
        return 2.0 * np.arctan(stage.scale * h * k2 / 2.0)
    return stage.scale * h * k2


def compile_stages(scheme: Scheme, h: float, grid: SpectralGrid,
                   v: PotentialSpec) -> list:
    """Fuse the stage list into a minimal list of ('diag'|'pot', factor) ops.

    Adjacent Laplacian stages multiply into one diagonal phase; adjacent
    potential stages add their scales. Factors are the unimodular
    multipliers applied to the Fourier coefficients / physical samples.
    """
    if h == 0:
        raise ValueError("h must be nonzero")
    k2 = grid.modes.astype(float) ** 2
    vx = v.sample(grid)
    ops = []  # (kind, accumulated phase array)
    for stage in scheme.stages:
        if stage.kind is StageKind.POTENTIAL:
            phase = stage.scale * h * vx
            kind = "pot"
        else:
            phase = _laplacian_phase(stage, h, k2)
            kind = "diag"
        if ops and ops[-1][0] == kind:
            ops[-1] = (kind, ops[-1][1] + phase)
        else:
            ops.append((kind, phase))
    return [(kind, np.exp(1j * phase)) for kind, phase in ops]


def _apply_ops(ops: list, coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.shape[0]
    for kind, factor in ops:
        if kind == "diag":
            coeffs = coeffs * factor
        else:
            samples = np.fft.ifft(np.fft.ifftshift(coeffs)) * n
            samples *= factor
            coeffs = np.fft.fftshift(np.fft.fft(samples)) / n
    return coeffs


def step(scheme: Scheme, u: FourierField, h: float, v: PotentialSpec) -> FourierField:
    """One time step of the scheme."""
    if h <= 0:
        raise ValueError("h must be positive")
    ops = compile_stages(scheme, h, u.grid, v)
    return FourierField(u.grid, _apply_ops(ops, u.coeffs.copy()))


Observer = Callable[[int, FourierField], None]


def evolve(scheme: Scheme, u0: FourierField, h: float, nsteps: int,
           v: PotentialSpec, observers: Iterable[Observer] = (),
           stride: int = 1) -> FourierField:
    """Iterate step() nsteps times; observers see (step index, field).

    Observers are invoked at step 0 (the initial state) and then every
    `stride` steps and at the final step. They must not mutate the field.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if nsteps < 0:
        raise ValueError("nsteps must be >= 0")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    observers = tuple(observers)
    ops = compile_stages(scheme, h, u0.grid, v)
    coeffs = u0.coeffs.copy()
    grid = u0.grid
    for obs in observers:
        obs(0, u0)
    for n in range(1, nsteps + 1):
        coeffs = _apply_ops(ops, coeffs)
        if observers and (n % stride == 0 or n == nsteps):
            field = FourierField(grid, coeffs)
            for obs in observers:
                obs(n, field)
    return FourierField(grid, coeffs)


def scheme_matrix(scheme: Scheme, h: float, grid: SpectralGrid,
                  v: PotentialSpec) -> SpectralOperator:
    """Dense one-step unitary whose action equals step()."""
    e = dft_matrix(grid)
    einv = e.conj().T / grid.size
    ops = compile_stages(scheme, h, grid, v)
    mat = np.eye(grid.size, dtype=complex)
    for kind, factor in ops:
        if kind == "diag":
            mat = factor[:, None] * mat
        else:
            mat = einv @ (factor[:, None] * (e @ mat))
    return SpectralOperator(grid, mat)
