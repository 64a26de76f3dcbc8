"""Experiment drivers: stepsize sweeps, resonance prediction, diagnostics.

The reference setup used throughout is the one all quantitative checks
target: d = 1, cutoff K = 64, truncation band 20 for the H1 observable,
final time T = 50, 200 log-spaced stepsizes in [0.01, 0.1], initial data
"bump" and potential "cos-sin6".
"""

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .grids import (
    FourierField,
    PotentialSpec,
    SpectralGrid,
    l2_norm,
    make_grid,
    synthesize_initial,
    truncated_h1_norm,
)
from .modified_energy import exact_energy
from .operators import SpectralOperator, collocation_potential_operator, quadratic_form
from .schemes import Scheme, builtin_scheme, evolve

__all__ = [
    "SweepRow",
    "SweepResult",
    "TimeSeries",
    "BoundReport",
    "default_h_grid",
    "oscillation_sweep",
    "frequency_split",
    "uniform_bound_check",
    "resonance_predict",
    "resonant_stepsizes",
    "convergence_order",
    "reference_propagator",
    "energy_drift_series",
]


@dataclass(frozen=True)
class SweepRow:
    h: float
    oscillation: float
    l2_drift: float
    seconds: float


@dataclass(frozen=True)
class SweepResult:
    scheme: str
    rows: tuple

    @property
    def oscillations(self) -> np.ndarray:
        return np.array([r.oscillation for r in self.rows])

    def spikes(self, factor: float = 10.0) -> list:
        """h values whose oscillation exceeds factor x median."""
        med = float(np.median(self.oscillations))
        return [r.h for r in self.rows if r.oscillation >= factor * med]


@dataclass
class TimeSeries:
    steps: np.ndarray
    times: np.ndarray
    observables: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BoundReport:
    passed: bool
    first_half_max: float
    second_half_max: float
    series: np.ndarray


def default_h_grid(h_min: float = 0.01, h_max: float = 0.1,
                   count: int = 200) -> np.ndarray:
    return np.geomspace(h_min, h_max, count)


def _sweep_one(args):
    scheme_name, h, t_final, grid_cutoff, u0_coeffs, v_coeffs, band = args
    grid = make_grid(1, grid_cutoff)
    u0 = FourierField(grid, u0_coeffs)
    v = PotentialSpec(v_coeffs)
    scheme = builtin_scheme(scheme_name) if isinstance(scheme_name, str) else scheme_name
    nsteps = int(round(t_final / h))
    values = np.empty(nsteps + 1)

    def record(n, u):
        values[n] = truncated_h1_norm(u, band)

    start = time.perf_counter()
    final = evolve(scheme, u0, h, nsteps, v, observers=[record])
    seconds = time.perf_counter() - start
    osc = float(values.max() - values.min()) if nsteps > 0 else 0.0
    norm0 = l2_norm(u0)
    drift = abs(l2_norm(final) - norm0) / norm0
    return SweepRow(h=float(h), oscillation=osc, l2_drift=drift, seconds=seconds)


def oscillation_sweep(scheme: Scheme, h_grid: Sequence[float], t_final: float,
                      u0: FourierField, v: PotentialSpec, band: int,
                      workers: Optional[int] = None) -> SweepResult:
    """Max-min of the truncated H1 norm over a run, for each stepsize.

    Runs the h values over a process pool (workers=1 forces serial);
    rows come back in h-grid order regardless of scheduling.
    """
    if band > u0.grid.cutoff:
        raise ValueError("band exceeds the grid cutoff")
    if any(h <= 0 for h in h_grid):
        raise ValueError("stepsizes must be positive")
    name = scheme.name if scheme.name in _builtin_names() else scheme
    jobs = [(name, float(h), t_final, u0.grid.cutoff, np.asarray(u0.coeffs),
             dict(v.coeffs), band) for h in h_grid]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(jobs) <= 1:
        rows = [_sweep_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_one, jobs, chunksize=4))
    return SweepResult(scheme=scheme.name, rows=tuple(rows))


def _builtin_names():
    from .schemes import scheme_names
    return set(scheme_names())


def frequency_split(u: FourierField, h: float) -> float:
    """sum_{|k| <= 1/sqrt h} k^2 |u_k|^2 + (1/h) sum_{|k| > 1/sqrt h} |u_k|^2."""
    if h <= 0:
        raise ValueError("h must be positive")
    k = u.grid.modes.astype(float)
    mag2 = np.abs(u.coeffs) ** 2
    low = np.abs(k) <= 1.0 / np.sqrt(h)
    return float(np.sum(k[low] ** 2 * mag2[low]) + np.sum(mag2[~low]) / h)


def uniform_bound_check(scheme: Scheme, u0: FourierField, v: PotentialSpec,
                        h: float, t_final: float) -> BoundReport:
    """No-growth check of the frequency-split quantity along a run.

    PASS when the max over the second half of the run is at most 1.5x
    the max over the first half.
    """
    nsteps = int(round(t_final / h))
    series = np.empty(nsteps + 1)

    def record(n, u):
        series[n] = frequency_split(u, h)

    evolve(scheme, u0, h, nsteps, v, observers=[record])
    half = (nsteps + 1) // 2
    first = float(series[:half].max()) if half > 0 else 0.0
    second = float(series[half:].max()) if half <= nsteps else 0.0
    return BoundReport(passed=second <= 1.5 * first, first_half_max=first,
                       second_half_max=second, series=series)


def _square_differences(cutoff: int) -> np.ndarray:
    k = np.arange(cutoff + 1)
    d = np.unique((k[:, None] ** 2 - k[None, :] ** 2).ravel())
    return d[d > 0]


def resonance_predict(h_grid: Sequence[float], cutoff: int,
                      tol: float) -> list:
    """h values from the grid with h (k^2 - l^2) within tol of 2 pi m, m >= 1."""
    diffs = _square_differences(cutoff)
    flagged = []
    for h in h_grid:
        x = h * diffs
        near = np.abs(x - 2.0 * np.pi * np.round(x / (2.0 * np.pi))) < tol
        if np.any(near & (x >= 2.0 * np.pi - tol)):
            flagged.append(float(h))
    return flagged


def resonant_stepsizes(cutoff: int, h_min: float, h_max: float) -> np.ndarray:
    """All h* = 2 pi m / (k^2 - l^2) in [h_min, h_max] for modes up to cutoff."""
    diffs = _square_differences(cutoff)
    out = []
    for d in diffs:
        m_lo = int(np.ceil(h_min * d / (2.0 * np.pi)))
        m_hi = int(np.floor(h_max * d / (2.0 * np.pi)))
        for m in range(max(m_lo, 1), m_hi + 1):
            out.append(2.0 * np.pi * m / d)
    return np.unique(np.array(out))


def reference_propagator(grid: SpectralGrid, v: PotentialSpec,
                         t: float) -> SpectralOperator:
    """exp(i t H) for the collocation Hamiltonian H = diag(k^2) + V_circulant."""
    k2 = grid.modes.astype(float) ** 2
    h_mat = np.diag(k2.astype(complex)) + collocation_potential_operator(v, grid).entries
    evals, evecs = np.linalg.eigh(h_mat)
    u = (evecs * np.exp(1j * t * evals)) @ evecs.conj().T
    return SpectralOperator(grid, u)


def convergence_order(scheme: Scheme, h_list: Sequence[float], t_final: float,
                      u0: FourierField, v: PotentialSpec):
    """Least-squares slope of log error vs log h against the dense reference.

    Returns (order, errors); each h is snapped to t_final / round(t_final/h)
    so the runs land exactly at the final time.
    """
    u_ref = reference_propagator(u0.grid, v, t_final).entries @ u0.coeffs
    errors = []
    hs = []
    for h in h_list:
        nsteps = max(int(round(t_final / h)), 1)
        h_eff = t_final / nsteps
        u_num = evolve(scheme, u0, h_eff, nsteps, v)
        errors.append(float(np.linalg.norm(u_num.coeffs - u_ref)))
        hs.append(h_eff)
    slope = np.polyfit(np.log(hs), np.log(errors), 1)[0]
    return float(slope), errors


def energy_drift_series(scheme: Scheme, s: SpectralOperator, u0: FourierField,
                        h: float, nsteps: int, v: PotentialSpec,
                        stride: int = 1) -> TimeSeries:
    """Modified energy <u|S|u> and exact energy <u|-Lap+V|u> along a run."""
    v_op = collocation_potential_operator(v, u0.grid)
    steps, modified, exact = [], [], []

    def record(n, u):
        steps.append(n)
        modified.append(quadratic_form(u, s))
        exact.append(exact_energy(u, v_op))

    evolve(scheme, u0, h, nsteps, v, observers=[record], stride=stride)
    steps = np.array(steps)
    return TimeSeries(
        steps=steps,
        times=steps * h,
        observables={"modified_energy": np.array(modified),
                     "exact_energy": np.array(exact)},
    )
