"""Dense operators on the truncated Fourier lattice.

Operators are stored as dense N x N complex matrices indexed by modes
-K..K (row k, column l). This module provides the weighted sup norm
used to measure off-diagonal decay, products and commutators, quadratic
forms, multiplication operators built from a potential, and a
unitary-logarithm routine used as an independent oracle for the
modified generator.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .grids import FourierField, PotentialSpec, SpectralGrid, to_physical, from_physical

__all__ = [
    "SpectralOperator",
    "DiagonalOperator",
    "BranchCutError",
    "alpha_norm",
    "compose",
    "commutator",
    "apply",
    "quadratic_form",
    "toeplitz_from_potential",
    "collocation_potential_operator",
    "identity",
    "operator_norm",
    "unitary_log_generator",
    "dft_matrix",
    "product_constant",
    "form_constant",
]

_SYMMETRY_TOL = 1e-12


class BranchCutError(RuntimeError):
    """An eigenphase sits too close to +-pi for a principal-branch logarithm."""


@dataclass(frozen=True)
class SpectralOperator:
    """Dense matrix A_{kl} acting on Fourier coefficients."""

    grid: SpectralGrid
    entries: np.ndarray
    symmetric_hint: bool = False

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        n = self.grid.size
        if entries.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {entries.shape}")
        if not np.all(np.isfinite(entries.view(float))):
            raise ValueError("operator entries must be finite")
        if self.symmetric_hint:
            scale = max(np.max(np.abs(entries)), 1.0)
            if np.max(np.abs(entries - entries.conj().T)) > _SYMMETRY_TOL * scale:
                raise ValueError("symmetric_hint set but the matrix is not Hermitian")
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class DiagonalOperator:
    """Real diagonal operator lambda_k on the lattice."""

    grid: SpectralGrid
    diag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        if diag.shape != (self.grid.size,):
            raise ValueError("diagonal length must match the grid size")
        if not np.all(np.isfinite(diag)):
            raise ValueError("diagonal entries must be finite")
        diag = diag.copy()
        diag.setflags(write=False)
        object.__setattr__(self, "diag", diag)

    def as_operator(self) -> SpectralOperator:
        return SpectralOperator(self.grid, np.diag(self.diag.astype(complex)),
                                symmetric_hint=True)


def identity(grid: SpectralGrid) -> SpectralOperator:
    return SpectralOperator(grid, np.eye(grid.size, dtype=complex),
                            symmetric_hint=True)


def _mode_distance(grid: SpectralGrid) -> np.ndarray:
    k = grid.modes
    return np.abs(k[:, None] - k[None, :]).astype(float)


def alpha_norm(a: SpectralOperator, alpha: float) -> float:
    """sup_{k,l} |A_{kl}| (1 + |k-l|^alpha) over the truncated lattice."""
    if alpha <= 1:
        raise ValueError("alpha must be > 1")
    weight = 1.0 + _mode_distance(a.grid) ** alpha
    return float(np.max(np.abs(a.entries) * weight))


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("operands live on different grids")


def compose(a: SpectralOperator, b: SpectralOperator) -> SpectralOperator:
    _check_same_grid(a, b)
    return SpectralOperator(a.grid, a.entries @ b.entries)


def commutator(a: SpectralOperator, b: SpectralOperator) -> SpectralOperator:
    """AB - BA."""
    _check_same_grid(a, b)
    return SpectralOperator(a.grid, a.entries @ b.entries - b.entries @ a.entries)


def apply(a: SpectralOperator, u: FourierField) -> FourierField:
    _check_same_grid(a, u)
    return FourierField(u.grid, a.entries @ u.coeffs)


def quadratic_form(u: FourierField, a: SpectralOperator) -> float:
    """<u|A|u> for symmetric A; the (rounding-level) imaginary part is dropped."""
    _check_same_grid(u, a)
    if not a.symmetric_hint:
        raise ValueError("quadratic_form requires a symmetric operator")
    value = complex(np.vdot(u.coeffs, a.entries @ u.coeffs))
    if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
        raise ValueError("quadratic form came out non-real")
    return value.real


def toeplitz_from_potential(v: PotentialSpec, grid: SpectralGrid) -> SpectralOperator:
    """Multiplication operator on the truncated lattice: A_{kl} = W_{k-l}."""
    k = grid.modes
    diff = k[:, None] - k[None, :]
    entries = np.zeros((grid.size, grid.size), dtype=complex)
    for n, c in v.coeffs.items():
        entries[diff == n] = c
    return SpectralOperator(grid, entries, symmetric_hint=True)


def dft_matrix(grid: SpectralGrid) -> np.ndarray:
    """Synthesis matrix E with E[j, k] = exp(i k x_j); to_physical as a matrix."""
    return np.exp(1j * np.outer(grid.points, grid.modes))


def collocation_potential_operator(v: PotentialSpec, grid: SpectralGrid) -> SpectralOperator:
    """Circulant (aliased) multiplication operator the collocation scheme applies."""
    e = dft_matrix(grid)
    entries = (e.conj().T / grid.size) @ (v.sample(grid)[:, None] * e)
    entries = 0.5 * (entries + entries.conj().T)
    return SpectralOperator(grid, entries, symmetric_hint=True)


def operator_norm(a: SpectralOperator | np.ndarray, tol: float = 1e-10) -> float:
    """Largest singular value, by power iteration on A* A."""
    m = a.entries if isinstance(a, SpectralOperator) else np.asarray(a, dtype=complex)
    n = m.shape[0]
    b = m.conj().T @ m
    v = np.ones(n, dtype=complex) / np.sqrt(n)
    est = 0.0
    for _ in range(10 * n):
        w = b @ v
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        new_est = float(np.sqrt(np.real(np.vdot(v, b @ v))))
        if abs(new_est - est) <= tol * max(new_est, 1.0):
            return new_est
        est = new_est
    return est


def unitary_log_generator(u: SpectralOperator, h: float) -> SpectralOperator:
    """S with exp(i h S) = U, via principal-branch eigenphases of the unitary U.

    Refuses (BranchCutError) when an eigenphase lies within 1e-6 of +-pi,
    where the principal branch is ambiguous (resonant stepsize).
    """
    if h <= 0:
        raise ValueError("h must be positive")
    n = u.grid.size
    defect = operator_norm(u.entries.conj().T @ u.entries - np.eye(n))
    if defect > 1e-10:
        raise ValueError(f"input is not unitary (||U*U - I|| = {defect:.2e})")
    # Schur of a normal matrix: unitary Q, (numerically) diagonal T.
    t, q = scipy.linalg.schur(u.entries, output="complex")
    phases = np.angle(np.diag(t))
    if np.min(np.pi - np.abs(phases)) < 1e-6:
        raise BranchCutError(
            "eigenphase within 1e-6 of +-pi: principal branch is ambiguous"
        )
    s = (q * (phases / h)) @ q.conj().T
    s = 0.5 * (s + s.conj().T)
    scale = max(np.max(np.abs(s)), 1.0)
    if np.max(np.abs(s - s.conj().T)) > 1e-9 * scale:
        raise RuntimeError("logarithm generator failed the symmetry check")
    return SpectralOperator(u.grid, s, symmetric_hint=True)


def _lattice_sum(alpha: float, grid: SpectralGrid) -> float:
    p = grid.modes.astype(float)
    return float(np.sum(1.0 / (1.0 + np.abs(p) ** alpha)))


def form_constant(alpha: float, grid: SpectralGrid) -> float:
    """M_alpha = sum_{|p| <= K} 1/(1+|p|^alpha): quadratic-form bound constant."""
    if alpha <= 1:
        raise ValueError("alpha must be > 1")
    return _lattice_sum(alpha, grid)


def product_constant(alpha: float, grid: SpectralGrid) -> float:
    """C_alpha = 2^alpha sum_{|p| <= K} 1/(1+|p|^alpha): product bound constant."""
    if alpha <= 1:
        raise ValueError("alpha must be > 1")
    return (2.0 ** alpha) * _lattice_sum(alpha, grid)
