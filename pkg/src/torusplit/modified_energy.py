"""Modified generator of the midpoint-resolvent splitting.

The one-step map exp(ihV) R(-ih Lap) equals exp(ih S(h)) for a symmetric
operator S(h) = (1/h)(Z0 + h Z1 + h^2 Z2 + ...) where Z0 is the diagonal
arctan phase operator, Z1 has a closed entrywise form, and the higher
corrections follow a Bernoulli-number recursion in iterated commutators.
Conservation of <u|S(h)|u> along the numerical flow is then exact.
"""

import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .grids import FourierField, SpectralGrid
from .operators import (
    DiagonalOperator,
    SpectralOperator,
    alpha_norm,
    product_constant,
    quadratic_form,
)

__all__ = [
    "bernoulli_numbers",
    "z0_diagonal",
    "z0_composition",
    "composition_phase_fn",
    "z1_closed_form",
    "z1_series",
    "z_ell_recursion",
    "assemble_modified_energy",
    "exact_energy",
    "energy_gap",
    "h0_estimate",
    "bernoulli_majorant",
]

_SYM_TOL = 1e-9


def bernoulli_numbers(kmax: int) -> list:
    """Exact Bernoulli numbers B_0..B_kmax, convention B_1 = -1/2."""
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    values = []
    for m in range(kmax + 1):
        # B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
        acc = Fraction(0)
        for j in range(m):
            acc += math.comb(m + 1, j) * values[j]
        values.append(Fraction(1) if m == 0 else -acc / (m + 1))
    return values


def z0_diagonal(h: float, grid: SpectralGrid) -> DiagonalOperator:
    """lambda_k = 2 arctan(h k^2 / 2), the midpoint phase of the free flow."""
    if h <= 0:
        raise ValueError("h must be positive")
    k2 = grid.modes.astype(float) ** 2
    return DiagonalOperator(grid, 2.0 * np.arctan(h * k2 / 2.0))


def composition_phase_fn(gammas: Sequence[float]) -> Callable[[np.ndarray], np.ndarray]:
    """G with G(h k^2 / 2) = sum_j 2 arctan(gamma_j h k^2 / 2)."""
    gammas = tuple(float(g) for g in gammas)

    def g(x):
        x = np.asarray(x, dtype=float)
        return sum(2.0 * np.arctan(gj * x) for gj in gammas)

    return g


def z0_composition(gammas: Sequence[float], h: float,
                   grid: SpectralGrid) -> DiagonalOperator:
    """Diagonal phase of a product of resolvent stages with scales gamma_j."""
    if h <= 0:
        raise ValueError("h must be positive")
    if abs(sum(gammas) - 1.0) > 1e-12:
        raise ValueError("resolvent scales must sum to 1")
    g = composition_phase_fn(gammas)
    k2 = grid.modes.astype(float) ** 2
    return DiagonalOperator(grid, g(h * k2 / 2.0))


def _dexp_inv_factor(x: np.ndarray) -> np.ndarray:
    """f(x) = i x / (exp(i x) - 1), with the removable singularity at 0.

    This is the generating function of the Bernoulli series evaluated at
    z = i x; the Taylor branch 1 - ix/2 - x^2/12 covers |x| < 1e-4.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape, dtype=complex)
    small = np.abs(x) < 1e-4
    xs = x[small]
    out[small] = 1.0 - 0.5j * xs - xs * xs / 12.0
    xl = x[~small]
    out[~small] = 1j * xl / (np.exp(1j * xl) - 1.0)
    return out


def z1_closed_form(v_op: SpectralOperator, z0: DiagonalOperator) -> SpectralOperator:
    """First correction: (Z1)_{kl} = V_{kl} f(lambda_k - lambda_l)."""
    if v_op.grid != z0.grid:
        raise ValueError("operands live on different grids")
    lam = z0.diag
    entries = v_op.entries * _dexp_inv_factor(lam[:, None] - lam[None, :])
    return SpectralOperator(v_op.grid, entries, symmetric_hint=True)


def _ad_diag(lam: np.ndarray, w: np.ndarray) -> np.ndarray:
    # commutator with a diagonal operator, entrywise
    return (lam[:, None] - lam[None, :]) * w


def z1_series(v_op: SpectralOperator, z0: DiagonalOperator,
              kmax: int) -> SpectralOperator:
    """Partial Bernoulli series sum_{k<=kmax} (B_k/k!) i^k ad_{Z0}^k(V).

    Test oracle for z1_closed_form; the closed form is what production
    paths use.
    """
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    bern = bernoulli_numbers(kmax)
    lam = z0.diag
    term = v_op.entries.copy()
    total = term * float(bern[0])
    fact = 1.0
    for k in range(1, kmax + 1):
        term = _ad_diag(lam, term)
        fact *= k
        coeff = (1j ** k) * float(bern[k]) / fact
        if coeff != 0:
            total = total + coeff * term
    return SpectralOperator(v_op.grid, total)


def _check_symmetric(entries: np.ndarray, what: str) -> np.ndarray:
    scale = max(np.max(np.abs(entries)), 1.0)
    if np.max(np.abs(entries - entries.conj().T)) > _SYM_TOL * scale:
        raise RuntimeError(f"{what} failed the symmetry check")
    return 0.5 * (entries + entries.conj().T)


def z_ell_recursion(v_op: SpectralOperator, z0: DiagonalOperator, l_max: int,
                    k_max: int = 20, budget: int = 10 ** 7) -> list:
    """Corrections [Z2 .. Z_lmax] from the Bernoulli/commutator recursion.

    (l+1) Z_{l+1} = sum_k (B_k/k!) i^k sum_{l1+..+lk=l} ad_{Z_l1}..ad_{Z_lk}(V)

    with Z1 taken from the closed form. Nested sums are evaluated by
    dynamic programming over (number of factors, total index); the cost
    guard rejects parameter combinations needing more than `budget`
    dense matrix products.
    """
    if l_max < 2:
        raise ValueError("l_max must be >= 2")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    products = sum(2 * (m + 1) * k_max for m in range(1, l_max))
    if products > budget:
        raise ValueError(
            f"recursion would need ~{products} matrix products (budget {budget})"
        )
    if v_op.grid != z0.grid:
        raise ValueError("operands live on different grids")

    bern = [float(b) for b in bernoulli_numbers(k_max)]
    fact = [math.factorial(k) for k in range(k_max + 1)]
    lam = z0.diag
    v = v_op.entries
    z = [None, z1_closed_form(v_op, z0).entries]  # z[0] handled via _ad_diag

    def ad(j: int, w: np.ndarray) -> np.ndarray:
        if j == 0:
            return _ad_diag(lam, w)
        return z[j] @ w - w @ z[j]

    # t[k][m] = sum over compositions l1+..+lk=m of ad_{Z_l1}..ad_{Z_lk}(V),
    # filled in increasing m so every Z_j it needs is already known.
    n = v.shape[0]
    zero = np.zeros((n, n), dtype=complex)
    t = [[None] * l_max for _ in range(k_max + 1)]
    t[0][0] = v
    for m in range(1, l_max):
        t[0][m] = zero

    out = []
    for m in range(l_max):
        # needs Z_j for j <= m; Z_{m} was appended on the previous pass
        for k in range(1, k_max + 1):
            acc = zero
            for j in range(m + 1):
                prev = t[k - 1][m - j]
                if prev is not zero:
                    acc = acc + ad(j, prev)
            t[k][m] = acc
        total = zero
        for k in range(k_max + 1):
            if bern[k] != 0.0 and t[k][m] is not zero:
                total = total + ((1j ** k) * bern[k] / fact[k]) * t[k][m]
        if m >= 1:
            entries = _check_symmetric(total / (m + 1), f"Z_{m + 1}")
            z.append(entries)
            out.append(SpectralOperator(v_op.grid, entries, symmetric_hint=True))
    return out


def assemble_modified_energy(h: float, z0: DiagonalOperator,
                             corrections: Sequence[SpectralOperator],
                             l: int) -> SpectralOperator:
    """S_L = (1/h) (Z0 + sum_{l=1..L} h^l Z_l); corrections = [Z1, Z2, ...]."""
    if h <= 0:
        raise ValueError("h must be positive")
    if l < 0 or l > len(corrections):
        raise ValueError(f"L = {l} but only {len(corrections)} corrections available")
    entries = np.diag(z0.diag.astype(complex)) / h
    for ell in range(1, l + 1):
        entries = entries + (h ** (ell - 1)) * corrections[ell - 1].entries
    entries = 0.5 * (entries + entries.conj().T)
    return SpectralOperator(z0.grid, entries, symmetric_hint=True)


def exact_energy(u: FourierField, v_op: SpectralOperator) -> float:
    """<u|-Lap+V|u> = sum k^2 |u_k|^2 + <u|V|u>."""
    k2 = u.grid.modes.astype(float) ** 2
    kinetic = float(np.sum(k2 * np.abs(u.coeffs) ** 2))
    return kinetic + quadratic_form(u, v_op)


def energy_gap(u: FourierField, s: SpectralOperator,
               v_op: SpectralOperator) -> float:
    """|<u|S|u> - <u|-Lap+V|u>|: distance between modified and exact energies."""
    return abs(quadratic_form(u, s) - exact_energy(u, v_op))


def bernoulli_majorant(rho: float = 1.5 * np.pi, kmax: int = 60) -> float:
    """Smallest M with |B_k| <= k! M rho^-k over k <= kmax."""
    bern = bernoulli_numbers(kmax)
    best = 0.0
    fact = 1.0
    for k, b in enumerate(bern):
        if k > 0:
            fact *= k
        best = max(best, abs(float(b)) * rho ** k / fact)
    return best


def h0_estimate(v_op: SpectralOperator, alpha: float) -> float:
    """Certified radius h0 = pi / (32 M C_alpha ||V||_alpha) of the correction series.

    M is the Bernoulli majorant constant at rho = 3 pi / 2 and C_alpha the
    product-bound constant on the truncated lattice. Scales like the
    inverse of ||V||_alpha; returns +inf for V = 0.
    """
    v_norm = alpha_norm(v_op, alpha)
    if v_norm == 0.0:
        return float("inf")
    m = bernoulli_majorant()
    c_alpha = product_constant(alpha, v_op.grid)
    return float(np.pi / (32.0 * m * c_alpha * v_norm))
