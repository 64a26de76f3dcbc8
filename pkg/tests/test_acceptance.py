"""Acceptance suite: ten numbered criteria, one PASS/FAIL line each.

Each test prints a single summary line before asserting, so a reader can
grep "CRITERION" in the captured output (always shown for failures).
The criteria pin their own grids, stepsizes and tolerances.
"""

import numpy as np
import pytest

from torusplit import (
    FourierField,
    SpectralOperator,
    alpha_norm,
    assemble_modified_energy,
    builtin_potential,
    builtin_scheme,
    collocation_potential_operator,
    commutator,
    convergence_order,
    default_h_grid,
    evolve,
    frequency_split,
    make_grid,
    operator_norm,
    oscillation_sweep,
    quadratic_form,
    resonant_stepsizes,
    scheme_matrix,
    scheme_names,
    synthesize_initial,
    truncated_h1_norm,
    unitary_log_generator,
    z0_diagonal,
    z1_closed_form,
    z1_series,
    z_ell_recursion,
)
from torusplit.modified_energy import exact_energy

V = builtin_potential("cos-sin6")

_SWEEP_CACHE = {}


def reference_sweep(scheme_name):
    """K=64, band=20, T=50, 200 log-spaced h in [0.01, 0.1] (cached)."""
    if scheme_name not in _SWEEP_CACHE:
        grid = make_grid(1, 64)
        u0 = synthesize_initial("bump", grid)
        res = oscillation_sweep(builtin_scheme(scheme_name),
                                default_h_grid(0.01, 0.1, 200), 50.0, u0, V,
                                band=20, workers=1)
        _SWEEP_CACHE[scheme_name] = res
    return _SWEEP_CACHE[scheme_name]


def report(number, ok, detail):
    print(f"CRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


# ----------------------------------------------------------------------- 1


def test_criterion_1_unitarity():
    grid = make_grid(1, 64)
    u0 = synthesize_initial("bump", grid)
    norm0 = np.linalg.norm(u0.coeffs)
    h, nsteps, tol = 0.01, 5000, 1e-11
    drifts = {}
    for name in scheme_names():
        final = evolve(builtin_scheme(name), u0, h, nsteps, V)
        drifts[name] = abs(np.linalg.norm(final.coeffs) - norm0) / norm0
    worst = max(drifts, key=drifts.get)
    ok = all(d <= tol for d in drifts.values())
    assert report(1, ok, f"L2 drift over {nsteps} steps at h={h}: worst "
                         f"{drifts[worst]:.2e} ({worst}), tolerance {tol}")


# ----------------------------------------------------------------------- 2


def test_criterion_2_commutator_pi_bound():
    grid = make_grid(1, 10)
    rng = np.random.default_rng(42)
    violations = 0
    worst = 0.0
    trials = 1000
    for _ in range(trials):
        n = grid.size
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        band = int(rng.integers(1, 2 * grid.cutoff + 1))
        k = grid.modes
        m[np.abs(k[:, None] - k[None, :]) > band] = 0.0
        w = SpectralOperator(grid, m)
        for h in (0.01, 0.1, 1.0):
            z0 = z0_diagonal(h, grid).as_operator()
            for alpha in (1.5, 2.0, 3.0):
                lhs = alpha_norm(commutator(z0, w), alpha)
                rhs = np.pi * alpha_norm(w, alpha)
                worst = max(worst, lhs / rhs)
                if lhs > rhs * (1 + 1e-12):
                    violations += 1
    ok = violations == 0
    assert report(2, ok, f"||[Z0,W]||_a <= pi ||W||_a, {trials} random W x 9 "
                         f"(alpha,h) combos: {violations} violations, "
                         f"sharpest ratio {worst:.4f}")


# ----------------------------------------------------------------------- 3


def test_criterion_3_oracle_equivalence():
    grid = make_grid(1, 8)
    h = 0.01
    v_op = collocation_potential_operator(V, grid)
    z0 = z0_diagonal(h, grid)
    corrections = [z1_closed_form(v_op, z0)] + z_ell_recursion(v_op, z0, 4)
    u_mat = scheme_matrix(builtin_scheme("lie-midpoint"), h, grid, V)
    s_oracle = unitary_log_generator(u_mat, h)
    errs = []
    for ell in range(5):
        s_l = assemble_modified_energy(h, z0, corrections, ell)
        errs.append(operator_norm(s_l.entries - s_oracle.entries))
    evals, evecs = np.linalg.eigh(s_oracle.entries)
    u_rec = (evecs * np.exp(1j * h * evals)) @ evecs.conj().T
    rec = operator_norm(u_rec - u_mat.entries)
    ok = (all(a > b for a, b in zip(errs, errs[1:]))
          and errs[4] <= 1e-8 and rec <= 1e-9)
    assert report(3, ok, "||S_L - S_oracle|| monotone "
                         + ">".join(f"{e:.1e}" for e in errs)
                         + f", L=4 tol 1e-8; reconstruction {rec:.1e} tol 1e-9")


# ----------------------------------------------------------------------- 4


def test_criterion_4_z1_closed_form_vs_series():
    grid = make_grid(1, 16)
    h = 0.05
    v_op = collocation_potential_operator(V, grid)
    z0 = z0_diagonal(h, grid)
    closed = z1_closed_form(v_op, z0)
    series = z1_series(v_op, z0, kmax=40)
    err = float(np.max(np.abs(closed.entries - series.entries)))
    ok = err <= 1e-10
    assert report(4, ok, f"entrywise |closed - series(kmax=40)| = {err:.2e}, "
                         f"tolerance 1e-10 (K=16, h=0.05)")


# ----------------------------------------------------------------------- 5


def test_criterion_5_modified_energy_conservation():
    # part 1: the oracle S is conserved to near machine precision
    grid = make_grid(1, 8)
    h, nsteps = 0.01, 1000
    u0 = synthesize_initial("bump", grid)
    s_oracle = unitary_log_generator(
        scheme_matrix(builtin_scheme("lie-midpoint"), h, grid, V), h)
    values = []
    evolve(builtin_scheme("lie-midpoint"), u0, h, nsteps, V,
           observers=[lambda n, u: values.append(quadratic_form(u, s_oracle))])
    drift = np.max(np.abs(np.array(values) - values[0])) / abs(values[0])

    # part 2: with truncated S_L the oscillation scales like h^L.  The h^L
    # law needs corrections of size O(1), i.e. stepsizes with h k^2 = O(1)
    # on the excited modes, so it is measured on broadband data at h where
    # the arctan phases are not uniformly small.
    rng = np.random.default_rng(7)
    c = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
    u_broad = FourierField(grid, c / np.linalg.norm(c))
    v_op = collocation_potential_operator(V, grid)
    exponents = {}
    for ell in (1, 2, 3):
        oscs = []
        for h_ell in (0.2, 0.1):
            z0 = z0_diagonal(h_ell, grid)
            corrections = ([z1_closed_form(v_op, z0)]
                           + z_ell_recursion(v_op, z0, max(ell, 2)))
            s_l = assemble_modified_energy(h_ell, z0, corrections, ell)
            vals = []
            evolve(builtin_scheme("lie-midpoint"), u_broad, h_ell,
                   int(round(8.0 / h_ell)), V,
                   observers=[lambda n, u: vals.append(quadratic_form(u, s_l))])
            oscs.append(max(vals) - min(vals))
        exponents[ell] = float(np.log2(oscs[0] / oscs[1]))
    ok_drift = drift <= 1e-9
    ok_exp = all(abs(exponents[ell] - ell) <= 0.3 for ell in exponents)
    ok = ok_drift and ok_exp
    assert report(5, ok, f"oracle drift {drift:.2e} (tol 1e-9); oscillation "
                         "exponents (target L +- 0.3): "
                         + ", ".join(f"L={l}: {e:.2f}"
                                     for l, e in exponents.items()))


# ----------------------------------------------------------------------- 6


def test_criterion_6_energy_gap_halves_with_h():
    # |<u|S|u> - <u|-Lap+V|u>| should halve with h (ratio in [1.7, 2.3])
    # for the smooth reference data, across h in {0.08, 0.04, 0.02}.
    grid = make_grid(1, 16)
    u = synthesize_initial("bump", grid)
    v_op = collocation_potential_operator(V, grid)
    e_exact = exact_energy(u, v_op)
    gaps = []
    for h in (0.08, 0.04, 0.02):
        s = unitary_log_generator(
            scheme_matrix(builtin_scheme("lie-midpoint"), h, grid, V), h)
        gaps.append(abs(quadratic_form(u, s) - e_exact))
    ratios = [a / b for a, b in zip(gaps, gaps[1:])]
    ok = all(1.7 <= r <= 2.3 for r in ratios)
    assert report(6, ok, "gap ratios for h 0.08->0.04->0.02: "
                         + ", ".join(f"{r:.2f}" for r in ratios)
                         + " (target [1.7, 2.3])")


# ----------------------------------------------------------------------- 7


def test_criterion_7_convergence_orders():
    grid = make_grid(1, 32)
    u0 = synthesize_initial("bump", grid)
    h_list = [1 / 320, 1 / 640, 1 / 1280]
    declared = {"lie-midpoint": 1, "strang-v-outside": 2,
                "strang-r-outside": 2, "tj4": 4}
    measured = {}
    for name, order in declared.items():
        p, _ = convergence_order(builtin_scheme(name), h_list, 1.0, u0, V)
        measured[name] = p
    ok = all(abs(measured[n] - declared[n]) <= 0.2 * declared[n]
             for n in declared)
    assert report(7, ok, "measured orders (target +-20%): "
                         + ", ".join(f"{n}={measured[n]:.2f}/{declared[n]}"
                                     for n in declared))


# ----------------------------------------------------------------------- 8


def test_criterion_8_figure_reproduction():
    flat = ("lie-midpoint", "strang-r-outside", "tj4")
    resonant = ("yoshida6", "suzuki8", "exact-splitting")
    ratios = {}
    for name in flat + resonant:
        osc = reference_sweep(name).oscillations
        ratios[name] = float(osc.max() / np.median(osc))
    ok_flat = all(ratios[n] <= 5.0 for n in flat)
    ok_res = all(ratios[n] >= 10.0 for n in resonant)
    ok = ok_flat and ok_res
    assert report(8, ok, "max/median oscillation: flat (<=5) "
                         + ", ".join(f"{n}={ratios[n]:.2f}" for n in flat)
                         + "; resonant (>=10) "
                         + ", ".join(f"{n}={ratios[n]:.2f}" for n in resonant))


# ----------------------------------------------------------------------- 9


def test_criterion_9_resonance_mechanism():
    res = reference_sweep("exact-splitting")
    spikes = res.spikes(factor=10.0)
    predicted = resonant_stepsizes(64, 0.01, 0.1)
    unexplained = [h for h in spikes
                   if np.min(np.abs(predicted - h)) > 0.002]
    ok = not unexplained
    assert report(9, ok, f"{len(spikes)} spikes >= 10x median; "
                         f"{len(unexplained)} beyond 0.002 of a predicted "
                         f"2-pi-multiple stepsize")


# ---------------------------------------------------------------------- 10


def test_criterion_10_frequency_split_bounded():
    grid = make_grid(1, 64)
    u0 = synthesize_initial("bump", grid)
    results = {}
    for h in (0.01, 0.05, 0.1):
        nsteps = int(round(50.0 / h))
        series = np.empty(nsteps + 1)

        def record(n, u):
            series[n] = frequency_split(u, h)

        evolve(builtin_scheme("lie-midpoint"), u0, h, nsteps, V,
               observers=[record])
        half = (nsteps + 1) // 2
        results[h] = float(series[half:].max() / series[:half].max())
    ok = all(r <= 1.5 for r in results.values())
    assert report(10, ok, "second-half max / first-half max over T=50: "
                          + ", ".join(f"h={h}: {r:.3f}"
                                      for h, r in results.items())
                          + " (target <= 1.5)")
