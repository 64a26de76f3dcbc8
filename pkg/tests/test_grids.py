import numpy as np
import pytest

from torusplit import (
    FourierField,
    PotentialSpec,
    builtin_potential,
    from_physical,
    l2_norm,
    make_grid,
    sobolev_norm,
    synthesize_initial,
    to_physical,
    truncated_h1_norm,
)

RNG = np.random.default_rng(20260826)


def random_field(grid, rng=RNG):
    c = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
    return FourierField(grid, c)


def test_make_grid_modes():
    g = make_grid(1, 2)
    assert list(g.modes) == [-2, -1, 0, 1, 2]
    assert g.size == 5


def test_make_grid_sizes():
    assert make_grid(1, 64).size == 129


def test_make_grid_rejects_bad_args():
    with pytest.raises(ValueError):
        make_grid(1, 0)
    with pytest.raises(ValueError):
        make_grid(2, 4)


def test_field_validates_length_and_finiteness():
    g = make_grid(1, 2)
    with pytest.raises(ValueError):
        FourierField(g, np.zeros(4))
    bad = np.zeros(5, dtype=complex)
    bad[0] = np.nan
    with pytest.raises(ValueError):
        FourierField(g, bad)


def test_l2_norm_single_mode():
    g = make_grid(1, 3)
    assert l2_norm(synthesize_initial({0: 1.0}, g)) == 1.0


def test_l2_norm_three_four_five():
    g = make_grid(1, 3)
    u = synthesize_initial({1: 3.0, -1: 4.0}, g)
    assert l2_norm(u) == pytest.approx(5.0, abs=1e-14)


def test_l2_norm_bump_matches_quadrature():
    # oracle: high-resolution trapezoid quadrature of (1/2pi) int |u|^2 dx,
    # spectrally accurate for a smooth periodic integrand
    g = make_grid(1, 64)
    u = synthesize_initial("bump", g)
    x = 2 * np.pi * np.arange(1 << 16) / (1 << 16)
    oracle = np.sqrt(np.mean(np.abs(2.0 / (2.0 - np.cos(x))) ** 2))
    assert l2_norm(u) == pytest.approx(oracle, abs=1e-10)


def test_sobolev_norm_s0_is_l2():
    g = make_grid(1, 8)
    u = random_field(g)
    assert sobolev_norm(u, 0.0) == pytest.approx(l2_norm(u), rel=1e-14)


def test_sobolev_norm_single_modes():
    g = make_grid(1, 4)
    assert sobolev_norm(synthesize_initial({1: 1.0}, g), 1) == pytest.approx(np.sqrt(2))
    assert sobolev_norm(synthesize_initial({2: 1.0}, g), 2) == pytest.approx(5.0)


def test_sobolev_norm_monotone_in_s():
    g = make_grid(1, 12)
    for _ in range(20):
        u = random_field(g)
        s_vals = sorted(RNG.uniform(-1, 3, size=4))
        norms = [sobolev_norm(u, s) for s in s_vals]
        assert all(a <= b + 1e-12 for a, b in zip(norms, norms[1:]))


def test_truncated_h1_full_band_is_h1():
    g = make_grid(1, 10)
    u = random_field(g)
    assert truncated_h1_norm(u, 10) == pytest.approx(sobolev_norm(u, 1), rel=1e-14)


def test_truncated_h1_excludes_outside_modes():
    g = make_grid(1, 32)
    u = synthesize_initial({30: 1.0}, g)
    assert truncated_h1_norm(u, 20) == 0.0


def test_truncated_h1_brute_force():
    g = make_grid(1, 64)
    u = synthesize_initial("bump", g)
    acc = sum(
        (1 + k * k) * abs(u.coefficient(k)) ** 2 for k in range(-20, 21)
    )
    assert truncated_h1_norm(u, 20) == pytest.approx(np.sqrt(acc), rel=1e-14)


def test_truncated_h1_monotone_in_band():
    g = make_grid(1, 16)
    u = random_field(g)
    vals = [truncated_h1_norm(u, b) for b in range(0, 17)]
    assert all(a <= b + 1e-14 for a, b in zip(vals, vals[1:]))


def test_truncated_h1_band_too_large():
    g = make_grid(1, 8)
    with pytest.raises(ValueError):
        truncated_h1_norm(random_field(g), 9)


def test_bump_coefficients_closed_form():
    g = make_grid(1, 64)
    u = synthesize_initial("bump", g)
    r = 2.0 - np.sqrt(3.0)
    for k in range(-10, 11):
        assert u.coefficient(k) == pytest.approx((2 / np.sqrt(3)) * r ** abs(k),
                                                 rel=1e-12)


def test_bump_matches_sampled_dft_oracle():
    # oracle: DFT of the sampled function; agreement holds in absolute
    # terms down to the DFT rounding floor
    g = make_grid(1, 64)
    u = synthesize_initial("bump", g)
    sampled = from_physical(2.0 / (2.0 - np.cos(g.points)).astype(complex), g)
    assert np.max(np.abs(u.coeffs - sampled.coeffs)) < 1e-13


def test_bump_geometric_decay():
    g = make_grid(1, 64)
    u = synthesize_initial("bump", g)
    r = 2.0 - np.sqrt(3.0)
    for k in range(1, 41):
        ratio = abs(u.coefficient(k + 1)) / abs(u.coefficient(k))
        assert ratio == pytest.approx(r, abs=1e-6)


def test_potential_coefficients():
    v = builtin_potential("cos-sin6")
    assert v.coefficient(1) == 0.5
    assert v.coefficient(-1) == 0.5
    assert v.coefficient(6) == -0.5j
    assert v.coefficient(-6) == 0.5j
    assert v.coefficient(3) == 0
    # oracle: DFT of sampled cos(x) + sin(6x)
    g = make_grid(1, 16)
    sampled = from_physical(np.cos(g.points) + np.sin(6 * g.points), g)
    for n in range(-16, 17):
        assert sampled.coefficient(n) == pytest.approx(v.coefficient(n), abs=1e-14)


def test_potential_conjugate_symmetry_enforced():
    with pytest.raises(ValueError):
        PotentialSpec({1: 1j, -1: 1j})


def test_potential_samples_are_real():
    g = make_grid(1, 16)
    v = builtin_potential("cos-sin6")
    expected = np.cos(g.points) + np.sin(6 * g.points)
    assert np.allclose(v.sample(g), expected, atol=1e-13)


def test_constant_initial():
    g = make_grid(1, 8)
    u = synthesize_initial("constant", g)
    assert u.coefficient(0) == pytest.approx(1.0)
    assert np.max(np.abs(np.delete(u.coeffs, g.cutoff))) < 1e-14


def test_unknown_names_rejected():
    g = make_grid(1, 4)
    with pytest.raises(ValueError):
        synthesize_initial("no-such-thing", g)
    with pytest.raises(ValueError):
        builtin_potential("no-such-thing")


def test_explicit_coefficients_band_check():
    g = make_grid(1, 4)
    with pytest.raises(ValueError):
        synthesize_initial({5: 1.0}, g)


def test_round_trip():
    g = make_grid(1, 20)
    u = random_field(g)
    back = from_physical(to_physical(u), g)
    assert np.max(np.abs(back.coeffs - u.coeffs)) <= 1e-13


def test_constant_mode_gives_constant_samples():
    g = make_grid(1, 6)
    u = synthesize_initial({0: 1.0}, g)
    assert np.allclose(to_physical(u), 1.0, atol=1e-14)


def test_parseval():
    g = make_grid(1, 20)
    for _ in range(10):
        u = random_field(g)
        samples = to_physical(u)
        sample_norm = np.sqrt(np.sum(np.abs(samples) ** 2) / g.size)
        assert sample_norm == pytest.approx(l2_norm(u), rel=1e-12)
