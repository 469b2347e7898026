"""Mixed norms, admissibility arithmetic, and the contraction exponent recipe.

Frozen values below were derived by hand (reciprocal-exponent algebra) and
cross-checked by evaluating the defining identities; see the assertions that
re-verify each residual.
"""

import math

import numpy as np
import pytest

from dispersivelab.errors import (
    DegenerateEquationError,
    DomainError,
    InsufficientDataError,
)
from dispersivelab.norms import (
    AdmissibilityReport,
    DunklContext,
    EuclideanContext,
    ExponentSelection,
    bessel_potential_y,
    check_admissible,
    contraction_exponents,
    evolution_norm,
    hdot_norm,
    mixed_sobolev_norm,
    mixed_space_norm,
    scaling_residual,
    solve_scaling,
    sobolev_mixed_norm,
    time_norm,
)
from dispersivelab.spectral import Field, GridSpec, forward_transform, wave_packet

GRID = GridSpec(d=2, k=1, half_length=4 * math.pi, n=64)   # on-lattice xi = j/4


def random_field(grid, rng):
    vals = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return Field(grid, vals, "x")


# -- mixed space norms -----------------------------------------------------

def test_separable_factorization():
    x, y = GRID.axis_coords(0), GRID.axis_coords(1)
    a = np.exp(-0.3 * x ** 2)
    b = np.cos(0.7 * y) + 1.5
    f = Field(GRID, (a[:, None] * b[None, :]).astype(complex), "x")
    h = GRID.spacing[0]

    def axis_norm(v, p):
        if math.isinf(p):
            return np.max(np.abs(v))
        return (h * np.sum(np.abs(v) ** p)) ** (1.0 / p)

    for r, rt in [(2.0, 2.0), (4.0, 2.0), (3.0, math.inf),
                  (math.inf, 5.0), (math.inf, math.inf), (1.0, 7.0)]:
        want = axis_norm(a, r) * axis_norm(b, rt)
        got = mixed_space_norm(f, r, rt)
        assert abs(got - want) <= 1e-10 * want, (r, rt)


def test_split_collapse_matches_plain_norm():
    rng = np.random.Generator(np.random.PCG64(41))
    for _ in range(50):
        f = random_field(GRID, rng)
        r = float(rng.uniform(1.0, 8.0))
        plain = (GRID.cell_volume * np.sum(np.abs(f.values) ** r)) ** (1.0 / r)
        assert abs(mixed_space_norm(f, r, r) - plain) <= 1e-12 * plain
        # continuity in the exponent pair
        base = mixed_space_norm(f, r, r)
        bumped = mixed_space_norm(f, r + 1e-7, r - 1e-7)
        assert abs(bumped - base) <= 1e-4 * base


def test_monotone_under_domination():
    rng = np.random.Generator(np.random.PCG64(43))
    for _ in range(20):
        f = random_field(GRID, rng)
        g = f.copy_with(f.values * rng.uniform(0.0, 1.0, GRID.shape))
        for r, rt in [(2.0, 2.0), (5.0, 2.0), (math.inf, 3.0)]:
            assert mixed_space_norm(g, r, rt) <= mixed_space_norm(f, r, rt) + 1e-14


def test_mixed_norm_rejects_bad_exponents():
    f = Field(GRID, np.ones(GRID.shape), "x")
    with pytest.raises(DomainError):
        mixed_space_norm(f, 0.5, 2.0)
    with pytest.raises(ValueError):
        mixed_space_norm(forward_transform(f), 2.0, 2.0)


# -- homogeneous / partial Sobolev norms ------------------------------------

def test_hdot_zero_order_is_l2():
    f = wave_packet(GRID, width=1.5, wavevector=(1.0, -0.5))   # mean-free
    l2 = mixed_space_norm(f, 2.0, 2.0)
    assert abs(hdot_norm(f, 0.0) - l2) <= 1e-12 * l2


def test_hdot_single_mode_scaling():
    x, y = GRID.axis_coords(0), GRID.axis_coords(1)
    f = Field(GRID, 0.7 * np.exp(1j * np.add.outer(2.0 * x, 0.0 * y)), "x")
    base = 0.7 * math.sqrt(GRID.box_volume)
    for s in (0.0, 0.5, 1.0, -1.0):
        got = hdot_norm(f, s)
        assert abs(got - 2.0 ** s * base) <= 1e-12 * base, s


def test_hdot_one_matches_spectral_gradient():
    f = wave_packet(GRID, width=1.2, wavevector=(0.75, 0.5))
    F = forward_transform(f)
    total = 0.0
    for a in range(2):
        shape = [1, 1]
        shape[a] = GRID.n[a]
        xi = GRID.axis_frequencies(a).reshape(shape)
        total += GRID.box_volume * np.sum(np.abs(1j * xi * F.values) ** 2)
    want = math.sqrt(total)
    assert abs(hdot_norm(f, 1.0) - want) <= 1e-8 * want


def test_bessel_potential_on_lattice_mode():
    y = GRID.axis_coords(1)
    f = Field(GRID, np.broadcast_to(np.exp(1j * 2.0 * y)[None, :],
                                    GRID.shape).copy(), "x")
    out = bessel_potential_y(f, 1.0)
    np.testing.assert_allclose(out.values, math.sqrt(5.0) * f.values, atol=1e-13)
    # s and -s invert each other
    rng = np.random.Generator(np.random.PCG64(47))
    g = random_field(GRID, rng)
    back = bessel_potential_y(bessel_potential_y(g, 1.3), -1.3)
    np.testing.assert_allclose(back.values, g.values, atol=1e-12)
    assert bessel_potential_y(g, 0.0) is g


def test_mixed_sobolev_norm_separable():
    x, y = GRID.axis_coords(0), GRID.axis_coords(1)
    a = np.exp(-0.3 * x ** 2)
    f = Field(GRID, a[:, None] * np.exp(1j * 2.0 * y)[None, :], "x")
    h = GRID.spacing[0]
    for p, s in [(2.0, 1.0), (4.0, 0.5), (math.inf, 2.0)]:
        pa = np.max(np.abs(a)) if math.isinf(p) \
            else (h * np.sum(np.abs(a) ** p)) ** (1.0 / p)
        want = 5.0 ** (s / 2.0) * pa * math.sqrt(2 * GRID.half_length[1])
        got = mixed_sobolev_norm(f, s, p)
        assert abs(got - want) <= 1e-12 * want
    with pytest.raises(DomainError):
        mixed_sobolev_norm(f, 5.0, 2.0)
    assert sobolev_mixed_norm(f, 0.0, 3.0, 2.0) == mixed_space_norm(f, 3.0, 2.0)


# -- time norms --------------------------------------------------------------

def test_time_norm_constant_and_max():
    assert abs(time_norm([(0.0, 2.0), (3.0, 2.0)], 4.0)
               - 2.0 * 3.0 ** 0.25) <= 1e-14
    assert time_norm([(0.0, 1.0), (1.0, 5.0), (2.0, 3.0)], math.inf) == 5.0


def test_time_norm_linear_ramp():
    ts = np.linspace(0.0, 1.0, 1001)
    got = time_norm(list(zip(ts, ts)), 2.0)
    assert abs(got - 1.0 / math.sqrt(3.0)) <= 1e-4 / math.sqrt(3.0)


def test_time_norm_errors():
    with pytest.raises(InsufficientDataError):
        time_norm([(0.0, 1.0)], 2.0)
    with pytest.raises(InsufficientDataError):
        time_norm([], math.inf)
    with pytest.raises(DomainError):
        time_norm([(0.0, 1.0), (0.0, 2.0)], 2.0)
    with pytest.raises(DomainError):
        time_norm([(0.0, -1.0), (1.0, 2.0)], 2.0)


def test_evolution_norm_constant_flow():
    f = wave_packet(GRID, width=1.5)
    times = np.linspace(0.0, 2.0, 9)
    rep = evolution_norm(times, [f] * 9, 4.0, 4.0, 2.0, s=0.5)
    want = 2.0 ** 0.25 * sobolev_mixed_norm(f, 0.5, 4.0, 2.0)
    assert abs(rep.value - want) <= 1e-12 * want
    assert rep.time_samples == 9 and rep.grid_shape == GRID.shape


# -- admissibility ----------------------------------------------------------

def test_selection_bounds_enforced():
    ctx = EuclideanContext(2, 2.0, 2)
    ExponentSelection(math.inf, 4.0, 2.0, 0.0, 1, ctx)   # fine
    with pytest.raises(DomainError):
        ExponentSelection(2.0, 4.0, 4.0, 0.0, 1, ctx)    # q must exceed 2
    with pytest.raises(DomainError):
        ExponentSelection(4.0, math.inf, 4.0, 0.0, 1, ctx)
    with pytest.raises(DomainError):
        ExponentSelection(4.0, 3.0, 4.0, 0.0, 1, ctx)    # rt > r
    with pytest.raises(DomainError):
        ExponentSelection(4.0, 4.0, 1.5, 0.0, 1, ctx)    # rt < 2


def test_admissibility_frozen_cases():
    # free Schroedinger boundary point
    rep = check_admissible(
        ExponentSelection(4.0, 4.0, 4.0, 0.0, 1, EuclideanContext(2, 2.0, 2)))
    assert rep.status == "admissible-boundary" and abs(rep.residual) <= 1e-12
    assert rep.admissible

    # half-wave loses a curvature direction: same exponents rejected
    rep = check_admissible(
        ExponentSelection(4.0, 4.0, 4.0, 0.0, 1, EuclideanContext(2, 1.0, 1)))
    assert rep.status == "rejected" and not rep.admissible
    assert abs(rep.rhs - 0.25) <= 1e-12

    # weighted radial context: y-block weight makes the same point strict
    rep = check_admissible(
        ExponentSelection(4.0, 4.0, 4.0, 0.0, 1, DunklContext(1, 2.0, 0.0, 1.0)))
    assert rep.status == "admissible-strict"
    assert abs(rep.rhs - 0.75) <= 1e-12


def test_dunkl_wave_admissibility_coefficient():
    # the half-wave variant drops one from the x-block coefficient
    a2, _ = DunklContext(3, 2.0, 0.5, 0.0).admissibility_coefficients(1)
    a1, _ = DunklContext(3, 1.0, 0.5, 0.0).admissibility_coefficients(1)
    assert abs(a2 - 3.0) <= 1e-15 and abs(a1 - 2.0) <= 1e-15
    # gamma = 0 collapses onto the Euclidean coefficients
    ez = EuclideanContext(3, 2.0, 3).admissibility_coefficients(1)
    dz = DunklContext(3, 2.0, 0.0, 0.0).admissibility_coefficients(1)
    assert ez == dz


# -- scaling solves -----------------------------------------------------------

def test_solve_scaling_frozen_cases():
    out = solve_scaling(EuclideanContext(2, 2.0, 2), 1,
                        q=None, r=4.0, r_tilde=4.0, s=0.0)
    assert out.feasible and abs(out.value - 4.0) <= 1e-12

    out = solve_scaling(EuclideanContext(3, 4.0, 3), 1,
                        q=None, r=2.0, r_tilde=2.0, s=0.0)
    assert out.feasible and math.isinf(out.value)

    # tied half-wave solve: 1/4 = 3 (1/2 - 1/r)  =>  r = 12/5
    out = solve_scaling(EuclideanContext(3, 1.0, 2), 1, q=4.0, s=0.0, tied=True)
    assert out.feasible
    assert abs(out.value - 12.0 / 5.0) <= 1e-12
    assert abs(scaling_residual(out.selection)) <= 1e-12


def test_solve_scaling_roundtrip_random():
    """Solved selections re-verify against the identity to 1e-12."""
    rng = np.random.Generator(np.random.PCG64(53))
    contexts = [EuclideanContext(2, 2.0, 2), EuclideanContext(3, 3.0, 3),
                EuclideanContext(3, 1.0, 2), DunklContext(2, 2.0, 0.5, 0.25)]
    solved = 0
    for i in range(400):
        ctx = contexts[i % len(contexts)]
        k = 1 if ctx.d == 1 else int(rng.integers(1, ctx.d))
        q = float(rng.uniform(2.05, 30.0))
        rt = float(rng.uniform(2.0, 6.0))
        r = float(rng.uniform(rt, rt + 8.0))
        out = solve_scaling(ctx, k, q=q, r=r, r_tilde=rt, s=None)
        assert out.feasible   # s is unconstrained
        assert abs(scaling_residual(out.selection)) <= 1e-12
        solved += 1
        # now forget r and re-solve it from the s we just found
        back = solve_scaling(ctx, k, q=q, r=None, r_tilde=rt, s=out.value)
        if back.feasible:
            assert abs(back.value - r) <= 1e-9 * r
            assert abs(scaling_residual(back.selection)) <= 1e-12
    assert solved == 400


def test_solve_scaling_degenerate_and_misuse():
    # d = k = 1 kills the x-block coefficient
    with pytest.raises(DegenerateEquationError):
        solve_scaling(EuclideanContext(1, 2.0, 1), 1,
                      q=4.0, r=None, r_tilde=2.0, s=0.0)
    with pytest.raises(DomainError):
        solve_scaling(EuclideanContext(2, 2.0, 2), 1, q=4.0, r=4.0,
                      r_tilde=4.0, s=0.0)          # nothing unknown
    with pytest.raises(DomainError):
        solve_scaling(EuclideanContext(2, 2.0, 2), 1, q=None, r=None,
                      r_tilde=4.0, s=0.0)          # two unknowns, untied
    with pytest.raises(DomainError):
        solve_scaling(EuclideanContext(2, 2.0, 2), 1, q=None, r=4.0,
                      r_tilde=None, s=0.0, tied=True)


def test_solve_scaling_infeasible_is_reported():
    # forcing 1/q < 0 must be reported, not raised
    out = solve_scaling(EuclideanContext(2, 2.0, 2), 1,
                        q=None, r=2.5, r_tilde=2.0, s=1.5)
    assert not out.feasible and out.selection is None
    assert "negative" in out.reason


# -- contraction exponent recipe ----------------------------------------------

def test_contraction_frozen_example():
    ce = contraction_exponents(3, 3.0, 1.0, 2.0)
    assert ce.feasible
    np.testing.assert_allclose(ce.eps_window, (0.0, 0.5), atol=1e-15)
    assert abs(ce.eps - 0.25) <= 1e-15
    assert abs(ce.r - 3.0) <= 1e-12
    assert abs(ce.r_tilde - 12.0 / 5.0) <= 1e-12
    assert abs(ce.q_identity - 9.0) <= 1e-12
    assert abs(ce.q_printed - 72.0 / 13.0) <= 1e-12
    assert ce.mismatch                      # m != 2: the printed recipe drifts
    assert ce.q == ce.q_identity            # identity value is primary
    assert abs(ce.beta1 - 2.0 / 3.0) <= 1e-12
    # the defining identity for the primary q
    assert abs(3.0 / ce.q + 1.0 / ce.r + 2.0 / ce.r_tilde - 1.5) <= 1e-12


def test_contraction_reference_run_exponents():
    # the solver acceptance configuration
    ce = contraction_exponents(3, 3.0, 1.0, 3.0)
    assert ce.feasible
    assert abs(ce.eps - 2.0 / 9.0) <= 1e-12
    assert abs(ce.r - 4.0) <= 1e-12
    assert abs(ce.r_tilde - 9.0 / 4.0) <= 1e-12
    assert abs(ce.q - 108.0 / 13.0) <= 1e-12
    assert abs(ce.beta1 - 14.0 / 27.0) <= 1e-12


def test_contraction_formulas_agree_at_m_two():
    ce = contraction_exponents(3, 2.0, 1.0, 2.0, relax_m=True)
    assert not ce.mismatch
    assert abs(ce.q - 6.0) <= 1e-12
    assert abs(ce.q_printed - ce.q_identity) <= 1e-12


def test_contraction_window_denominator_switch():
    a = contraction_exponents(3, 3.0, 1.0, 2.8, window_denominator="m_squared")
    b = contraction_exponents(3, 3.0, 1.0, 2.8, window_denominator="m")
    assert abs(a.eps_window[1] - 4.2 / 9.0) <= 1e-12
    assert abs(b.eps_window[1] - 0.9) <= 1e-12   # capped by (p-1)/2
    assert a.eps < b.eps


def test_contraction_infeasible_window():
    ce = contraction_exponents(3, 3.0, 0.01, 2.99)
    assert not ce.feasible
    assert ce.reason == "empty epsilon window"
    lo, hi = ce.eps_window
    assert lo > hi
    assert math.isnan(ce.q)


def test_contraction_domain_errors():
    with pytest.raises(DomainError):
        contraction_exponents(2, 3.0, 1.0, 2.0)        # d too small
    with pytest.raises(DomainError):
        contraction_exponents(3, 2.0, 1.0, 2.0)        # m = 2 needs relax_m
    with pytest.raises(DomainError):
        contraction_exponents(3, 3.0, 0.0, 2.0)        # s out of range
    with pytest.raises(DomainError):
        contraction_exponents(3, 3.0, 1.0, 7.1)        # p beyond 1 + 2m/(d-2s)
    with pytest.raises(DomainError):
        contraction_exponents(3, 3.0, 1.0, 2.0, window_denominator="m_cubed")


def test_contraction_identity_holds_across_range():
    """Every feasible recipe satisfies m/q + (d-2)/r + 2/rt = d/2 and is
    admissible for the generic-rank context."""
    rng = np.random.Generator(np.random.PCG64(59))
    feasible = 0
    for _ in range(200):
        d = int(rng.integers(3, 7))
        m = float(rng.uniform(2.1, 5.0))
        s = float(rng.uniform(0.1, 1.0))
        p_hi = 1.0 + 2.0 * m / (d - 2.0 * s)
        p = float(rng.uniform(1.05, p_hi - 0.05))
        ce = contraction_exponents(d, m, s, p)
        if not ce.feasible:
            continue
        feasible += 1
        assert abs(m / ce.q + (d - 2.0) / ce.r + 2.0 / ce.r_tilde
                   - d / 2.0) <= 1e-12
        assert ce.beta1 > 0.0
        sel = ExponentSelection(ce.q, ce.r, ce.r_tilde, s, 2,
                                EuclideanContext(d, m, d))
        assert check_admissible(sel).admissible
    assert feasible >= 50, f"only {feasible} feasible draws"
