"""Radial weighted-transform module: Bessel branches, the transform and its
classical reduction, oscillatory decay certification, and the half-line
multiplier envelope."""

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn
from scipy.special import jv

from dispersivelab.dunkl import (
    BESSEL_SPLIT,
    DunklParams,
    annulus_bump,
    bessel_envelope_constant,
    bessel_eval,
    bessel_j,
    bessel_kernel,
    dunkl_oscillatory,
    h_envelope_check,
    radial_dunkl_transform,
    verify_dunkl_decay,
    weighted_bump_mass,
)
from dispersivelab.errors import (
    DomainError,
    IntegrabilityError,
    QuadratureCostError,
)
from dispersivelab.spectral import Field, GridSpec, forward_transform


# -- parameters ---------------------------------------------------------------

def test_params_homogeneous_dimension():
    p = DunklParams(2, gamma1=0.5, gamma2=0.3)
    assert p.gamma == pytest.approx(0.8)
    assert p.N == pytest.approx(3.6)
    assert p.nu == pytest.approx(0.8)
    assert not p.classical
    assert DunklParams(3).classical


def test_params_validation():
    with pytest.raises(DomainError):
        DunklParams(0)
    with pytest.raises(DomainError):
        DunklParams(2, gamma1=-0.1)
    with pytest.raises(DomainError):
        DunklParams(2, k=0)
    with pytest.raises(DomainError):
        DunklParams(2, k=3)


# -- Bessel evaluation ----------------------------------------------------------

def test_half_order_closed_form():
    # J_{1/2}(r) = sqrt(2/(pi r)) sin r
    for r in (1.0, 10.0):
        want = np.sqrt(2.0 / (np.pi * r)) * np.sin(r)
        assert abs(bessel_j(0.5, r) - want) <= 1e-10


def test_order_zero_at_origin():
    assert bessel_j(0.0, 0.0) == pytest.approx(1.0, abs=1e-14)
    assert bessel_j(1.5, 0.0) == 0.0


def test_quadrature_branch_against_reference():
    rng = np.random.default_rng(401)
    for _ in range(400):
        nu = rng.uniform(-0.49, 8.0)
        r = rng.uniform(0.0, BESSEL_SPLIT)
        assert abs(bessel_j(nu, r) - jv(nu, r)) <= 1e-10


def test_error_bound_covers_the_amplified_corner():
    # where the prefactor amplification is large the upward-recurrence path
    # must engage and its flat floor must dominate the true error
    rng = np.random.default_rng(406)
    for _ in range(100):
        nu = rng.uniform(4.0, 9.0)
        r = rng.uniform(30.0, BESSEL_SPLIT)
        ev = bessel_eval(nu, r)
        assert abs(ev.value - jv(nu, r)) <= max(ev.error_bound, 1e-13)


def test_asymptotic_branch_against_reference():
    # relative to the oscillation envelope sqrt(2/(pi r)); pointwise relative
    # error is meaningless at the zeros
    rng = np.random.default_rng(402)
    for _ in range(300):
        nu = rng.uniform(-0.49, 6.0)
        r = rng.uniform(BESSEL_SPLIT, 1e6)
        envelope = np.sqrt(2.0 / (np.pi * r))
        assert abs(bessel_j(nu, r) - jv(nu, r)) <= 1e-8 * envelope


def test_branch_seam_is_continuous():
    for nu in (0.0, 0.5, 1.7, 4.0):
        below = bessel_j(nu, BESSEL_SPLIT - 1e-9)
        above = bessel_j(nu, BESSEL_SPLIT + 1e-9)
        assert abs(below - above) <= 1e-9


def test_eval_reports_branch_and_bound():
    small = bessel_eval(1.0, 3.0)
    large = bessel_eval(1.0, 300.0)
    assert small.method == "jacobi-quadrature"
    assert large.method == "asymptotic"
    assert abs(small.value - jv(1.0, 3.0)) <= small.error_bound
    assert abs(large.value - jv(1.0, 300.0)) <= large.error_bound


def test_bessel_domain_errors():
    with pytest.raises(DomainError):
        bessel_j(-0.5, 1.0)
    with pytest.raises(DomainError):
        bessel_j(1.0, -1.0)
    with pytest.raises(DomainError):
        bessel_j(1.0, 2e6)


def test_normalized_kernel_zero_limit():
    # J_nu(z)/z^nu -> 1/(2^nu Gamma(nu+1))
    for nu in (0.0, 0.5, 1.3, 2.5):
        want = 1.0 / (2.0 ** nu * gamma_fn(nu + 1.0))
        assert bessel_kernel(nu, 0.0) == pytest.approx(want, rel=1e-13)


def test_recurrence_identity():
    # d/dr (r^-nu J_nu) = -r^-nu J_{nu+1}; the left side is the derivative
    # of the normalized kernel, taken by central differences
    rng = np.random.default_rng(403)
    h = 1e-5
    for _ in range(100):
        nu = rng.uniform(-0.3, 4.5)
        r = rng.uniform(0.2, 40.0)
        lhs = (bessel_kernel(nu, r + h) - bessel_kernel(nu, r - h)) / (2.0 * h)
        rhs = -(r ** (-nu)) * bessel_j(nu + 1.0, r)
        assert abs(lhs - rhs) <= 1e-6


def test_envelope_bounds_hold():
    # |J_nu(r)| <= C r^nu below r=1 and <= C r^{-1/2} above, with the
    # calibrated constant; for r < 1 test the normalized kernel so negative
    # orders cannot inflate the comparison through r^nu round-off
    rng = np.random.default_rng(404)
    for _ in range(10_000):
        nu = rng.uniform(-0.49, 5.5)
        r = rng.uniform(0.0, 1e3)
        C = bessel_envelope_constant(nu)
        if r < 1.0:
            assert abs(bessel_kernel(nu, r)) <= C
        else:
            assert abs(bessel_j(nu, r)) <= C * r ** (-0.5)


# -- the weighted radial transform ---------------------------------------------

def test_gaussian_self_reciprocal():
    p = DunklParams(2, gamma1=0.5, gamma2=0.3)
    rho = np.array([0.0, 0.35, 0.7, 1.9, 3.5, 6.0])
    got = radial_dunkl_transform(lambda r: np.exp(-r * r / 2.0), p, rho)
    assert np.max(np.abs(got - np.exp(-rho * rho / 2.0))) <= 1e-10


def test_scaled_gaussian_closed_form():
    # e^{-a r^2} maps to (2a)^{-N/2} e^{-rho^2/(4a)}
    p = DunklParams(3, gamma1=0.25)
    a = 0.7
    rho = np.linspace(0.0, 8.0, 41)
    got = radial_dunkl_transform(lambda r: np.exp(-a * r * r), p, rho)
    want = (2.0 * a) ** (-p.N / 2.0) * np.exp(-rho * rho / (4.0 * a))
    assert np.max(np.abs(got - want)) <= 1e-8 * np.max(want)


def test_classical_reduction_matches_grid_transform():
    # gamma = 0, d = 2: the weighted transform must agree with the lattice
    # spectrum of the same Gaussian up to the box-to-unitary factor
    # (2L)^d / (2 pi)^{d/2}
    grid = GridSpec(2, 1, 16.0, 256)
    xs = grid.axis_coords(0)
    X, Y = np.meshgrid(xs, grid.axis_coords(1), indexing="ij")
    samples = np.exp(-(X ** 2 + Y ** 2) / 2.0)
    spectrum = forward_transform(Field(grid, samples.astype(complex), "x"))
    factor = (2.0 * 16.0) ** 2 / (2.0 * np.pi)
    p = DunklParams(2)
    freqs = grid.axis_frequencies(0)
    for j in (2, 5, 11, 20):
        rho = abs(freqs[j])
        unitary = radial_dunkl_transform(lambda r: np.exp(-r * r / 2.0), p, rho)
        bridged = spectrum.values[j, 0].real * factor
        assert abs(unitary - bridged) <= 1e-6 * abs(bridged)


def test_transform_linearity():
    p = DunklParams(2, gamma1=0.4)
    rho = np.linspace(0.0, 5.0, 17)
    f = lambda r: np.exp(-r * r / 2.0)
    g = lambda r: r * r * np.exp(-r * r)
    lhs = radial_dunkl_transform(lambda r: 2.0 * f(r) - 0.7 * g(r), p, rho)
    rhs = (2.0 * radial_dunkl_transform(f, p, rho)
           - 0.7 * radial_dunkl_transform(g, p, rho))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_transform_plancherel():
    p = DunklParams(2, gamma1=0.5, gamma2=0.3)
    a = 0.7
    r = np.linspace(0.0, 14.0, 1200)
    rho = np.linspace(0.0, 14.0, 1200)
    F = radial_dunkl_transform(lambda s: np.exp(-a * s * s), p, rho)
    lhs = np.trapezoid(np.exp(-2.0 * a * r * r) * r ** (p.N - 1.0), r)
    rhs = np.trapezoid(np.abs(F) ** 2 * rho ** (p.N - 1.0), rho)
    assert abs(lhs - rhs) <= 1e-6 * lhs


def test_transform_zero_frequency_is_weighted_mass():
    p = DunklParams(3, gamma1=0.2)
    got = radial_dunkl_transform(lambda r: np.exp(-r * r), p, 0.0)
    r = np.linspace(0.0, 10.0, 20001)
    mass = np.trapezoid(np.exp(-r * r) * r ** (p.N - 1.0), r)
    want = mass / (2.0 ** p.nu * gamma_fn(p.nu + 1.0))
    assert got == pytest.approx(want, rel=1e-8)


def test_transform_rejects_non_integrable_profile():
    p = DunklParams(2)
    with pytest.raises(IntegrabilityError):
        radial_dunkl_transform(lambda r: 1.0 / (1.0 + r), p, 1.0)


def test_transform_order_variants():
    p = DunklParams(2, gamma1=0.5)
    rho = np.array([0.8, 1.6])
    weighted = radial_dunkl_transform(lambda r: np.exp(-r * r / 2.0), p, rho)
    ambient = radial_dunkl_transform(lambda r: np.exp(-r * r / 2.0), p, rho,
                                     order_variant="ambient")
    assert np.max(np.abs(weighted - ambient)) > 1e-3
    with pytest.raises(DomainError):
        radial_dunkl_transform(lambda r: np.exp(-r * r / 2.0), p, rho,
                               order_variant="mystery")
    with pytest.raises(DomainError):
        radial_dunkl_transform(lambda r: np.exp(-r * r / 2.0),
                               DunklParams(1, gamma1=1.0), rho,
                               order_variant="ambient")


def test_transform_rejects_negative_frequency():
    with pytest.raises(DomainError):
        radial_dunkl_transform(lambda r: np.exp(-r * r), DunklParams(2), -1.0)


# -- oscillatory integral --------------------------------------------------------

PAR3 = DunklParams(3)


def test_origin_value_is_weighted_mass():
    val = dunkl_oscillatory(lambda r: r ** 2, annulus_bump, PAR3, 0.0, 0.0)
    assert abs(val.value - weighted_bump_mass(annulus_bump, PAR3)) <= 1e-12


def test_modulus_dominated_by_mass():
    mass = weighted_bump_mass(annulus_bump, PAR3)
    rng = np.random.default_rng(405)
    for _ in range(20):
        x = rng.uniform(0.0, 30.0)
        t = rng.uniform(-20.0, 20.0)
        val = dunkl_oscillatory(lambda r: r ** 2, annulus_bump, PAR3, x, t)
        assert abs(val.value) <= mass + 1e-10


def test_panel_doubling_estimate_small():
    val = dunkl_oscillatory(lambda r: r ** 2, annulus_bump, PAR3, 32.0, 16.0)
    assert val.error_estimate <= 1e-8


def test_node_budget_refused():
    with pytest.raises(QuadratureCostError):
        dunkl_oscillatory(lambda r: r ** 2, annulus_bump, PAR3, 0.0, 1e7)


def test_kernel_argument_cap_guard():
    with pytest.raises(DomainError):
        dunkl_oscillatory(lambda r: r ** 2, annulus_bump, PAR3, 1e6, 1.0)


# -- decay certification -----------------------------------------------------------

def test_quadratic_phase_ray_rate():
    chk = verify_dunkl_decay(lambda r: r ** 2, PAR3, "ray")
    assert chk.ray_speed == pytest.approx(2.0, abs=1e-6)
    assert chk.predicted == -1.5
    assert abs(chk.certified_fit.exponent - (-1.5)) <= 0.15
    assert chk.passed


def test_linear_phase_ray_rate():
    # flat stationary curvature drops the rate to -(N-1)/2
    chk = verify_dunkl_decay(lambda r: r, PAR3, "ray")
    assert chk.predicted == -1.0
    assert abs(chk.certified_fit.exponent - (-1.0)) <= 0.15
    assert chk.passed


def test_far_regime_beats_polynomial_bar():
    chk = verify_dunkl_decay(lambda r: r ** 2, PAR3, "far")
    assert chk.one_sided
    assert chk.predicted == -2.5
    assert chk.fit.exponent <= -3.0
    assert chk.passed


def test_weak_curvature_ray_certifies_on_tail():
    # phase'' = -1/4 at the stationary radius: the primary window is still
    # pre-asymptotic, the drift flag fires, and the tail fit carries the verdict
    chk = verify_dunkl_decay(lambda r: np.sqrt(r), PAR3, "ray")
    assert chk.contaminated
    assert chk.certified_fit is chk.tail_fit
    assert abs(chk.certified_fit.exponent - (-1.5)) <= 0.15
    assert chk.passed


def test_classical_reduction_exponent():
    # gamma = 0, d = 2 is the Euclidean radial kernel: rate -d/2
    chk = verify_dunkl_decay(lambda r: r ** 2, DunklParams(2), "ray")
    assert abs(chk.certified_fit.exponent - (-1.0)) <= 0.1


def test_reflection_weight_shifts_rate():
    # d = 2 with gamma = 1/2 decays at the N = 3 rate, not the ambient one
    chk = verify_dunkl_decay(lambda r: r ** 2, DunklParams(2, gamma1=0.5), "ray")
    assert chk.predicted == -1.5
    assert abs(chk.certified_fit.exponent - (-1.5)) <= 0.15


def test_near_regime_is_unit_speed_ray():
    chk = verify_dunkl_decay(lambda r: r, PAR3, "near")
    assert chk.ray_speed == 1.0
    assert chk.passed


def test_ray_without_stationary_point_refused():
    # sqrt phase has slope in [0.35, 0.71] on the bump: speed 1 never goes
    # stationary, so the ray fit would certify a lie
    with pytest.raises(DomainError):
        verify_dunkl_decay(lambda r: np.sqrt(r), PAR3, "ray", ray_speed=1.0)


def test_unknown_regime_refused():
    with pytest.raises(DomainError):
        verify_dunkl_decay(lambda r: r ** 2, PAR3, "sideways")


def test_decay_samples_recorded():
    chk = verify_dunkl_decay(lambda r: r ** 2, PAR3, "ray")
    assert len(chk.samples) == 22
    us = np.array([u for u, _ in chk.samples])
    assert np.all(np.diff(us) > 0.0)
    vs = np.array([v for _, v in chk.samples])
    assert np.all(vs > 0.0)


# -- half-line multiplier envelope ----------------------------------------------

def test_h_closed_form_dimension_three():
    rep = h_envelope_check(3.0, 0)
    residual = np.max(np.abs(rep.derivative_values + 1j / rep.r_values))
    assert residual <= 1e-12
    assert rep.refinement_change <= 1e-10


def test_h_node_doubling_stable():
    for d in (2.0, 3.5, 4.0):
        for beta in (0, 2, 4):
            rep = h_envelope_check(d, beta)
            assert rep.refinement_change <= 0.01


def test_h_envelope_constants_finite():
    for beta in (0, 1, 2, 3, 4):
        rep = h_envelope_check(2.0, beta)
        assert np.isfinite(rep.envelope_constant)
        assert rep.envelope_constant < 1e4


def test_h_dimension_and_order_guards():
    with pytest.raises(DomainError):
        h_envelope_check(1.5, 0)
    with pytest.raises(DomainError):
        h_envelope_check(3.0, 5)
    with pytest.raises(DomainError):
        h_envelope_check(3.0, 2, r_values=np.array([0.1, 1.0]))
