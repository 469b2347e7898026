"""Fixed-point solver: nonlinearity algebra, the trapezoid Duhamel map, and
Picard iteration bookkeeping.

The reference configuration throughout is the cubic problem at d=3 with a
two-axis regularity block (m=3, s=1), shrunk to n=32 per axis so the whole
module runs in seconds; the full-size n=64 runs live in the acceptance
suite.
"""

import math

import numpy as np
import pytest

from dispersivelab.errors import DivergenceError, DomainError
from dispersivelab.norms import contraction_exponents, evolution_norm
from dispersivelab.solver import (
    MIN_NODES,
    NonlinearSpec,
    PicardReport,
    duhamel_map,
    evaluate_nonlinearity,
    existence_time_search,
    picard_solve,
    t_scaling_check,
)
from dispersivelab.spectral import (
    GridSpec,
    apply_propagator,
    forward_transform,
    fractional_symbol,
    propagate_samples,
    wave_packet,
)

GRID = GridSpec(3, 2, 16.0, 32)
SYM = fractional_symbol(3, 3)
EXPS = contraction_exponents(3, 3.0, 1.0, 3.0)
CUBIC = NonlinearSpec(3.0, coupling=1.0)


def packet(amplitude, grid=GRID):
    return wave_packet(grid, width=2.0, wavevector=(0.5, -0.25, 0.75),
                       amplitude=amplitude)


def l2(f):
    return math.sqrt(f.grid.cell_volume * float(np.sum(np.abs(f.values) ** 2)))


# -- nonlinearity ---------------------------------------------------------------

def test_nonlinear_spec_validation():
    with pytest.raises(DomainError):
        NonlinearSpec(1.0)
    with pytest.raises(DomainError):
        NonlinearSpec(3.0, coupling=0.5)
    with pytest.raises(DomainError):
        NonlinearSpec(3.0, form="cubic")


def test_nonlinearity_of_zero_is_zero():
    z = packet(0.0)
    out = evaluate_nonlinearity(z, CUBIC)
    assert np.all(out.values == 0.0)


@pytest.mark.parametrize("form", ["power", "modulus"])
@pytest.mark.parametrize("coupling", [-1.0, 1.0])
def test_nonlinearity_modulus_is_modulus_to_the_p(form, coupling):
    u = packet(0.7)
    spec = NonlinearSpec(2.5, coupling=coupling, form=form)
    out = evaluate_nonlinearity(u, spec)
    assert np.allclose(np.abs(out.values), np.abs(u.values) ** 2.5,
                       rtol=1e-13, atol=1e-300)


def test_nonlinearity_difference_bound():
    # |F_p(u) - F_p(v)| <= 2 (|u|^{p-1} + |v|^{p-1}) |u - v| pointwise
    rng = np.random.default_rng(77)
    for p in (2.0, 3.0):
        spec = NonlinearSpec(p)
        for _ in range(50):
            shape = GRID.shape
            u = packet(1.0).copy_with(
                rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
            v = u.copy_with(
                rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
            fu = evaluate_nonlinearity(u, spec).values
            fv = evaluate_nonlinearity(v, spec).values
            bound = 2.0 * (np.abs(u.values) ** (p - 1)
                           + np.abs(v.values) ** (p - 1)) * np.abs(u.values - v.values)
            assert np.all(np.abs(fu - fv) <= bound * (1 + 1e-12) + 1e-300)


def test_nonlinearity_requires_physical_domain():
    F = forward_transform(packet(1.0))
    with pytest.raises(DomainError):
        evaluate_nonlinearity(F, CUBIC)


# -- Duhamel map ------------------------------------------------------------------

def test_duhamel_node_validation():
    f = packet(0.1)
    good = np.linspace(0.0, 1.0, MIN_NODES)
    flow = [apply_propagator(f, SYM, t) for t in good]
    with pytest.raises(DomainError):
        duhamel_map(flow[:5], f, SYM, CUBIC, good[:5])        # too few nodes
    with pytest.raises(DomainError):
        duhamel_map(flow, f, SYM, CUBIC, good + 0.5)          # t0 != 0
    bad = good.copy()
    bad[3] += 0.01
    with pytest.raises(DomainError):
        duhamel_map(flow, f, SYM, CUBIC, bad)                 # nonuniform
    with pytest.raises(DomainError):
        duhamel_map(flow[:-1], f, SYM, CUBIC, good)           # count mismatch


def test_forced_linear_map_has_linear_flow_fixed_point():
    f = packet(0.4)
    times = np.linspace(0.0, 1.0, MIN_NODES)
    flow = list(propagate_samples(f, SYM, times))
    mapped = duhamel_map(flow, f, SYM, NonlinearSpec(3.0, coupling=0.0), times)
    err = max(float(np.max(np.abs(a.values - b.values)))
              for a, b in zip(flow, mapped))
    assert err < 1e-14


def test_duhamel_at_time_zero_returns_the_data():
    f = packet(0.4)
    times = np.linspace(0.0, 0.5, MIN_NODES)
    flow = propagate_samples(f, SYM, times)
    mapped = duhamel_map(flow, f, SYM, CUBIC, times)
    assert abs(l2(mapped[0]) - l2(f)) < 1e-13
    assert float(np.max(np.abs(mapped[0].values - f.values))) < 1e-13


def test_duhamel_trapezoid_is_second_order():
    # manufactured smooth iterate: the linear flow itself; richer node sets
    # must converge at the trapezoid rate towards a dense reference
    grid = GridSpec(2, 1, 8.0, 32)
    sym = fractional_symbol(2, 2)
    spec = NonlinearSpec(2.0)
    f = wave_packet(grid, width=1.5, wavevector=(1.0, -0.5), amplitude=0.5)
    T = 1.0

    def final_node(count):
        times = np.linspace(0.0, T, count)
        flow = propagate_samples(f, sym, times)
        return duhamel_map(flow, f, sym, spec, times)[-1]

    truth = final_node(257).values
    errs = [float(np.max(np.abs(final_node(c).values - truth)))
            for c in (9, 17, 33)]
    slopes = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(slopes) >= 1.9


# -- Picard iteration ---------------------------------------------------------------

def test_picard_converges_on_small_data():
    rep = picard_solve(packet(0.05), SYM, CUBIC, EXPS, T=0.1)
    assert rep.converged
    assert rep.rho_hat <= 0.5
    assert rep.A > 0.0
    assert len(rep.iterate_norms) == rep.steps + 1
    # successive differences non-increasing after the first step
    assert all(b <= a for a, b in zip(rep.diffs[1:], rep.diffs[2:]))


def test_picard_linear_limit_conserves_l2_at_every_node():
    f = packet(0.3)
    times = np.linspace(0.0, 2.0, MIN_NODES)
    flow = propagate_samples(f, SYM, times)
    mapped = duhamel_map(flow, f, SYM, NonlinearSpec(3.0, coupling=0.0), times)
    base = l2(f)
    for w in mapped:
        assert abs(l2(w) - base) < 1e-12 * max(base, 1.0)


def test_converged_iterate_is_a_fixed_point_of_the_map():
    f = packet(0.05)
    T = 0.1
    times = np.linspace(0.0, T, MIN_NODES)
    u = list(propagate_samples(f, SYM, times))
    A = 2.0 * evolution_norm(times, u, EXPS.q, EXPS.r, EXPS.r_tilde, EXPS.s).value
    for _ in range(6):
        u = duhamel_map(u, f, SYM, CUBIC, times)
    again = duhamel_map(u, f, SYM, CUBIC, times)
    moved = [a.copy_with(a.values - b.values) for a, b in zip(again, u)]
    drift = evolution_norm(times, moved, EXPS.q, EXPS.r, EXPS.r_tilde, EXPS.s).value
    assert drift <= 1e-8 * A


def test_picard_zero_data_is_degenerate():
    rep = picard_solve(packet(0.0), SYM, CUBIC, EXPS, T=0.5)
    assert rep.degenerate and rep.converged
    assert math.isnan(rep.rho_hat)


def test_picard_blowup_raises_with_step_index():
    with pytest.raises(DivergenceError) as err:
        picard_solve(packet(3.0), SYM, CUBIC, EXPS, T=8.0)
    assert err.value.step is not None and err.value.step >= 1


def test_picard_rejects_mismatched_context():
    bad_grid = GridSpec(3, 1, 16.0, 32)      # split k=1, exponents want k=2
    f = wave_packet(bad_grid, width=2.0, wavevector=(0.5, -0.25, 0.75),
                    amplitude=0.05)
    with pytest.raises(DomainError):
        picard_solve(f, SYM, CUBIC, EXPS, T=0.1)


def test_picard_rejects_identity_breaking_exponents():
    printed = contraction_exponents(3, 3.0, 1.0, 3.0, q_source="printed")
    assert printed.mismatch
    with pytest.raises(DomainError):
        picard_solve(packet(0.05), SYM, CUBIC, printed, T=0.1)


def test_t_scaling_halving_speeds_contraction():
    chk = t_scaling_check(packet(0.05), SYM, CUBIC, EXPS, T=0.2)
    assert chk.passed
    assert chk.ratio >= chk.bound
    assert chk.consistent(0.3)


# -- existence-time search ------------------------------------------------------------

def test_search_linear_hook_returns_top_of_range():
    sr = existence_time_search(packet(0.5), SYM,
                               NonlinearSpec(3.0, coupling=0.0), EXPS)
    assert sr.found and sr.T_star == 16.0
    assert len(sr.probes) == 1


def test_search_bisects_to_the_largest_converging_horizon():
    sr = existence_time_search(packet(2.0), SYM, CUBIC, EXPS)
    assert sr.found
    assert len(sr.probes) <= 12
    assert sr.T_star < 16.0
    # certified horizon really does contract
    rep = picard_solve(packet(2.0), SYM, CUBIC, EXPS, sr.T_star)
    assert rep.converged and rep.rho_hat <= 0.5
    # the next dyadic horizon up failed during the search
    failures = [T for T, ok, _ in sr.probes if not ok]
    assert min(failures) == 2.0 * sr.T_star


def test_search_data_doubling_does_not_extend_the_horizon():
    small = existence_time_search(packet(1.0), SYM, CUBIC, EXPS)
    big = existence_time_search(packet(2.0), SYM, CUBIC, EXPS)
    assert small.found and big.found
    assert big.T_star <= small.T_star
