"""Anisotropic mixed norms and the exponent algebra that goes with them.

Space norms treat the leading d - k axes as the outer (x) block and the
trailing k axes as the inner (y) block:

    || f ||_{L^r_x L^rt_y} = ( sum_x h_x ( sum_y h_y |f|^rt )^{r/rt} )^{1/r}

with max() replacing a sum when an exponent is infinite.  Frequency-side
norms read the Parseval weights off GridSpec (see spectral module docstring)
so that the s = 0 homogeneous norm coincides with L^2 exactly; the zero
mode is excluded from homogeneous sums.

The admissibility/scaling algebra works in reciprocal exponents.  A context
object supplies the two coefficient pairs:

  * admissibility:  2/q <= A (1/2 - 1/r) + B (1/2 - 1/rt)
  * scaling:        m/q  = -s + A' (1/2 - 1/r) + B' (1/2 - 1/rt)

For the Euclidean context A = M - k (M the generic Hessian rank), B = k,
A' = d - k, B' = k.  For the weighted (reflection-group radial) context
A = d + 2 g1 - k (minus one more in the half-wave case m = 1),
B = k + 2 g2, and the scaling pair equals the admissibility pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateEquationError, DomainError, InsufficientDataError
from .spectral import Field, forward_transform

__all__ = [
    "mixed_space_norm",
    "hdot_norm",
    "mixed_sobolev_norm",
    "sobolev_mixed_norm",
    "bessel_potential_y",
    "time_norm",
    "MixedNormReport",
    "evolution_norm",
    "EuclideanContext",
    "DunklContext",
    "ExponentSelection",
    "AdmissibilityReport",
    "check_admissible",
    "ScalingSolution",
    "solve_scaling",
    "scaling_residual",
    "ContractionExponents",
    "contraction_exponents",
]


# -- space norms ----------------------------------------------------------

def _block_norm(vals, weight, p, axes):
    """p-norm with Riemann weight over the given axes (max for p = inf)."""
    if not axes:
        return np.abs(vals)
    if math.isinf(p):
        return np.max(np.abs(vals), axis=axes)
    return (weight * np.sum(np.abs(vals) ** p, axis=axes)) ** (1.0 / p)


def mixed_space_norm(f: Field, r, r_tilde) -> float:
    """|| f ||_{L^r_x L^rt_y} on the grid's x/y split."""
    if f.domain != "x":
        raise ValueError("mixed_space_norm expects a physical-domain field")
    g = f.grid
    if not (r >= 1 and r_tilde >= 1):
        raise DomainError("exponents must be >= 1")
    y_axes = tuple(range(g.d - g.k, g.d))
    x_axes = tuple(range(g.d - g.k))
    hy = float(np.prod([g.spacing[a] for a in y_axes]))
    hx = float(np.prod([g.spacing[a] for a in x_axes])) if x_axes else 1.0
    inner = _block_norm(f.values, hy, r_tilde, y_axes)
    return float(_block_norm(inner, hx, r, x_axes))


def hdot_norm(f: Field, s: float) -> float:
    """Homogeneous Sobolev norm ( W sum_{xi != 0} |xi|^{2s} |F|^2 )^{1/2}.

    W = box_volume makes s = 0 coincide with the Riemann L^2 norm exactly
    (discrete Parseval).
    """
    F = f if f.domain == "freq" else forward_transform(f)
    r2 = f.grid.frequency_radius_sq()
    power = np.abs(F.values) ** 2
    if s != 0.0:
        weight = np.zeros_like(r2)
        nz = r2 > 0
        weight[nz] = r2[nz] ** s
        power = power * weight
    else:
        power = power.copy()
        power[(0,) * f.grid.d] = 0.0
    return float(np.sqrt(f.grid.box_volume * np.sum(power)))


def _y_multiplier(f: Field, weight_of_eta2):
    """Apply a radial multiplier in the y-block frequencies only."""
    g = f.grid
    y_axes = tuple(range(g.d - g.k, g.d))
    spec = np.fft.fftn(f.values, axes=y_axes)
    eta2 = np.zeros(tuple(g.n[a] for a in y_axes))
    for i, a in enumerate(y_axes):
        shape = [1] * g.k
        shape[i] = g.n[a]
        eta = g.axis_frequencies(a).reshape(shape)
        eta2 = eta2 + eta * eta
    mult = weight_of_eta2(eta2).reshape((1,) * (g.d - g.k) + eta2.shape)
    out = np.fft.ifftn(spec * mult, axes=y_axes)
    return f.copy_with(out)


def bessel_potential_y(f: Field, s: float) -> Field:
    """(1 + |D_y|^2)^{s/2} f (inhomogeneous y-block smoothing)."""
    if s == 0.0:
        return f
    return _y_multiplier(f, lambda eta2: (1.0 + eta2) ** (0.5 * s))


def mixed_sobolev_norm(f: Field, s: float, p) -> float:
    """|| (1 + |D_y|^2)^{s/2} f ||_{L^p_x L^2_y} (partial-regularity norm)."""
    if not -4.0 <= s <= 4.0:
        raise DomainError(f"regularity s={s} outside the validated range [-4, 4]")
    return mixed_space_norm(bessel_potential_y(f, s), p, 2.0)


def sobolev_mixed_norm(f: Field, s: float, r, r_tilde) -> float:
    """|| (1 + |D_y|^2)^{s/2} f ||_{L^r_x L^rt_y}; the spatial factor of the
    contraction space."""
    return mixed_space_norm(bessel_potential_y(f, s), r, r_tilde)


# -- time norms -----------------------------------------------------------

def time_norm(samples, q) -> float:
    """L^q norm in time of sampled nonnegative values, trapezoid rule.

    samples: sequence of (t, value) pairs with strictly increasing t.
    """
    ts = np.asarray([t for t, _ in samples], dtype=float)
    vs = np.asarray([v for _, v in samples], dtype=float)
    if np.any(vs < 0):
        raise DomainError("time_norm expects nonnegative values")
    if math.isinf(q):
        if len(vs) == 0:
            raise InsufficientDataError("no time samples")
        return float(np.max(vs))
    if len(vs) < 2:
        raise InsufficientDataError("need at least 2 samples for finite q")
    if np.any(np.diff(ts) <= 0):
        raise DomainError("time samples must be strictly increasing")
    return float(np.trapezoid(vs ** q, ts) ** (1.0 / q))


@dataclass(frozen=True)
class MixedNormReport:
    """Value of a space-time mixed norm plus its quadrature metadata."""

    value: float
    q: float
    r: float
    r_tilde: float
    s: float
    time_samples: int
    grid_shape: tuple


def evolution_norm(times, fields, q, r, r_tilde, s=0.0) -> MixedNormReport:
    """|| u ||_{L^q_t L^r_x W^{s,rt}_y} from flow snapshots."""
    vals = [(t, sobolev_mixed_norm(u, s, r, r_tilde))
            for t, u in zip(times, fields)]
    value = time_norm(vals, q)
    return MixedNormReport(value, float(q), float(r), float(r_tilde), float(s),
                           len(vals), fields[0].grid.shape)


# -- exponent contexts ----------------------------------------------------

@dataclass(frozen=True)
class EuclideanContext:
    """Euclidean dispersive context: dimension d, homogeneity m, generic
    Hessian rank M."""

    d: int
    m: float
    hessian_rank: int

    def admissibility_coefficients(self, k):
        return (self.hessian_rank - k, float(k))

    def scaling_coefficients(self, k):
        return (float(self.d - k), float(k))


@dataclass(frozen=True)
class DunklContext:
    """Weighted radial context: ambient dimension d, homogeneity m, and the
    two weight exponents (g1 on the x-block, g2 on the y-block).  The
    homogeneous dimension is N = d + 2 (g1 + g2)."""

    d: int
    m: float
    gamma1: float
    gamma2: float

    @property
    def homogeneous_dim(self):
        return self.d + 2.0 * (self.gamma1 + self.gamma2)

    def admissibility_coefficients(self, k):
        a = self.d + 2.0 * self.gamma1 - k
        if self.m == 1.0:
            a -= 1.0  # half-wave loses one direction of curvature
        return (a, k + 2.0 * self.gamma2)

    def scaling_coefficients(self, k):
        return (self.d + 2.0 * self.gamma1 - k, k + 2.0 * self.gamma2)


@dataclass(frozen=True)
class ExponentSelection:
    """Candidate space-time exponents (q, r, rt, s) for a k-split context."""

    q: float
    r: float
    r_tilde: float
    s: float
    k: int
    context: object

    def __post_init__(self):
        if not (self.q > 2.0):
            raise DomainError(f"q must satisfy 2 < q <= inf, got {self.q}")
        if math.isinf(self.r):
            raise DomainError("r must be finite")
        if not (2.0 <= self.r_tilde <= self.r):
            raise DomainError(
                f"need 2 <= rt <= r, got rt={self.r_tilde}, r={self.r}")


BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class AdmissibilityReport:
    status: str          # "admissible-strict" | "admissible-boundary" | "rejected"
    lhs: float
    rhs: float
    residual: float      # rhs - lhs

    @property
    def admissible(self):
        return self.status != "rejected"


def check_admissible(sel: ExponentSelection) -> AdmissibilityReport:
    """Evaluate 2/q <= A (1/2 - 1/r) + B (1/2 - 1/rt) for the selection."""
    A, B = sel.context.admissibility_coefficients(sel.k)
    lhs = 0.0 if math.isinf(sel.q) else 2.0 / sel.q
    rhs = A * (0.5 - 1.0 / sel.r) + B * (0.5 - 1.0 / sel.r_tilde)
    residual = rhs - lhs
    if residual > BOUNDARY_TOL:
        status = "admissible-strict"
    elif residual >= -BOUNDARY_TOL:
        status = "admissible-boundary"
    else:
        status = "rejected"
    return AdmissibilityReport(status, lhs, rhs, residual)


def scaling_residual(sel: ExponentSelection) -> float:
    """m/q + s - A'(1/2 - 1/r) - B'(1/2 - 1/rt); zero on the scaling line."""
    A, B = sel.context.scaling_coefficients(sel.k)
    m = sel.context.m
    lhs = (0.0 if math.isinf(sel.q) else m / sel.q) + sel.s
    return lhs - A * (0.5 - 1.0 / sel.r) - B * (0.5 - 1.0 / sel.r_tilde)


@dataclass(frozen=True)
class ScalingSolution:
    value: float
    selection: Optional[ExponentSelection]
    feasible: bool
    reason: str = ""


def solve_scaling(context, k, q=None, r=None, r_tilde=None, s=None,
                  tied=False) -> ScalingSolution:
    """Solve the scaling identity for the single unknown exponent.

    Exactly one of q, r, r_tilde, s must be None; alternatively pass
    tied=True with both r and r_tilde None to solve for r = rt jointly.
    Returns the solved value plus a feasibility verdict against the
    structural bounds (2 < q <= inf, 2 <= rt <= r < inf).
    """
    unknowns = [name for name, v in
                (("q", q), ("r", r), ("r_tilde", r_tilde), ("s", s)) if v is None]
    if tied:
        if unknowns != ["r", "r_tilde"]:
            raise DomainError("tied solve requires exactly r and r_tilde unknown")
    elif len(unknowns) != 1:
        raise DomainError(f"need exactly one unknown, got {unknowns}")
    A, B = context.scaling_coefficients(k)
    m = context.m

    def build(qv, rv, rtv, sv):
        try:
            sel = ExponentSelection(qv, rv, rtv, sv, k, context)
        except DomainError as exc:
            return ScalingSolution(math.nan, None, False, str(exc))
        return sel

    if tied:
        coeff = A + B
        if abs(coeff) < 1e-15:
            raise DegenerateEquationError("scaling identity independent of r")
        target = (0.0 if math.isinf(q) else m / q) + s
        inv = 0.5 - target / coeff
        if inv <= 0:
            return ScalingSolution(math.inf, None, False,
                                   "solved r is not finite/positive")
        val = 1.0 / inv
        sel = build(q, val, val, s)
        if isinstance(sel, ScalingSolution):
            return ScalingSolution(val, None, False, sel.reason)
        return ScalingSolution(val, sel, True)

    name = unknowns[0]
    if name == "s":
        val = (A * (0.5 - 1.0 / r) + B * (0.5 - 1.0 / r_tilde)
               - (0.0 if math.isinf(q) else m / q))
        sel = build(q, r, r_tilde, val)
    elif name == "q":
        inv = (A * (0.5 - 1.0 / r) + B * (0.5 - 1.0 / r_tilde) - s) / m
        if inv < -BOUNDARY_TOL:
            return ScalingSolution(math.nan, None, False, "solved 1/q is negative")
        val = math.inf if abs(inv) <= BOUNDARY_TOL else 1.0 / inv
        sel = build(val, r, r_tilde, s)
    elif name == "r":
        if abs(A) < 1e-15:
            raise DegenerateEquationError(
                "x-block coefficient vanishes; identity independent of r")
        target = (0.0 if math.isinf(q) else m / q) + s - B * (0.5 - 1.0 / r_tilde)
        inv = 0.5 - target / A
        if inv <= 0:
            return ScalingSolution(math.inf, None, False,
                                   "solved r is not finite/positive")
        val = 1.0 / inv
        sel = build(q, val, r_tilde, s)
    else:  # r_tilde
        if abs(B) < 1e-15:
            raise DegenerateEquationError(
                "y-block coefficient vanishes; identity independent of rt")
        target = (0.0 if math.isinf(q) else m / q) + s - A * (0.5 - 1.0 / r)
        inv = 0.5 - target / B
        if inv <= 0:
            return ScalingSolution(math.nan, None, False,
                                   "solved rt is not positive")
        val = 1.0 / inv
        sel = build(q, r, val, s)

    if isinstance(sel, ScalingSolution):
        return ScalingSolution(val, None, False, sel.reason)
    return ScalingSolution(val, sel, True)


# -- contraction exponents (local well-posedness recipe) -------------------

@dataclass(frozen=True)
class ContractionExponents:
    """Derived exponents for the k = 2 contraction argument.

    q_identity satisfies m/q + (d-2)/r + 2/rt = d/2 exactly; q_printed is
    the closed-form recipe value, which agrees with q_identity only at
    m = 2 (the two are reported side by side and `mismatch` flags any
    disagreement beyond 1e-12).  beta1 = 1 - (p+1)/q is the time-regularity
    gain of the Duhamel estimate, computed from the primary q.
    """

    d: int
    m: float
    s: float
    p: float
    eps_window: tuple
    eps: float
    q: float
    r: float
    r_tilde: float
    beta1: float
    q_identity: float
    q_printed: float
    mismatch: bool
    feasible: bool
    reason: str = ""
    k: int = 2


def contraction_exponents(d, m, s, p, window_denominator="m_squared",
                          q_source="identity", relax_m=False):
    """Exponent recipe for the local contraction argument (k = 2 split).

    window_denominator chooses between the literal m^2 lower-order window
    bound and the m variant; q_source in {"identity", "printed"} picks which
    q becomes primary.  Returns a ContractionExponents report; infeasible
    windows are reported, not raised.
    """
    if d < 3:
        raise DomainError("contraction recipe requires d >= 3")
    if not 0.0 < s <= 1.0:
        raise DomainError(f"regularity s={s} outside (0, 1]")
    if m < 2.0 or (m == 2.0 and not relax_m):
        raise DomainError(f"homogeneity m={m} must exceed 2 (relax_m allows 2)")
    p_max = 1.0 + 2.0 * m / (d - 2.0 * s)
    if not 1.0 < p < p_max:
        raise DomainError(f"power p={p} outside (1, {p_max})")
    if window_denominator not in ("m_squared", "m"):
        raise DomainError(f"unknown window_denominator {window_denominator!r}")

    denom = m * m if window_denominator == "m_squared" else m
    lo = 0.5 * (1.0 - s) * (p - 1.0)
    hi = min((d - 2.0) / denom * (1.0 + 2.0 * m / (d - 2.0) - p),
             0.5 * (p - 1.0))
    if not lo < hi:
        return ContractionExponents(
            d, m, s, p, (lo, hi), math.nan, math.nan, math.nan, math.nan,
            math.nan, math.nan, math.nan, False, False,
            reason="empty epsilon window")
    eps = 0.5 * (lo + hi)
    inv_r = 1.0 / (p + 1.0)
    inv_rt = 0.5 - eps / (p + 1.0)
    inv_q_printed = ((d - 2.0) / (2.0 * m) - (d - 2.0) / (m * (p + 1.0))
                     + m * eps / (2.0 * (p + 1.0)))
    inv_q_identity = (0.5 * d - (d - 2.0) * inv_r - 2.0 * inv_rt) / m
    mismatch = abs(inv_q_printed - inv_q_identity) > 1e-12
    inv_q = inv_q_identity if q_source == "identity" else inv_q_printed
    if inv_q <= 0:
        return ContractionExponents(
            d, m, s, p, (lo, hi), eps, math.nan, 1.0 / inv_r, 1.0 / inv_rt,
            math.nan, 1.0 / inv_q_identity if inv_q_identity > 0 else math.nan,
            1.0 / inv_q_printed if inv_q_printed > 0 else math.nan,
            mismatch, False, reason="derived q not positive")
    q = 1.0 / inv_q
    beta1 = 1.0 - (p + 1.0) * inv_q
    feasible = q > 2.0 and beta1 > 0.0
    reason = "" if feasible else "derived q or beta1 out of range"
    return ContractionExponents(
        d, m, s, p, (lo, hi), eps, q, 1.0 / inv_r, 1.0 / inv_rt, beta1,
        1.0 / inv_q_identity, 1.0 / inv_q_printed, mismatch, feasible, reason)
