"""Exact evaluation of the annular power-function quantities.

Everything here reduces to the radial primitive

    int_(lo,hi) |x|^(-d p / q) dx = omega * (hi^alpha - lo^alpha) / alpha,

with alpha = d - d p/q > 0, combined with the ball-volume weight
|B(0,r)|^(1/q - 1/p).  Powers are taken in the log domain so that very thin
or very deep annuli keep full relative precision.
"""

import math

from .core import (
    Annulus,
    Ball,
    MorreyParams,
    NormMethod,
    NormReport,
    ParameterError,
    PiecewiseRadialPower,
    epsilon_upper_bound_raw,
    log_domain_pow,
)

_GOLDEN_RATIO_CONJ = (math.sqrt(5.0) - 1.0) / 2.0


def power_norm_exact(params: MorreyParams) -> float:
    """Norm of the pure power |x|^(-d/q): (omega/d)^(1/q) * (q/(q-p))^(1/p).

    The centered quantity |B(0,r)|^(1/q-1/p) (int_B |x|^(-dp/q))^(1/p) is
    independent of r and off-center balls never beat centered ones for a
    radially decreasing profile, so this is the supremum.
    """
    p, q = params.p, params.q
    log_ball = math.log(params.sphere_area / params.d)
    return math.exp(log_ball / q + math.log(q / (q - p)) / p)


def _log_power_diff(alpha: float, lo: float, hi: float) -> float:
    """log(hi^alpha - lo^alpha) without cancellation; requires 0 <= lo < hi."""
    if lo == 0.0:
        return alpha * math.log(hi)
    return alpha * math.log(hi) + math.log(-math.expm1(alpha * math.log(lo / hi)))


def annulus_p_integral(params: MorreyParams, ann: Annulus) -> float:
    """int over the annulus of |x|^(-d p/q) dx."""
    if not ann.bounded:
        raise ParameterError("the p-integral diverges on an unbounded annulus")
    alpha = params.alpha
    return math.exp(
        math.log(params.sphere_area / alpha) + _log_power_diff(alpha, ann.r_lo, ann.r_hi)
    )


def local_quantity(params: MorreyParams, ball_radius: float, ann: Annulus) -> float:
    """|B(0, ball_radius)|^(1/q - 1/p) * (annulus p-integral)^(1/p).

    Invariant under joint dilation of the ball and the annulus: the d-th
    power of the radius in the ball factor cancels the alpha/p power coming
    out of the integral.
    """
    if not (ball_radius > 0 and math.isfinite(ball_radius)):
        raise ParameterError(f"ball_radius must be positive and finite, got {ball_radius}")
    if not ann.bounded:
        raise ParameterError("annulus must be bounded")
    p, q, d = params.p, params.q, params.d
    alpha = params.alpha
    log_ball = math.log(params.sphere_area / d) + d * math.log(ball_radius)
    log_integral = math.log(params.sphere_area / alpha) + _log_power_diff(
        alpha, ann.r_lo, ann.r_hi
    )
    return math.exp((1.0 / q - 1.0 / p) * log_ball + log_integral / p)


def epsilon_upper_bound(params: MorreyParams, delta: float) -> float:
    """Largest admissible epsilon for a given delta: (1-(1-delta)^p)^(q/(dq-dp)).

    Any epsilon strictly below makes (1 - eps^alpha)^(1/p) exceed 1 - delta.
    """
    if not (0.0 < delta < 1.0):
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    return epsilon_upper_bound_raw(params, delta)


def chunk_lower_bound(params: MorreyParams, epsilon: float) -> float:
    """(1 - epsilon^alpha)^(1/p) times the pure-power norm.

    Lower bound for the norm of the power function restricted to any annulus
    (eps^(k+1), eps^k); witnessed by the centered ball at the outer radius.
    """
    if not (0.0 < epsilon < 1.0):
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    alpha = params.alpha
    factor = log_domain_pow(-math.expm1(alpha * math.log(epsilon)), 1.0 / params.p)
    return factor * power_norm_exact(params)


def _centered_value(profile: PiecewiseRadialPower, r: float) -> float:
    """Centered-ball quantity at radius r for a bounded profile."""
    params = profile.params
    p, q = params.p, params.q
    alpha = params.alpha
    omega = params.sphere_area
    mass = 0.0
    for ann, coeff in profile.segments:
        if coeff == 0.0 or r <= ann.r_lo:
            continue
        hi = min(r, ann.r_hi)
        mass += abs(coeff) ** p * math.exp(
            math.log(omega / alpha) + _log_power_diff(alpha, ann.r_lo, hi)
        )
    if mass == 0.0:
        return 0.0
    log_ball = math.log(omega / params.d) + params.d * math.log(r)
    return math.exp((1.0 / q - 1.0 / p) * log_ball + math.log(mass) / p)


def _golden_max(f, lo: float, hi: float, rel_tol: float = 1e-12):
    """Golden-section maximization on [lo, hi]; returns (argmax, max)."""
    a, b = lo, hi
    h = b - a
    c = b - _GOLDEN_RATIO_CONJ * h
    d = a + _GOLDEN_RATIO_CONJ * h
    fc, fd = f(c), f(d)
    while h > rel_tol * max(abs(a), abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = b - _GOLDEN_RATIO_CONJ * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _GOLDEN_RATIO_CONJ * h
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def centered_norm(profile: PiecewiseRadialPower) -> NormReport:
    """Supremum of the centered-ball quantity over all radii.

    The objective is smooth between annulus boundaries, so each bracket is
    maximized by golden section and every boundary is evaluated explicitly.
    Beyond the support the objective decays like r^(d(1/q-1/p)); the search
    cap at ten times the outer support radius is therefore free slack.
    """
    if profile.is_pure_power:
        value = power_norm_exact(profile.params)
        return NormReport(
            value=value,
            argmax_ball=Ball(0.0, 1.0),
            method=NormMethod.CLOSED_FORM,
            abs_uncertainty=0.0,
        )

    # Below the smallest positive boundary the objective is constant (only a
    # zero-based segment can contribute, and its restriction quantity does
    # not depend on r), so the bracket list can start there.
    breakpoints = [b for b in profile.boundaries if b > 0.0]
    breakpoints.append(10.0 * profile.support_radius)

    objective = lambda r: _centered_value(profile, r)
    best_r, best_v = breakpoints[0], objective(breakpoints[0])
    for lo, hi in zip(breakpoints, breakpoints[1:]):
        if not hi > lo:
            continue
        for r, v in (_golden_max(objective, lo, hi), (hi, objective(hi))):
            if v > best_v:
                best_r, best_v = r, v

    return NormReport(
        value=best_v,
        argmax_ball=Ball(0.0, best_r),
        method=NormMethod.CENTERED_SEARCH,
        abs_uncertainty=4.0 * best_v * 1e-12,
    )
