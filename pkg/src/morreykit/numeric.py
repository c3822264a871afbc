"""Brute-force norm evaluation: off-center ball integrals via the radial
reduction, grid search over (center distance, radius), local refinement,
and Monte Carlo cross-checks.

For a radial integrand, the integral over a ball B(a, R) collapses to

    int_0^inf g(r) * A_d(r; a, R) dr,

where A_d is the surface measure of the origin-centered r-sphere inside the
ball: a full sphere for r <= R - a, empty beyond r >= R + a (or inside
r <= a - R when the origin lies outside), and a spherical cap in between.
Inside annuli the power part integrates in closed form; only the cap-angle
factor needs quadrature.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .core import (
    Ball,
    NormMethod,
    NormReport,
    NumericalFailure,
    ParameterError,
    PiecewiseRadialPower,
    sphere_area,
    thread_count,
)


@dataclass(frozen=True)
class SearchConfig:
    """Resolution knobs for the supremum search and the quadratures."""

    center_grid: int = 200
    radius_grid: int = 200
    quad_points: int = 24
    mc_samples: int = 1_000_000
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("center_grid", "radius_grid", "quad_points", "mc_samples"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be >= 1")


DEFAULT_SEARCH = SearchConfig()


def sin_power_integral(m: int, t):
    """int_0^t sin(x)^m dx for t in [0, pi], vectorized in t.

    m = 0 and m = 1 are elementary; otherwise the integral is half an
    incomplete beta function in sin(t)^2, reflected about pi/2.
    """
    if m < 0:
        raise ParameterError(f"sine power must be >= 0, got {m}")
    t = np.asarray(t, dtype=float)
    if m == 0:
        return t + 0.0
    if m == 1:
        return 1.0 - np.cos(t)
    a = 0.5 * (m + 1)
    full = special.beta(a, 0.5)
    s2 = np.sin(np.minimum(t, np.pi - t)) ** 2
    lower = 0.5 * full * special.betainc(a, 0.5, s2)
    return np.where(t <= 0.5 * np.pi, lower, full - lower)


def shell_area(d: int, r, center_dist: float, radius: float):
    """Surface measure of the sphere {|x| = r} inside B(a, R), vectorized in r.

    For d = 1 this is the number of points of {-r, +r} inside the interval;
    integrating it in r gives interval lengths, which is the correct
    one-dimensional reduction.
    """
    if d < 1:
        raise ParameterError(f"dimension must be >= 1, got {d}")
    a, big_r = float(center_dist), float(radius)
    r = np.asarray(r, dtype=float)
    if d == 1:
        inside_pos = np.abs(r - a) < big_r
        inside_neg = r + a < big_r
        return inside_pos.astype(float) + inside_neg.astype(float)
    full = sphere_area(d) * r ** (d - 1)
    if a == 0.0:
        return np.where(r < big_r, full, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_half = (a * a + r * r - big_r * big_r) / (2.0 * a * r)
    theta = np.arccos(np.clip(cos_half, -1.0, 1.0))
    cap = sphere_area(d - 1) * r ** (d - 1) * sin_power_integral(d - 2, theta)
    out = np.where(r <= big_r - a, full, cap)
    return np.where((r >= a + big_r) | (r <= a - big_r), 0.0, out)


def _log_pow(x, a_exp):
    """Elementwise x**a_exp via exp(a*log x) with x <= 0 mapped to 0 (a_exp > 0)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(a_exp * np.log(x))
    return np.where(x > 0.0, out, 0.0)


def _alpha_diff(lo: float, hi: float, alpha: float) -> float:
    """hi^alpha - lo^alpha without cancellation for thin windows."""
    if hi <= lo:
        return 0.0
    if lo == 0.0:
        return math.exp(alpha * math.log(hi))
    return -math.exp(alpha * math.log(hi)) * math.expm1(alpha * math.log(lo / hi))


def _segment_arrays(profile: PiecewiseRadialPower):
    lo = np.array([ann.r_lo for ann, _ in profile.segments])
    hi = np.array([ann.r_hi for ann, _ in profile.segments])
    cp = np.abs(profile.coefficients) ** profile.params.p
    return lo, hi, cp


def ball_p_integral(profile: PiecewiseRadialPower, ball: Ball,
                    cfg: SearchConfig = DEFAULT_SEARCH) -> float:
    """int over the ball of |profile|^p, to near machine accuracy.

    The full-sphere region is handled by the closed-form annulus primitive.
    On the cap region the substitution u = r^alpha turns the radial power
    into du, leaving the bounded cap-angle factor as the only integrand for
    adaptive quadrature.
    """
    params = profile.params
    p, q, d = params.p, params.q, params.d
    alpha = params.alpha
    a, big_r = ball.center_dist, ball.radius
    lo, hi, cp = _segment_arrays(profile)
    hi = np.minimum(hi, a + big_r)  # nothing beyond the ball matters

    if d == 1:
        total = 0.0
        for lo_k, hi_k, cp_k in zip(lo, hi, cp):
            if cp_k == 0.0:
                continue
            for w_lo, w_hi in ((max(a - big_r, 0.0), a + big_r), (0.0, big_r - a)):
                s_lo, s_hi = max(lo_k, w_lo), min(hi_k, w_hi)
                total += cp_k * _alpha_diff(s_lo, s_hi, alpha) / alpha
        return float(total)

    omega_full = sphere_area(d)
    omega_cap = sphere_area(d - 1)
    full_hi = max(big_r - a, 0.0)
    cap_lo, cap_hi = abs(big_r - a), a + big_r
    total = 0.0
    for lo_k, hi_k, cp_k in zip(lo, hi, cp):
        if cp_k == 0.0 or hi_k <= lo_k:
            continue
        total += cp_k * omega_full * _alpha_diff(lo_k, min(hi_k, full_hi), alpha) / alpha
        s_lo, s_hi = max(lo_k, cap_lo), min(hi_k, cap_hi)
        if s_hi > s_lo and a > 0.0:
            u_lo = float(_log_pow(s_lo, alpha))
            u_hi = float(_log_pow(s_hi, alpha))

            def cap_angle(u):
                r = u ** (1.0 / alpha)
                cos_half = (a * a + r * r - big_r * big_r) / (2.0 * a * r)
                return float(
                    sin_power_integral(d - 2, math.acos(min(1.0, max(-1.0, cos_half))))
                )

            width = u_hi - u_lo
            if width <= 0.0:
                continue
            if width < 1e-12 * u_hi:
                # Near-centered balls shrink the cap region to a sliver at
                # the float resolution limit, where adaptive subdivision is
                # impossible; the midpoint rule is exact to within the
                # sliver's own (negligible) weight.
                val = width * cap_angle(0.5 * (u_lo + u_hi))
            else:
                res = integrate.quad(
                    cap_angle, u_lo, u_hi, epsabs=1e-13, epsrel=1e-11,
                    limit=200, full_output=True,
                )
                if len(res) > 3:  # quad appends an explanation on failure
                    raise NumericalFailure("cap-region quadrature did not converge")
                val = res[0]
            total += cp_k * omega_cap * val / alpha
    return float(total)


def ball_p_integral_mc(profile: PiecewiseRadialPower, ball: Ball,
                       cfg: SearchConfig = DEFAULT_SEARCH):
    """Monte Carlo estimate of the ball p-integral; returns (value, std_error).

    Samples are uniform in the ball; worker streams are spawned from the
    seed so the result is reproducible for a fixed seed and worker count.
    """
    params = profile.params
    d = params.d
    a, big_r = ball.center_dist, ball.radius
    lo, hi, cp = _segment_arrays(profile)
    exponent = -d * params.p / params.q
    volume = params.ball_volume(big_r)

    workers = thread_count()
    seeds = np.random.SeedSequence(cfg.rng_seed).spawn(workers)
    per_worker = int(math.ceil(cfg.mc_samples / workers))

    def run(seed):
        rng = np.random.default_rng(seed)
        direction = rng.normal(size=(per_worker, d))
        direction /= np.linalg.norm(direction, axis=1)[:, None]
        pts = direction * (big_r * rng.random(per_worker) ** (1.0 / d))[:, None]
        pts[:, 0] += a
        r = np.linalg.norm(pts, axis=1)
        vals = np.zeros(per_worker)
        for lo_k, hi_k, cp_k in zip(lo, hi, cp):
            mask = (r > lo_k) & (r < hi_k)
            if cp_k != 0.0 and mask.any():
                vals[mask] = cp_k * r[mask] ** exponent
        return vals

    if workers == 1:
        samples = run(seeds[0])
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = np.concatenate(list(pool.map(run, seeds)))
    mean = float(samples.mean())
    stderr = float(samples.std(ddof=1) / math.sqrt(samples.size))
    return volume * mean, volume * stderr


def monotone_profile_check(profile: PiecewiseRadialPower) -> bool:
    """True when the profile modulus is radially nonincreasing on all of
    (0, inf), gaps between and below the listed annuli counting as zero.

    This is the sufficient condition for the centered-ball reduction: by the
    layer-cake decomposition the superlevel sets are centered balls, and a
    ball captures the most of a concentric ball, so moving the center off
    the origin only loses mass.  Boundary values |c_k| r^(-d/q) are compared
    explicitly because a larger coefficient on an inner annulus is fine as
    long as the jump at the shared boundary still goes downward.

    A hole below the support disqualifies a profile even when the values on
    the support itself decrease: a small ball hugging the inner edge of a
    thin shell far from the origin can beat every centered ball (d p < q
    makes the ball-volume penalty R^(d/q) weaker than the centered gain).
    """
    exponent = -profile.params.d / profile.params.q
    values = []
    previous_hi = 0.0
    for ann, coeff in profile.segments:
        c = abs(coeff)
        if ann.r_lo > previous_hi:
            values.append(0.0)  # gap: the profile vanishes there
        if ann.r_lo == 0.0:
            values.append(math.inf if c > 0.0 else 0.0)
        else:
            values.append(c * ann.r_lo**exponent)
        values.append(0.0 if not ann.bounded else c * ann.r_hi**exponent)
        previous_hi = ann.r_hi
    slack = 1.0 + 1e-12
    return all(v1 * slack >= v2 for v1, v2 in zip(values, values[1:]))


# --- vectorized objective over batches of balls -----------------------------


class _BatchObjective:
    """Morrey quantity evaluated on arrays of (center_dist, radius) pairs.

    Fixed-order Gauss-Legendre on the cap region (after the u = r^alpha
    substitution) keeps the whole grid stage in numpy; accuracy there only
    has to be good enough to find the right basin, the winner is re-scored
    with the adaptive integral.
    """

    def __init__(self, profile: PiecewiseRadialPower, quad_points: int):
        params = profile.params
        self.d = params.d
        self.p, self.q = params.p, params.q
        self.alpha = params.alpha
        self.lo, self.hi, self.cp = _segment_arrays(profile)
        self.vol_coeff = params.sphere_area / self.d
        nodes, weights = np.polynomial.legendre.leggauss(quad_points)
        self.nodes = 0.5 * (nodes + 1.0)
        self.weights = 0.5 * weights

    def __call__(self, center, radius):
        a = np.atleast_1d(np.asarray(center, dtype=float))
        big_r = np.atleast_1d(np.asarray(radius, dtype=float))
        if self.d == 1:
            mass = self._mass_1d(a, big_r)
        else:
            mass = self._mass_full(a, big_r) + self._mass_cap(a, big_r)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_ball = np.log(self.vol_coeff) + self.d * np.log(big_r)
            log_val = (1.0 / self.q - 1.0 / self.p) * log_ball + np.log(mass) / self.p
            value = np.exp(log_val)
        return np.where(np.isfinite(value), value, 0.0)

    def _interval_mass(self, w_lo, w_hi):
        """sum_k cp_k * (closed-form power integral over seg_k cut to [w_lo, w_hi])."""
        s_lo = np.maximum(self.lo[None, :], w_lo[:, None])
        s_hi = np.minimum(self.hi[None, :], w_hi[:, None])
        diff = np.clip(
            _log_pow(s_hi, self.alpha) - _log_pow(s_lo, self.alpha), 0.0, None
        )
        return (diff / self.alpha) @ self.cp

    def _mass_1d(self, a, big_r):
        return self._interval_mass(np.maximum(a - big_r, 0.0), a + big_r) + \
            self._interval_mass(np.zeros_like(a), big_r - a)

    def _mass_full(self, a, big_r):
        return sphere_area(self.d) * self._interval_mass(
            np.zeros_like(a), np.maximum(big_r - a, 0.0)
        )

    def _mass_cap(self, a, big_r):
        s_lo = np.maximum(self.lo[None, :], np.abs(big_r - a)[:, None])
        s_hi = np.minimum(self.hi[None, :], (big_r + a)[:, None])
        u_lo = _log_pow(s_lo, self.alpha)
        u_hi = _log_pow(s_hi, self.alpha)
        width = np.clip(u_hi - u_lo, 0.0, None)
        active = (width > 0.0) & (a[:, None] > 0.0)
        if not active.any():
            return np.zeros(a.shape[0])
        u = u_lo[..., None] + width[..., None] * self.nodes  # (B, K, Q)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = u ** (1.0 / self.alpha)
            cos_half = (
                a[:, None, None] ** 2 + r * r - big_r[:, None, None] ** 2
            ) / (2.0 * a[:, None, None] * r)
        # Inactive (zero-width or centered) panels produce 0/0 above; any
        # value works there because the panel weight is zero.
        cos_half = np.nan_to_num(cos_half, nan=1.0, posinf=1.0, neginf=-1.0)
        theta = np.arccos(np.clip(cos_half, -1.0, 1.0))
        angle = sin_power_integral(self.d - 2, theta)
        panel = (angle @ self.weights) * width * active
        return sphere_area(self.d - 1) / self.alpha * (panel @ self.cp)


def _radius_grid(profile: PiecewiseRadialPower, cfg: SearchConfig) -> np.ndarray:
    bounds = [b for b in profile.boundaries if b > 0.0 and math.isfinite(b)]
    hi = profile.support_radius
    r_min = min(bounds) * 1e-3
    radii = np.geomspace(r_min, 4.0 * hi, cfg.radius_grid)
    return np.unique(np.concatenate([radii, np.asarray(bounds, dtype=float)]))


def _center_grid(profile: PiecewiseRadialPower, cfg: SearchConfig) -> np.ndarray:
    bounds = [b for b in profile.boundaries if b > 0.0 and math.isfinite(b)]
    hi = profile.support_radius
    n_lin = max(cfg.center_grid // 2, 1)
    n_log = max(cfg.center_grid - n_lin, 1)
    lin = np.linspace(0.0, 2.0 * hi, n_lin)
    log = np.geomspace(min(bounds) * 1e-2, 2.0 * hi, n_log)
    return np.unique(np.concatenate([lin, log, np.asarray(bounds, dtype=float)]))


def _pure_power_report(profile: PiecewiseRadialPower) -> NormReport:
    objective = _BatchObjective(profile, 4)
    radii = np.array([0.25, 1.0, 7.5])
    vals = objective(np.zeros_like(radii), radii)
    spread = float(vals.max() - vals.min())
    return NormReport(
        value=float(vals.max()),
        argmax_ball=Ball(0.0, float(radii[int(np.argmax(vals))])),
        method=NormMethod.CENTERED_SEARCH,
        abs_uncertainty=max(spread, float(vals.max()) * 1e-14),
    )


def morrey_norm_numeric(profile: PiecewiseRadialPower,
                        cfg: SearchConfig = DEFAULT_SEARCH) -> NormReport:
    """Supremum search over center distance and radius.

    Two stages: a multiscale grid (dense centered sweep plus an off-center
    lattice, both augmented with every annulus boundary), then Nelder-Mead
    refinement in (center, log radius) from the best grid point.  The
    returned value re-scores the winning ball with the adaptive integral;
    the uncertainty is the value movement in the final refinement step.
    """
    if profile.is_pure_power:
        # The off-center supremum coincides with the centered one here, and
        # the centered quantity does not depend on the radius.
        return _pure_power_report(profile)

    objective = _BatchObjective(profile, cfg.quad_points)
    radii = _radius_grid(profile, cfg)
    centers = _center_grid(profile, cfg)

    # Dense centered sweep: closed-form per ball, so extra resolution is free.
    dense_r = np.unique(np.concatenate([radii, np.geomspace(
        radii[0], radii[-1], 4 * cfg.radius_grid)]))
    cen_vals = objective(np.zeros_like(dense_r), dense_r)
    best_idx = int(np.argmax(cen_vals))
    best = (0.0, float(dense_r[best_idx]), float(cen_vals[best_idx]))

    aa, rr = np.meshgrid(centers, radii, indexing="ij")
    aa, rr = aa.ravel(), rr.ravel()
    chunk = 8192
    for start in range(0, aa.size, chunk):
        vals = objective(aa[start:start + chunk], rr[start:start + chunk])
        idx = int(np.argmax(vals))
        if float(vals[idx]) > best[2]:
            best = (float(aa[start + idx]), float(rr[start + idx]), float(vals[idx]))

    if best[2] == 0.0:
        return NormReport(
            value=0.0,
            argmax_ball=Ball(best[0], best[1]),
            method=NormMethod.OFFCENTER_SEARCH,
            abs_uncertainty=0.0,
        )

    a0, r0, v0 = best
    history = [v0]

    def negated(x):
        value = float(objective(abs(x[0]), math.exp(x[1]))[0])
        if value > history[-1]:
            history.append(value)
        return -value

    result = optimize.minimize(
        negated, np.array([a0, math.log(r0)]), method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": v0 * 1e-13, "maxiter": 400},
    )
    a_ref, r_ref = abs(float(result.x[0])), math.exp(float(result.x[1]))
    refined = float(-result.fun)

    # Re-score the winner (and the grid best) with the adaptive integral.
    candidates = [(a0, r0)]
    if refined >= v0:
        candidates.insert(0, (a_ref, r_ref))
    best_val, best_ball = -1.0, None
    for a_c, r_c in candidates:
        ball = Ball(a_c, r_c)
        mass = ball_p_integral(profile, ball, cfg)
        value = 0.0
        if mass > 0.0:
            params = profile.params
            log_ball = math.log(params.sphere_area / params.d) + params.d * math.log(r_c)
            value = math.exp(
                (1.0 / params.q - 1.0 / params.p) * log_ball
                + math.log(mass) / params.p
            )
        if value > best_val:
            best_val, best_ball = value, ball

    _check_divergence(objective, profile, best_ball, best_val)

    last_step = history[-1] - history[-2] if len(history) > 1 else 0.0
    uncertainty = max(last_step, abs(refined - best_val), best_val * 1e-9)
    return NormReport(
        value=best_val,
        argmax_ball=best_ball,
        method=NormMethod.OFFCENTER_SEARCH,
        abs_uncertainty=uncertainty,
    )


def _check_divergence(objective, profile, ball, value):
    """Raise when the search ended on the outer boundary still climbing."""
    cap = 4.0 * profile.support_radius
    if ball.radius < 0.95 * cap:
        return
    probes = objective(
        np.full(3, ball.center_dist), ball.radius * np.array([1.0, 1.5, 2.25])
    )
    if probes[2] > probes[1] > probes[0] and probes[2] > value:
        raise NumericalFailure(
            "objective still increasing at the radius search boundary"
        )
