"""Witness families for the failure of uniform non-l1(n)-ness, and lower
bounds for the n-th James and Von Neumann-Jordan constants.

A witness family for a given delta lives on the K = 2^(n-1) nested annuli
(eps^(k+1), eps^k).  Function i carries the i-th row of the block sign
matrix, so for every choice of signs the combination sum_i s_i f_i has one
annulus where all rows agree and the coefficients add up to n.  That single
annulus already pushes the norm above n(1-eps^alpha)^(1/p) times the
pure-power norm, which beats the n(1-delta) threshold whenever eps is small
enough.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    Annulus,
    FiniteVectorTuple,
    MorreyParams,
    NumericalFailure,
    ParameterError,
    PiecewiseRadialPower,
    SignMatrix,
    WitnessFamily,
    sign_matrix,
    thread_count,
    warn_if_underflow,
)
from . import closedform
from .numeric import SearchConfig, morrey_norm_numeric

#: Search resolution used for witness verification.  Combination profiles
#: carry every annulus boundary in the grid, and the decisive centered balls
#: are evaluated in closed form, so a moderate off-center lattice suffices.
WITNESS_SEARCH = SearchConfig(center_grid=56, radius_grid=72, quad_points=20)

JAMES = "james"
VON_NEUMANN_JORDAN = "von_neumann_jordan"


@dataclass(frozen=True)
class SignedCombinationReport:
    """All 2^(n-1) signed-combination norms of a witness family.

    Patterns list the signs (s_2, ..., s_n); the first sign is pinned to +1
    because the norm is even.  norm_value belongs to the minimizing pattern.
    """

    patterns: tuple
    reports: tuple
    min_over_patterns: float
    pattern: tuple
    norm_value: float

    def __post_init__(self):
        values = [r.value for r in self.reports]
        if not values or min(values) != self.min_over_patterns:
            raise ParameterError("min_over_patterns must be the minimum norm")

    @property
    def norm_values(self) -> np.ndarray:
        return np.array([r.value for r in self.reports])


@dataclass(frozen=True)
class ConstantEstimate:
    """A certified lower bound for one of the n-indexed geometric constants."""

    kind: str
    n: int
    lower_bound: float
    witness: str
    space: str

    def __post_init__(self):
        if self.kind not in (JAMES, VON_NEUMANN_JORDAN):
            raise ParameterError(f"unknown constant kind {self.kind!r}")
        # Both constants sit in [1, n]; landing outside signals a bug.
        if not (1.0 - 1e-9 <= self.lower_bound <= self.n * (1.0 + 1e-9)):
            raise ParameterError(
                f"lower bound {self.lower_bound} escapes [1, {self.n}]"
            )


@dataclass(frozen=True)
class NonEll1nReport:
    """Outcome of one witness-family verification run."""

    passed: bool
    params: MorreyParams
    n: int
    delta: float
    epsilon: float
    shared_norm: float
    threshold: float
    theoretical_lower_bound: float
    combinations: SignedCombinationReport


@dataclass(frozen=True)
class JNJCheckReport:
    """Worst case of the min-vs-quadratic-mean step over a sample of tuples."""

    passed: bool
    worst_ratio: float
    worst_index: int


def _epsilon_boundaries(epsilon: float, num_annuli: int) -> np.ndarray:
    log_eps = math.log(epsilon)
    return np.exp(np.arange(num_annuli + 1) * log_eps)


def build_witnesses(params: MorreyParams, n: int, delta: float,
                    epsilon: float | None = None) -> WitnessFamily:
    """Construct the n normalized witness functions for a given delta.

    Annulus k = 0..K-1 is (eps^(k+1), eps^k); it receives the sign stored in
    column K-1-k of the sign matrix, so column order runs from the innermost
    annulus outward.  All functions share the modulus of the power function
    restricted to (eps^K, 1) and are divided by that restriction's norm.
    """
    if not (0.0 < delta < 1.0):
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    matrix = sign_matrix(n)
    bound = closedform.epsilon_upper_bound(params, delta)
    if epsilon is None:
        epsilon = bound / 2.0
    elif not (0.0 < epsilon < bound):
        raise ParameterError(
            f"epsilon must lie strictly inside (0, {bound}), got {epsilon}"
        )
    num_annuli = matrix.num_patterns
    warn_if_underflow(params, epsilon, num_annuli)

    radii = _epsilon_boundaries(epsilon, num_annuli)
    shared = closedform.centered_norm(
        PiecewiseRadialPower.power_restriction(params, radii[num_annuli], 1.0)
    ).value

    functions = []
    for i in range(n):
        segments = []
        for k in range(num_annuli - 1, -1, -1):
            sign = float(matrix.entries[i, num_annuli - 1 - k])
            segments.append((Annulus(radii[k + 1], radii[k]), sign / shared))
        functions.append(PiecewiseRadialPower(params, tuple(segments)))

    return WitnessFamily(
        params=params, n=n, delta=delta, epsilon=epsilon,
        functions=tuple(functions), shared_norm=shared,
    )


def combination_coefficients(matrix: SignMatrix) -> np.ndarray:
    """Per-column coefficients of every signed combination of the rows.

    Row j of the result is the coefficient vector of the combination whose
    signs are column j of the matrix; entry (j, c) is the coefficient on
    column c.  Exactly one entry per row reaches n, where the sign pattern
    matches the column.
    """
    m = matrix.entries.astype(np.int32)
    return m.T @ m


def _combination_profiles(family: WitnessFamily):
    matrix = sign_matrix(family.n)
    coeffs = combination_coefficients(matrix)
    # Segments are stored inward-first and column 0 is the innermost annulus,
    # so segment index and column index coincide.
    annuli = [ann for ann, _ in family.functions[0].segments]
    profiles = []
    for j in range(matrix.num_patterns):
        segments = tuple(
            (ann, float(coeffs[j, idx]) / family.shared_norm)
            for idx, ann in enumerate(annuli)
        )
        pattern = tuple(int(s) for s in matrix.entries[1:, j])
        profiles.append((pattern, PiecewiseRadialPower(family.params, segments)))
    return profiles


def min_signed_norm(family: WitnessFamily,
                    cfg: SearchConfig = WITNESS_SEARCH) -> SignedCombinationReport:
    """Norms of all 2^(n-1) signed combinations and their minimum.

    Combinations can mix signs, so their moduli need not be radially
    monotone; every norm goes through the off-center search.
    """
    jobs = _combination_profiles(family)
    workers = thread_count()
    if workers == 1:
        reports = [morrey_norm_numeric(profile, cfg) for _, profile in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(
                pool.map(lambda job: morrey_norm_numeric(job[1], cfg), jobs)
            )
    values = [r.value for r in reports]
    argmin = int(np.argmin(values))
    return SignedCombinationReport(
        patterns=tuple(pattern for pattern, _ in jobs),
        reports=tuple(reports),
        min_over_patterns=values[argmin],
        pattern=jobs[argmin][0],
        norm_value=values[argmin],
    )


def theoretical_lower_bound(family: WitnessFamily) -> float:
    """n (1 - eps^alpha)^(1/p) ||power|| / shared_norm, valid for every pattern."""
    return (
        family.n
        * closedform.chunk_lower_bound(family.params, family.epsilon)
        / family.shared_norm
    )


_ENVELOPE_SLACK = 1e-8


def _check_envelope(family: WitnessFamily, report: SignedCombinationReport) -> None:
    """Every combination norm must sit inside the two-sided analytic bound."""
    lower = theoretical_lower_bound(family)
    upper = float(family.n)
    for r in report.reports:
        if r.value < lower * (1.0 - _ENVELOPE_SLACK):
            raise NumericalFailure(
                f"combination norm {r.value} fell below the analytic bound {lower}"
            )
        if r.value > upper * (1.0 + _ENVELOPE_SLACK):
            raise NumericalFailure(
                f"combination norm {r.value} exceeds the cap {upper}"
            )


def verify_non_ell1n(params: MorreyParams, n: int, delta: float,
                     epsilon: float | None = None,
                     cfg: SearchConfig = WITNESS_SEARCH) -> NonEll1nReport:
    """Check min over signs of ||f_1 +- ... +- f_n|| > n(1-delta) by direct
    enumeration on a freshly built witness family."""
    family = build_witnesses(params, n, delta, epsilon)
    report = min_signed_norm(family, cfg)
    _check_envelope(family, report)
    threshold = n * (1.0 - delta)
    return NonEll1nReport(
        passed=bool(report.min_over_patterns > threshold),
        params=params,
        n=n,
        delta=delta,
        epsilon=family.epsilon,
        shared_norm=family.shared_norm,
        threshold=threshold,
        theoretical_lower_bound=theoretical_lower_bound(family),
        combinations=report,
    )


@dataclass(frozen=True)
class LadderRow:
    delta: float
    epsilon: float
    min_signed_norm: float
    nj_ratio: float
    theoretical_lower_bound: float


@dataclass(frozen=True)
class ConstantsLadder:
    """Per-delta witness results plus the two resulting lower bounds."""

    params: MorreyParams
    n: int
    rows: tuple
    james: ConstantEstimate
    von_neumann_jordan: ConstantEstimate


def _validate_delta_sequence(delta_sequence) -> list:
    deltas = [float(x) for x in delta_sequence]
    if not deltas:
        raise ParameterError("delta sequence must be nonempty")
    for x in deltas:
        if not (0.0 < x < 1.0):
            raise ParameterError(f"delta must lie in (0, 1), got {x}")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ParameterError("delta sequence must be strictly decreasing")
    return deltas


def estimate_constants(params: MorreyParams, n: int, delta_sequence,
                       cfg: SearchConfig = WITNESS_SEARCH) -> ConstantsLadder:
    """Run the witness ladder once and derive both lower bounds from it."""
    deltas = _validate_delta_sequence(delta_sequence)
    rows = []
    best_min = (-math.inf, None)
    best_ratio = (-math.inf, None)
    for delta in deltas:
        family = build_witnesses(params, n, delta)
        report = min_signed_norm(family, cfg)
        _check_envelope(family, report)
        ratio = nj_ratio(family, cfg=cfg, combinations=report)
        rows.append(LadderRow(
            delta=delta,
            epsilon=family.epsilon,
            min_signed_norm=report.min_over_patterns,
            nj_ratio=ratio,
            theoretical_lower_bound=theoretical_lower_bound(family),
        ))
        if report.min_over_patterns > best_min[0]:
            best_min = (report.min_over_patterns, delta)
        if ratio > best_ratio[0]:
            best_ratio = (ratio, delta)

    space = f"morrey(p={params.p}, q={params.q}, d={params.d})"
    james = ConstantEstimate(
        kind=JAMES, n=n, lower_bound=best_min[0],
        witness=f"witness family at delta={best_min[1]}", space=space,
    )
    nj = ConstantEstimate(
        kind=VON_NEUMANN_JORDAN, n=n, lower_bound=best_ratio[0],
        witness=f"witness family at delta={best_ratio[1]}", space=space,
    )
    return ConstantsLadder(params=params, n=n, rows=tuple(rows), james=james,
                           von_neumann_jordan=nj)


def james_lower_bound(params: MorreyParams, n: int, delta_sequence,
                      cfg: SearchConfig = WITNESS_SEARCH) -> ConstantEstimate:
    """Sup of the per-delta minimum signed norms; tends to n as delta -> 0."""
    return estimate_constants(params, n, delta_sequence, cfg).james


def nj_lower_bound(params: MorreyParams, n: int, delta_sequence,
                   cfg: SearchConfig = WITNESS_SEARCH) -> ConstantEstimate:
    """Sup of the quadratic sign-sum ratio over the same witness ladder."""
    return estimate_constants(params, n, delta_sequence, cfg).von_neumann_jordan


def _tuple_signed_norms(vectors: FiniteVectorTuple) -> np.ndarray:
    matrix = sign_matrix(vectors.n)
    combos = matrix.entries.astype(float).T @ vectors.vectors
    return vectors.vector_norms(combos)


def nj_ratio(obj, cfg: SearchConfig = WITNESS_SEARCH,
             combinations: SignedCombinationReport | None = None) -> float:
    """sum over signs of ||x_1 +- ... +- x_n||^2 over 2^(n-1) sum ||x_i||^2.

    Equals 1 identically for Euclidean tuples: expanding the squares, every
    cross term is multiplied by a balanced set of signs and cancels.
    """
    if isinstance(obj, FiniteVectorTuple):
        norms = obj.vector_norms()
        if np.any(norms == 0.0):
            raise ParameterError("all tuple elements must be nonzero")
        signed = _tuple_signed_norms(obj)
        return float(np.sum(signed**2) / (signed.size * np.sum(norms**2)))
    if isinstance(obj, WitnessFamily):
        report = combinations if combinations is not None else min_signed_norm(obj, cfg)
        signed = report.norm_values
        # All family members share one modulus, hence one norm.
        base = morrey_norm_numeric(obj.functions[0], cfg).value
        return float(np.sum(signed**2) / (signed.size * obj.n * base**2))
    raise ParameterError(f"unsupported operand {type(obj).__name__}")


def j_nj_inequality_check(samples, cfg: SearchConfig = WITNESS_SEARCH,
                          rel_tol: float = 1e-9) -> JNJCheckReport:
    """Verify min^2 <= mean of squared signed norms on every sample.

    This is the quadratic-mean step that links the two constants; taking
    suprema over unit tuples turns it into J^2 <= n * NJ.  Returns the worst
    min^2 / mean-square ratio and the index of the worst sample.
    """
    worst = (-math.inf, -1)
    for idx, sample in enumerate(samples):
        if isinstance(sample, FiniteVectorTuple):
            signed = _tuple_signed_norms(sample)
        elif isinstance(sample, WitnessFamily):
            signed = min_signed_norm(sample, cfg).norm_values
        else:
            raise ParameterError(f"unsupported sample {type(sample).__name__}")
        mean_sq = float(np.mean(signed**2))
        if mean_sq == 0.0:
            continue  # all combinations vanish; the bound is trivial
        ratio = float(np.min(signed)) ** 2 / mean_sq
        if ratio > worst[0]:
            worst = (ratio, idx)
    return JNJCheckReport(
        passed=bool(worst[0] <= 1.0 + rel_tol),
        worst_ratio=worst[0],
        worst_index=worst[1],
    )
