"""Random generators for cross-validation batteries: profiles with
controllable monotonicity, exponent triples, and finite vector tuples."""

import numpy as np

from .core import Annulus, FiniteVectorTuple, MorreyParams, PiecewiseRadialPower


def random_params(rng: np.random.Generator, d_max: int = 3,
                  q_max: float = 6.0) -> MorreyParams:
    p = 1.0 + 2.5 * rng.random()
    q = p + 0.3 + (q_max - p - 0.3) * rng.random()
    return MorreyParams(p=p, q=q, d=int(rng.integers(1, d_max + 1)))


def random_bounded_profile(params: MorreyParams, rng: np.random.Generator,
                           max_segments: int = 5,
                           monotone: bool = False) -> PiecewiseRadialPower:
    """A random profile on contiguous annuli inside (0, 2.5).

    With monotone=True the support starts at the origin and the coefficient
    moduli shrink outward, so the modulus is radially nonincreasing on all
    of (0, inf): the sufficient condition for the centered-ball reduction.
    Otherwise the innermost annulus starts at a random positive radius and
    coefficients carry random signs.
    """
    count = int(rng.integers(1, max_segments + 1))
    cuts = np.sort(0.05 + 2.45 * rng.random(count + 1))
    while np.any(np.diff(cuts) < 1e-3):
        cuts = np.sort(0.05 + 2.45 * rng.random(count + 1))
    if monotone:
        cuts[0] = 0.0
    coeffs = []
    if monotone:
        c = 0.5 + 2.0 * rng.random()
        for k in range(count):
            if k > 0:
                # keep |c_k| lo_k^e <= |c_(k-1)| hi_(k-1)^e (shared boundary)
                c = coeffs[-1] * (0.2 + 0.8 * rng.random())
            coeffs.append(c)
    else:
        coeffs = list(rng.normal(scale=1.5, size=count))
    segments = tuple(
        (Annulus(float(cuts[k]), float(cuts[k + 1])), float(coeffs[k]))
        for k in range(count)
    )
    return PiecewiseRadialPower(params, segments)


def random_euclidean_tuple(rng: np.random.Generator, n: int,
                           dim: int, unit: bool = False) -> FiniteVectorTuple:
    vectors = rng.normal(size=(n, dim))
    while np.any(np.linalg.norm(vectors, axis=1) < 1e-6):
        vectors = rng.normal(size=(n, dim))
    if unit:
        vectors /= np.linalg.norm(vectors, axis=1)[:, None]
    return FiniteVectorTuple(vectors=vectors, norm="euclidean")


def random_lp_tuple(rng: np.random.Generator, n: int, dim: int,
                    exponent: float, unit: bool = False) -> FiniteVectorTuple:
    vectors = rng.normal(size=(n, dim))
    norms = np.sum(np.abs(vectors) ** exponent, axis=1) ** (1.0 / exponent)
    while np.any(norms < 1e-6):
        vectors = rng.normal(size=(n, dim))
        norms = np.sum(np.abs(vectors) ** exponent, axis=1) ** (1.0 / exponent)
    if unit:
        vectors /= norms[:, None]
    return FiniteVectorTuple(vectors=vectors, norm="lp", exponent=exponent)
