"""morreykit: Morrey-space norms of piecewise radial power functions,
witness families for the failure of uniform non-l1(n)-ness, and lower
bounds for the n-th James and Von Neumann-Jordan constants."""

__version__ = "0.1.0"

from .core import (
    Annulus,
    Ball,
    FiniteVectorTuple,
    MorreyParams,
    NormMethod,
    NormReport,
    NumericalFailure,
    ParameterError,
    PiecewiseRadialPower,
    SignMatrix,
    WitnessFamily,
    sign_matrix,
    sphere_area,
)
from .closedform import (
    annulus_p_integral,
    centered_norm,
    chunk_lower_bound,
    epsilon_upper_bound,
    local_quantity,
    power_norm_exact,
)
from .numeric import (
    SearchConfig,
    ball_p_integral,
    ball_p_integral_mc,
    monotone_profile_check,
    morrey_norm_numeric,
    shell_area,
    sin_power_integral,
)
from .constants import (
    ConstantEstimate,
    ConstantsLadder,
    JNJCheckReport,
    NonEll1nReport,
    SignedCombinationReport,
    build_witnesses,
    combination_coefficients,
    estimate_constants,
    j_nj_inequality_check,
    james_lower_bound,
    min_signed_norm,
    nj_lower_bound,
    nj_ratio,
    theoretical_lower_bound,
    verify_non_ell1n,
)
from .document import (
    ProfileParseError,
    format_profile_document,
    load_profile,
    parse_profile_document,
    save_profile,
)

__all__ = [
    "Annulus",
    "Ball",
    "ConstantEstimate",
    "ConstantsLadder",
    "FiniteVectorTuple",
    "JNJCheckReport",
    "MorreyParams",
    "NonEll1nReport",
    "NormMethod",
    "NormReport",
    "NumericalFailure",
    "ParameterError",
    "PiecewiseRadialPower",
    "ProfileParseError",
    "SearchConfig",
    "SignMatrix",
    "SignedCombinationReport",
    "WitnessFamily",
    "annulus_p_integral",
    "ball_p_integral",
    "ball_p_integral_mc",
    "build_witnesses",
    "centered_norm",
    "chunk_lower_bound",
    "combination_coefficients",
    "epsilon_upper_bound",
    "estimate_constants",
    "format_profile_document",
    "j_nj_inequality_check",
    "james_lower_bound",
    "load_profile",
    "local_quantity",
    "min_signed_norm",
    "monotone_profile_check",
    "morrey_norm_numeric",
    "nj_lower_bound",
    "nj_ratio",
    "parse_profile_document",
    "power_norm_exact",
    "save_profile",
    "shell_area",
    "sign_matrix",
    "sin_power_integral",
    "sphere_area",
    "theoretical_lower_bound",
    "verify_non_ell1n",
]
