"""Zeros of generalized hypergeometric polynomials and their limiting curves.

Exact polynomial construction, certified multiprecision root finding, the
limiting algebraic curve of the Cauchy transform, harmonic level-curve
machinery, and quantitative clustering experiments, with a CLI that wires
them into reproducible figure-grade runs.
"""

from .exact import ComplexRational
from .hyppoly import (
    HypPolynomial,
    ParameterSchedule,
    apply_hypergeometric_operator,
    build_polynomial,
    characteristic_roots,
    is_general_type,
    pochhammer,
)
from .rootfinding import (
    RootCountingMeasure,
    cauchy_transform_at,
    find_roots,
    log_potential_at,
    vieta_check,
)
from .algcurve import (
    BivariateCurve,
    BranchPointSet,
    branch_points,
    branches_at,
    build_curve,
    verify_rational_branches,
)
from .potential import (
    HarmonicSystem,
    LevelCurve,
    RegionGrid,
    classify_regions,
    harmonic_value_by_integration,
    make_harmonic_system,
    psi_value,
    trace_conjectured_loop,
    trace_level_curve,
)
from .experiments import (
    cauchy_convergence,
    k_set_score,
    halfplane_restriction,
    winding_number,
    zero_curve_distance,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexRational",
    "HypPolynomial",
    "ParameterSchedule",
    "apply_hypergeometric_operator",
    "build_polynomial",
    "characteristic_roots",
    "is_general_type",
    "pochhammer",
    "RootCountingMeasure",
    "cauchy_transform_at",
    "find_roots",
    "log_potential_at",
    "vieta_check",
    "BivariateCurve",
    "BranchPointSet",
    "branch_points",
    "branches_at",
    "build_curve",
    "verify_rational_branches",
    "HarmonicSystem",
    "LevelCurve",
    "RegionGrid",
    "classify_regions",
    "harmonic_value_by_integration",
    "make_harmonic_system",
    "psi_value",
    "trace_conjectured_loop",
    "trace_level_curve",
    "cauchy_convergence",
    "k_set_score",
    "halfplane_restriction",
    "winding_number",
    "zero_curve_distance",
]
