"""Numerical toolkit for sublinear expectations and G-normal laws.

Finite scenario-set backends, a monotone G-heat solver with a trinomial
dynamic-programming oracle, nested-expectation independence, and
invariance scans that verify when the law of lambda*X + f(lambda)*Y is
constant in lambda.
"""

__version__ = "0.1.0"

from .characterization import (
    BranchReport,
    FFamily,
    InvarianceReport,
    ScanConfig,
    VerificationReport,
    contradiction_probe_means,
    invariance_scan,
    mean_lower,
    mean_upper,
    solve_f_family,
    variance_identity,
    verify_theorem1,
    verify_theorem2,
)
from .core import (
    MomentSummary,
    ScenarioSet,
    check_axioms,
    expect,
    is_degenerate,
    lower_expect,
    moment_summary,
    run_axiom_suite,
)
from .distribution import (
    SublinearDistribution,
    TestFunction,
    affine_image,
    canonical_family,
    dist_distance,
    dist_expect,
)
from .errors import (
    ConsistencyError,
    CoverageError,
    DivergenceError,
    DomainError,
    EvaluationError,
    GNormalError,
    ValidationError,
)
from .gheat import (
    GFunction1D,
    Grid,
    GridFunction,
    default_grid,
    dp_oracle,
    g_apply,
    gexpect,
    solve_gheat,
)
from .independence import Combination, comb_law, compose, order_asymmetry_probe

__all__ = [
    "BranchReport",
    "Combination",
    "ConsistencyError",
    "CoverageError",
    "DivergenceError",
    "DomainError",
    "EvaluationError",
    "FFamily",
    "GFunction1D",
    "GNormalError",
    "Grid",
    "GridFunction",
    "InvarianceReport",
    "MomentSummary",
    "ScanConfig",
    "ScenarioSet",
    "SublinearDistribution",
    "TestFunction",
    "ValidationError",
    "VerificationReport",
    "affine_image",
    "canonical_family",
    "check_axioms",
    "comb_law",
    "compose",
    "contradiction_probe_means",
    "default_grid",
    "dist_distance",
    "dist_expect",
    "dp_oracle",
    "expect",
    "g_apply",
    "gexpect",
    "invariance_scan",
    "is_degenerate",
    "lower_expect",
    "mean_lower",
    "mean_upper",
    "moment_summary",
    "order_asymmetry_probe",
    "run_axiom_suite",
    "solve_f_family",
    "solve_gheat",
    "variance_identity",
    "verify_theorem1",
    "verify_theorem2",
]
