"""Moment identities, the f-family, invariance scans and theorem checks.

The central object is the family f(lambda) = sqrt(a - b lambda^2): it is
the only coefficient function for which the law of lambda*X + f(lambda)*Y
(Y independent of X) does not move with lambda, and when invariance holds
the inputs are forced to be G-normal with second moments in ratio b.
This module turns those statements into executable scans with explicit
PASS/FAIL results, plus the contradiction branches that rule out every
other f (replayed symbolically on given moments as negative controls).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .core import MomentSummary
from .distribution import (
    EQUALITY_THRESHOLD,
    SublinearDistribution,
    TestFunction,
    affine_image,
    canonical_family,
    dist_distance,
)
from .errors import DomainError, ValidationError
from .gheat import GFunction1D
from .independence import comb_law

MEAN_TOL = 1e-6


@dataclass(frozen=True)
class FFamily:
    """f(lambda) = sqrt(a - b lambda^2) on [-sqrt(a/b), sqrt(a/b)]."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValidationError(f"need a, b > 0, got ({self.a}, {self.b})")

    @property
    def domain(self) -> tuple[float, float]:
        r = math.sqrt(self.a / self.b)
        return (-r, r)

    def __call__(self, lam: float) -> float:
        radicand = self.a - self.b * lam * lam
        if radicand < -1e-15:
            raise DomainError(f"lambda = {lam} outside the f-family domain")
        return math.sqrt(max(radicand, 0.0))


def mean_upper(
    lam: float, f_val: float, ms_x: MomentSummary, ms_y: MomentSummary
) -> float:
    """Upper mean of lam*X + f*Y from the input moments alone."""
    lam_pos, lam_neg = max(lam, 0.0), max(-lam, 0.0)
    return f_val * ms_y.mu_bar + lam_pos * ms_x.mu_bar - lam_neg * ms_x.mu_low


def mean_lower(
    lam: float, f_val: float, ms_x: MomentSummary, ms_y: MomentSummary
) -> float:
    """Lower mean of lam*X + f*Y; mirror of mean_upper with means swapped."""
    lam_pos, lam_neg = max(lam, 0.0), max(-lam, 0.0)
    return f_val * ms_y.mu_low + lam_pos * ms_x.mu_low - lam_neg * ms_x.mu_bar


def variance_identity(
    lam: float, f_val: float, var_bar_x: float, var_bar_y: float
) -> float:
    """Second moment of the zero-mean combination: lam^2 v_x + f^2 v_y."""
    if var_bar_x < 0 or var_bar_y < 0:
        raise ValidationError("second moments must be nonnegative")
    return lam * lam * var_bar_x + f_val * f_val * var_bar_y


def solve_f_family(
    ms_x: MomentSummary, ms_y: MomentSummary, var_bar_target: float
) -> FFamily:
    """a = target / v_y, b = v_x / v_y; requires both means to vanish."""
    for name, ms in (("X", ms_x), ("Y", ms_y)):
        if abs(ms.mu_bar) > MEAN_TOL or abs(ms.mu_low) > MEAN_TOL:
            raise ValidationError(
                f"f-family requires zero means, {name} has "
                f"({ms.mu_bar}, {ms.mu_low})"
            )
    if ms_y.var_bar <= MEAN_TOL:
        raise ValidationError("Y is degenerate: vanishing upper second moment")
    return FFamily(var_bar_target / ms_y.var_bar, ms_x.var_bar / ms_y.var_bar)


@dataclass(frozen=True)
class InvarianceReport:
    """Per-lambda deviation of the combined law from a reference law."""

    lambdas: tuple[float, ...]
    deviations: tuple[float, ...]
    skipped: tuple[float, ...]
    reference: str
    h_bar: tuple[float, ...]
    h_low: tuple[float, ...]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)

    def rows(self):
        return list(zip(self.lambdas, self.deviations, self.h_bar, self.h_low))


DEFAULT_LAMBDA_FRACTIONS = (0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75, 0.9, -0.9)


def invariance_scan(
    dist_x: SublinearDistribution,
    dist_y: SublinearDistribution,
    f: Callable[[float], float],
    lambda_grid: Sequence[float],
    phi_family: Sequence[TestFunction],
    reference: SublinearDistribution,
    reference_label: str = "reference",
) -> InvarianceReport:
    """Measure dist_distance(law(lam X + f(lam) Y), reference) per lambda.

    Lambdas where f is undefined or negative are skipped and recorded.
    """
    used, devs, skipped, h_bars, h_lows = [], [], [], [], []
    for lam in lambda_grid:
        try:
            f_val = f(lam)
        except (DomainError, ValueError):
            skipped.append(lam)
            continue
        if not math.isfinite(f_val) or f_val < 0:
            skipped.append(lam)
            continue
        law = comb_law(dist_x, dist_y, lam, f_val)
        used.append(lam)
        devs.append(dist_distance(law, reference, phi_family))
        h_bars.append(law.expect(lambda x: x))
        h_lows.append(law.lower_expect(lambda x: x))
    if not used:
        raise DomainError("no usable lambda in the scan grid")
    return InvarianceReport(
        tuple(used), tuple(devs), tuple(skipped), reference_label,
        tuple(h_bars), tuple(h_lows),
    )


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    threshold: float
    scan: InvarianceReport
    checks: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ScanConfig:
    lambda_fractions: tuple[float, ...] = DEFAULT_LAMBDA_FRACTIONS
    threshold: float = EQUALITY_THRESHOLD
    phi_family: tuple[TestFunction, ...] | None = None

    def family_for(self, sigma_bar: float) -> Sequence[TestFunction]:
        if self.phi_family is not None:
            return self.phi_family
        return canonical_family(sigma_bar)


def verify_theorem1(
    g: GFunction1D,
    config: ScanConfig = ScanConfig(),
    f_override: Callable[[float], float] | None = None,
    dist_x: SublinearDistribution | None = None,
) -> VerificationReport:
    """Check that lam X + sqrt(1-lam^2) Y has the law of X for all lam.

    X and Y default to independent G-normal copies with generator g;
    ``dist_x`` substitutes a different law for X (negative controls), in
    which case Y is an independent copy of that law; ``f_override``
    substitutes a different coefficient function.
    """
    if dist_x is not None:
        x, y = dist_x, dist_x
    else:
        x = SublinearDistribution.gnormal(g.sigma_low, g.sigma_bar, label="X")
        y = SublinearDistribution.gnormal(g.sigma_low, g.sigma_bar, label="Y")
    f = f_override if f_override is not None else FFamily(1.0, 1.0)
    family = config.family_for(g.sigma_bar)
    scan = invariance_scan(
        x, y, f, config.lambda_fractions, family, x, reference_label="law(X)"
    )
    mu_bar = x.expect(lambda v: v)
    mu_low = x.lower_expect(lambda v: v)
    mean_ok = abs(mu_bar) <= config.threshold and abs(mu_low) <= config.threshold
    passed = scan.max_deviation <= config.threshold and mean_ok
    return VerificationReport(
        passed,
        config.threshold,
        scan,
        {"mu_bar": mu_bar, "mu_low": mu_low, "mean_ok": mean_ok},
    )


def verify_theorem2(
    g_x: GFunction1D,
    a: float,
    b: float,
    config: ScanConfig = ScanConfig(),
    y_band: GFunction1D | None = None,
) -> VerificationReport:
    """Check invariance for X G-normal(g_x), Y = X-band scaled by 1/sqrt(b),
    f(lam) = sqrt(a - b lam^2), reference the lam = 0 combination.

    Also checks the endpoint identity (the lam = sqrt(a/b) law equals the
    reference) and the rescaling identity
    lam X + f(lam) Y  =d  sqrt(1 - (b/a) lam^2) X' + lam sqrt(b/a) Y'
    with X' = sqrt(a/b) X, Y' = sqrt(a) Y, at every scanned lambda.

    ``y_band`` substitutes a different generator for Y (negative control:
    a band NOT scaled by 1/sqrt(b) must make the scan fail).
    """
    fam = FFamily(a, b)
    root = math.sqrt(a / b)
    x = SublinearDistribution.gnormal(g_x.sigma_low, g_x.sigma_bar, label="X")
    g_y = y_band if y_band is not None else g_x.scaled(1.0 / math.sqrt(b))
    y = SublinearDistribution.gnormal(g_y.sigma_low, g_y.sigma_bar, label="Y")
    sigma_eff = math.sqrt(a) * y.effective_sigma
    family = config.family_for(sigma_eff)
    lambdas = [frac * root for frac in config.lambda_fractions]
    reference = comb_law(x, y, 0.0, fam(0.0), label="lam=0 law")
    scan = invariance_scan(
        x, y, fam, lambdas, family, reference, reference_label="lam=0 law"
    )

    x_prime = affine_image(x, root)          # sqrt(a/b) X
    y_prime = affine_image(y, math.sqrt(a))  # sqrt(a) Y
    endpoint_dev = dist_distance(x_prime, reference, family)

    rescale_devs = []
    for lam in scan.lambdas:
        c1 = math.sqrt(max(1.0 - (b / a) * lam * lam, 0.0))
        c2 = lam * math.sqrt(b / a)
        lhs = comb_law(x, y, lam, fam(lam))
        rhs = comb_law(x_prime, y_prime, c1, c2)
        rescale_devs.append(dist_distance(lhs, rhs, family))

    passed = (
        scan.max_deviation <= config.threshold
        and endpoint_dev <= config.threshold
        and max(rescale_devs) <= config.threshold
    )
    return VerificationReport(
        passed,
        config.threshold,
        scan,
        {
            "endpoint_deviation": endpoint_dev,
            "rescaling_deviations": tuple(rescale_devs),
            "lambda_domain": fam.domain,
        },
    )


@dataclass(frozen=True)
class BranchReport:
    """Outcome of replaying one contradiction branch on given moments."""

    branch: str
    f_value: float | None
    lhs: float | None
    rhs: float | None
    contradiction: bool
    detail: str


def contradiction_probe_means(ms: MomentSummary, alpha: float = 0.5) -> BranchReport:
    """Replay the case analysis that forces both means of X to vanish.

    Given moments with unequal upper/lower means, the invariance
    hypothesis forces f(-alpha) = 1 - alpha and an inequality
    2a(1-a) v_bar <= 2a(1-a) (E|X|)^2 that contradicts non-degeneracy;
    with equal nonzero means the same happens with (E|X|)^2 replaced by
    the squared mean.  Consistent (zero-mean) moments fire no branch.
    """
    if not (0.0 < alpha < 1.0):
        raise ValidationError("alpha must lie in (0, 1)")
    factor = 2.0 * alpha * (1.0 - alpha)
    if abs(ms.mu_bar - ms.mu_low) > MEAN_TOL:
        f_val = 1.0 - alpha
        # E|X| <= sqrt(E[X^2]) bounds the right-hand side by the second moment
        lhs = factor * ms.var_bar
        rhs = factor * ms.var_bar
        return BranchReport(
            "mu_bar != mu_low",
            f_val,
            lhs,
            rhs,
            True,
            "forces mu_bar = -mu_low and a non-strict bound on the second "
            "moment, contradicting strict non-degeneracy",
        )
    if abs(ms.mu_bar) > MEAN_TOL:
        f_val = 1.0 - alpha
        lhs = factor * ms.var_bar
        rhs = factor * ms.mu_bar**2
        return BranchReport(
            "mu_bar = mu_low != 0",
            f_val,
            lhs,
            rhs,
            True,
            "bounds the second moment by the squared mean, contradicting "
            "non-degeneracy",
        )
    return BranchReport(
        "consistent", None, None, None, False, "both means vanish; no branch fires"
    )
