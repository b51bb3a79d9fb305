"""Sublinear expectations over finite scenario sets.

A sublinear expectation is a functional that is monotone, constant
preserving, sub-additive and positively homogeneous.  Taking the supremum
of ordinary expectations over a finite set of discrete probability
measures yields such a functional by construction, and is exactly
computable; that representation is what this module provides, together
with moment extraction and a randomized axiom checker used as a negative
control elsewhere in the suite.

Tolerances: 1e-12 for algebraic identities, 1e-9 for derived consistency
checks (about 100x double-precision accumulation error at this scale).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConsistencyError, EvaluationError, ValidationError

ALGEBRAIC_TOL = 1e-12
CONSISTENCY_TOL = 1e-9
AXIOM_TOL = 1e-10

WEIGHT_TOL = 1e-12


class ScenarioSet:
    """A finite set of discrete probability measures on the real line.

    The induced upper expectation is ``sup`` over the measures of the
    ordinary expectation; the lower expectation is the corresponding
    ``inf`` (via duality).

    ``validate=False`` skips the invariant checks; it exists so tests can
    construct deliberately broken backends for the axiom checker.
    """

    __slots__ = ("measures",)

    def __init__(
        self,
        measures: Sequence[Sequence[tuple[float, float]]],
        validate: bool = True,
    ):
        self.measures: tuple[tuple[tuple[float, float], ...], ...] = tuple(
            tuple((float(a), float(w)) for a, w in m) for m in measures
        )
        if validate:
            self._validate()

    def _validate(self) -> None:
        if not self.measures:
            raise ValidationError("scenario set needs at least one measure")
        for i, m in enumerate(self.measures):
            if not m:
                raise ValidationError(f"measure {i} has no atoms")
            total = 0.0
            for atom, weight in m:
                if not math.isfinite(atom):
                    raise ValidationError(f"measure {i} has non-finite atom {atom}")
                if not math.isfinite(weight) or weight < 0:
                    raise ValidationError(
                        f"measure {i} has invalid weight {weight} at atom {atom}"
                    )
                total += weight
            if abs(total - 1.0) > WEIGHT_TOL:
                raise ValidationError(
                    f"measure {i} weights sum to {total!r}, expected 1"
                )

    @property
    def atoms(self) -> np.ndarray:
        """All atoms across all measures, deduplicated and sorted."""
        return np.unique([a for m in self.measures for a, _ in m])

    @classmethod
    def point_mass(cls, x: float) -> "ScenarioSet":
        return cls([[(x, 1.0)]])

    @classmethod
    def symmetric_two_point(cls, spreads: Sequence[float]) -> "ScenarioSet":
        """One symmetric two-atom measure per spread: atoms +-s, weight 1/2."""
        return cls([[(-s, 0.5), (s, 0.5)] for s in spreads])

    # -- JSON wire format: {"measures": [[[atom, weight], ...], ...]} --

    def to_json(self) -> str:
        return json.dumps(
            {"measures": [[[a, w] for a, w in m] for m in self.measures]}
        )

    @classmethod
    def from_json(cls, text: str) -> "ScenarioSet":
        payload = json.loads(text)
        if "measures" not in payload:
            raise ValidationError("scenario JSON lacks 'measures' key")
        return cls(payload["measures"])

    def __repr__(self) -> str:
        return f"ScenarioSet({len(self.measures)} measures)"


@dataclass(frozen=True)
class MomentSummary:
    """Upper/lower mean and upper/lower variance-like second moments.

    ``var_bar``/``var_low`` are the upper/lower expectations of the
    squared variable (in squared units), not centered variances.
    """

    mu_bar: float
    mu_low: float
    var_bar: float
    var_low: float

    def __post_init__(self):
        if self.mu_low > self.mu_bar + CONSISTENCY_TOL:
            raise ConsistencyError(
                f"lower mean {self.mu_low} exceeds upper mean {self.mu_bar}"
            )
        if self.var_low < -CONSISTENCY_TOL or self.var_low > self.var_bar + CONSISTENCY_TOL:
            raise ConsistencyError(
                f"second moments out of order: [{self.var_low}, {self.var_bar}]"
            )


def _measure_expectation(measure, phi: Callable[[float], float]) -> float:
    total = 0.0
    for atom, weight in measure:
        value = phi(atom)
        if not math.isfinite(value):
            raise EvaluationError(f"test function is {value} at atom {atom}")
        total += weight * value
    return total


def expect(dist: ScenarioSet, phi: Callable[[float], float]) -> float:
    """Upper expectation: max over measures of the ordinary expectation."""
    return max(_measure_expectation(m, phi) for m in dist.measures)


def lower_expect(dist: ScenarioSet, phi: Callable[[float], float]) -> float:
    """Lower expectation, the conjugate -E[-phi]."""
    return -expect(dist, lambda x: -phi(x))


def moment_summary(dist) -> MomentSummary:
    """The four moments (upper/lower mean, upper/lower second moment).

    Accepts a ScenarioSet or any object with an ``expect(phi)`` method
    (duck-typed so PDE-backed laws can reuse it).  Quadratic test
    functions rely on the standard extension of the bounded-Lipschitz
    test class; the engine only needs finite values.
    """
    ev = dist.expect if hasattr(dist, "expect") else lambda phi: expect(dist, phi)
    mu_bar = ev(lambda x: x)
    mu_low = -ev(lambda x: -x)
    var_bar = ev(lambda x: x * x)
    var_low = -ev(lambda x: -x * x)
    return MomentSummary(mu_bar, mu_low, var_bar, var_low)


def is_degenerate(dist) -> bool:
    """True when the second moment does not exceed the squared absolute mean.

    A law is degenerate when E[X^2] <= (E[|X|])^2 (up to tolerance); the
    characterization theorems assume the strict opposite.
    """
    ev = dist.expect if hasattr(dist, "expect") else lambda phi: expect(dist, phi)
    second = ev(lambda x: x * x)
    abs_mean = ev(abs)
    return second <= abs_mean * abs_mean + CONSISTENCY_TOL


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    detail: str
    magnitude: float


def check_axioms(
    dist: ScenarioSet,
    phi_samples: Sequence[Callable[[float], float]],
    point_samples: Sequence[float],
    tol: float = AXIOM_TOL,
) -> list[AxiomViolation]:
    """Check the four sublinear-expectation axioms on sampled data.

    Monotonicity is checked on pairs whose pointwise order is verified on
    ``point_samples`` plus all atoms.  Violations are returned as data,
    not raised.
    """
    violations: list[AxiomViolation] = []
    points = np.unique(
        np.concatenate([np.asarray(point_samples, dtype=float), dist.atoms])
    )

    # constant preservation
    for c in (0.0, 1.0, -3.5):
        got = expect(dist, lambda x, c=c: c)
        if abs(got - c) > tol:
            violations.append(
                AxiomViolation("constant_preservation", f"E[{c}]={got!r}", abs(got - c))
            )

    values = [np.array([phi(p) for p in points]) for phi in phi_samples]
    expects = [expect(dist, phi) for phi in phi_samples]

    for i, phi in enumerate(phi_samples):
        # positive homogeneity
        for lam in (0.0, 0.5, 2.0, 7.25):
            got = expect(dist, lambda x, p=phi, L=lam: L * p(x))
            want = lam * expects[i]
            scale = max(1.0, abs(want))
            if abs(got - want) > tol * scale:
                violations.append(
                    AxiomViolation(
                        "positive_homogeneity",
                        f"E[{lam}*phi_{i}]={got!r} vs {want!r}",
                        abs(got - want),
                    )
                )
        for j, psi in enumerate(phi_samples):
            # sub-additivity
            got = expect(dist, lambda x, p=phi, q=psi: p(x) + q(x))
            bound = expects[i] + expects[j]
            if got > bound + tol:
                violations.append(
                    AxiomViolation(
                        "sub_additivity",
                        f"E[phi_{i}+phi_{j}]={got!r} > {bound!r}",
                        got - bound,
                    )
                )
            # monotonicity, on pairs ordered over the sampled points
            if np.all(values[i] <= values[j]) and expects[i] > expects[j] + tol:
                violations.append(
                    AxiomViolation(
                        "monotonicity",
                        f"phi_{i} <= phi_{j} pointwise but "
                        f"{expects[i]!r} > {expects[j]!r}",
                        expects[i] - expects[j],
                    )
                )
    return violations


def random_scenario_set(
    rng: np.random.Generator,
    max_measures: int = 4,
    max_atoms: int = 5,
    scale: float = 2.0,
) -> ScenarioSet:
    """A random valid scenario set, for the randomized axiom suite."""
    measures = []
    for _ in range(int(rng.integers(1, max_measures + 1))):
        k = int(rng.integers(1, max_atoms + 1))
        atoms = rng.normal(0.0, scale, size=k)
        weights = rng.dirichlet(np.ones(k))
        weights = weights / weights.sum()  # tighten to the 1e-12 budget
        measures.append(list(zip(atoms, weights)))
    return ScenarioSet(measures)


def _random_test_function(rng: np.random.Generator) -> Callable[[float], float]:
    a, b, c, d, e = rng.normal(0.0, 1.0, size=5)

    def phi(x: float, a=a, b=b, c=c, d=d, e=e) -> float:
        return a * x + b * abs(x - c) + d * math.tanh(e * x)

    return phi


def run_axiom_suite(seed: int, cases: int, tol: float = AXIOM_TOL) -> list[AxiomViolation]:
    """Run ``cases`` randomized axiom checks; returns all violations found.

    A valid scenario backend must produce none: sup of linear
    expectations is sublinear by construction.
    """
    rng = np.random.default_rng(seed)
    violations: list[AxiomViolation] = []
    for _ in range(cases):
        dist = random_scenario_set(rng)
        phis = [_random_test_function(rng) for _ in range(3)]
        points = rng.normal(0.0, 2.0, size=7)
        violations.extend(check_axioms(dist, phis, points, tol))
    return violations
