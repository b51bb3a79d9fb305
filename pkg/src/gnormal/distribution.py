"""Laws as functionals on test functions, with two concrete backends.

A law here is nothing more than the map phi -> E[phi(X)].  The scenario
backend evaluates it exactly by enumeration; the G-normal backend runs
the G-heat solver.  Lazily composed laws (built by the independence
module) plug in as a third, callable-backed variant so downstream code
never needs to know how an expectation is produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import core
from .core import ScenarioSet
from .errors import ValidationError
from .gheat import GFunction1D, Grid, default_grid, gexpect

EQUALITY_THRESHOLD = 5e-3  # distribution-equality budget on the canonical family


@dataclass(frozen=True)
class TestFunction:
    """A scalar test function with metadata used for admissibility checks.

    ``lipschitz_bound`` is a float or the string "unbounded"; tags are a
    subset of {convex, concave, bounded, polynomial-growth}.
    """

    __test__ = False  # keep pytest from collecting this as a test class

    evaluator: Callable[[float], float]
    lipschitz_bound: float | str = "unbounded"
    tags: frozenset = frozenset()
    name: str = ""

    def __call__(self, x: float) -> float:
        return self.evaluator(x)

    @property
    def is_bounded_lipschitz(self) -> bool:
        return "bounded" in self.tags and self.lipschitz_bound != "unbounded"


def as_callable(phi) -> Callable[[float], float]:
    return phi.evaluator if isinstance(phi, TestFunction) else phi


@dataclass(frozen=True)
class GNormalLaw:
    """G-normal backend: generator band plus an optional solver grid.

    ``shift`` is an additive constant (needed so affine images stay in
    the family); the underlying PDE always solves the centered problem.
    """

    g: GFunction1D
    grid: Grid | None = None
    shift: float = 0.0

    def solver_grid(self) -> Grid:
        return self.grid if self.grid is not None else default_grid(self.g.sigma_bar)


class SublinearDistribution:
    """Uniform interface over scenario, G-normal and lazily composed laws."""

    def __init__(self, backend, label: str = ""):
        if not isinstance(backend, (ScenarioSet, GNormalLaw)) and not callable(backend):
            raise ValidationError(f"unsupported backend {type(backend).__name__}")
        self.backend = backend
        self.label = label

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_scenarios(cls, scenarios: ScenarioSet, label: str = ""):
        return cls(scenarios, label)

    @classmethod
    def gnormal(
        cls,
        sigma_low: float,
        sigma_bar: float,
        grid: Grid | None = None,
        label: str = "",
    ):
        return cls(GNormalLaw(GFunction1D(sigma_low, sigma_bar), grid), label)

    @classmethod
    def point_mass(cls, x: float, label: str = ""):
        return cls(ScenarioSet.point_mass(x), label)

    @classmethod
    def from_callable(
        cls,
        expect_fn: Callable[[Callable[[float], float]], float],
        effective_sigma: float,
        label: str = "",
    ):
        d = cls(expect_fn, label)
        d._effective_sigma = effective_sigma
        return d

    @classmethod
    def from_config(cls, cfg: dict) -> "SublinearDistribution":
        """{"type": "gnormal", "sigma_low": .., "sigma_bar": ..} or
        {"type": "scenario", "measures": [...]}."""
        kind = cfg.get("type")
        if kind == "gnormal":
            return cls.gnormal(float(cfg["sigma_low"]), float(cfg["sigma_bar"]))
        if kind == "scenario":
            return cls.from_scenarios(ScenarioSet(cfg["measures"]))
        raise ValidationError(f"unknown distribution type {kind!r}")

    # -- evaluation -----------------------------------------------------

    def expect(self, phi) -> float:
        fn = as_callable(phi)
        b = self.backend
        if isinstance(b, ScenarioSet):
            return core.expect(b, fn)
        if isinstance(b, GNormalLaw):
            if b.shift == 0.0:
                return gexpect(b.g, fn, b.solver_grid())
            return gexpect(b.g, lambda x: fn(x + b.shift), b.solver_grid())
        return b(fn)

    def lower_expect(self, phi) -> float:
        fn = as_callable(phi)
        return -self.expect(lambda x: -fn(x))

    @property
    def effective_sigma(self) -> float:
        """Scale used for grid sizing and the canonical family span."""
        b = self.backend
        if isinstance(b, ScenarioSet):
            spread = max(abs(a) for m in b.measures for a, _ in m)
            return max(spread, 1e-12)
        if isinstance(b, GNormalLaw):
            return b.g.sigma_bar
        return getattr(self, "_effective_sigma", 1.0)

    def __repr__(self) -> str:
        return f"SublinearDistribution({self.label or type(self.backend).__name__})"


def dist_expect(d: SublinearDistribution, phi) -> float:
    return d.expect(phi)


def affine_image(
    d: SublinearDistribution, scale: float, shift: float = 0.0
) -> SublinearDistribution:
    """Law of scale * X + shift."""
    if not math.isfinite(scale) or not math.isfinite(shift):
        raise ValidationError("scale and shift must be finite")
    b = d.backend
    if isinstance(b, ScenarioSet):
        mapped = ScenarioSet(
            [[(scale * a + shift, w) for a, w in m] for m in b.measures]
        )
        return SublinearDistribution(mapped, d.label)
    if isinstance(b, GNormalLaw):
        if scale == 0.0:
            return SublinearDistribution.point_mass(scale * b.shift + shift, d.label)
        # G-normal is symmetric, so the sign of the scale is immaterial
        return SublinearDistribution(
            GNormalLaw(b.g.scaled(scale), b.grid, scale * b.shift + shift), d.label
        )
    inner = b
    return SublinearDistribution(
        lambda phi, s=scale, c=shift: inner(lambda x: phi(s * x + c)), d.label
    )


def dist_distance(
    d1: SublinearDistribution,
    d2: SublinearDistribution,
    phi_family: Sequence[TestFunction],
) -> float:
    """Max over the family of |E1[phi] - E2[phi]|: a pseudometric on laws."""
    if not phi_family:
        raise ValidationError("phi_family must be nonempty")
    return max(abs(d1.expect(phi) - d2.expect(phi)) for phi in phi_family)


def _clip(x: float, span: float) -> float:
    return min(max(x, -span), span)


def canonical_family(sigma_bar: float = 1.0) -> list[TestFunction]:
    """The default bounded-Lipschitz family used wherever none is given.

    Spans means (clipped identity), both second moments (clipped +-x^2),
    symmetry (|x|), local mass (hats) and tail behaviour (tanh steps);
    clipping at +-8 sigma_bar keeps everything bounded Lipschitz while
    agreeing with the unclipped versions on the effective support.
    """
    s = sigma_bar
    span = 8.0 * s
    fam = [
        TestFunction(
            lambda x: _clip(x, span), 1.0, frozenset({"bounded"}), "clipped_x"
        ),
        TestFunction(
            lambda x: _clip(x, span) ** 2,
            2 * span,
            frozenset({"bounded", "convex"}),
            "clipped_x2",
        ),
        TestFunction(
            lambda x: -(_clip(x, span) ** 2),
            2 * span,
            frozenset({"bounded", "concave"}),
            "clipped_neg_x2",
        ),
        TestFunction(
            lambda x: abs(_clip(x, span)),
            1.0,
            frozenset({"bounded", "convex"}),
            "clipped_abs",
        ),
        TestFunction(math.tanh, 1.0, frozenset({"bounded"}), "tanh"),
    ]
    for c in (-2 * s, -s, 0.0, s, 2 * s):
        fam.append(
            TestFunction(
                lambda x, c=c, s=s: max(0.0, s - abs(x - c)),
                1.0,
                frozenset({"bounded"}),
                f"hat_{c:g}",
            )
        )
    for c in (-s, s):
        fam.append(
            TestFunction(
                lambda x, c=c: math.tanh(x - c),
                1.0,
                frozenset({"bounded"}),
                f"step_{c:g}",
            )
        )
    return fam


FAMILIES: dict[str, Callable[[float], list[TestFunction]]] = {
    "canonical": canonical_family,
}
