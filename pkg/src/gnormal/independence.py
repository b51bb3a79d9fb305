"""Independence as nested expectation, and laws of lambda*X + f*Y.

"Y independent of X" means E[phi(X, Y)] = E_X[ psi(X) ] with
psi(x) = E_Y[phi(x, .)]: the inner expectation integrates out Y at each
frozen x, the outer one integrates psi against the law of X.  Under a
sublinear expectation this is order-sensitive, which the probe below
makes observable.

Backend dispatch keeps everything either exact (scenario/scenario, by
enumeration) or cheap (G-normal inner laws collapse to a single PDE
solve that is reused across all outer nodes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import core
from .core import ScenarioSet
from .distribution import GNormalLaw, SublinearDistribution, as_callable
from .errors import CoverageError, ValidationError
from .gheat import Grid, _evolve

INNER_POINTS = 401
INNER_HALF_WIDTH = 8.0


@dataclass(frozen=True)
class Combination:
    """Parameters of the combined variable lambda * X + f_lambda * Y."""

    dist_x: SublinearDistribution
    dist_y: SublinearDistribution
    lam: float
    f_lambda: float
    inner_points: int = INNER_POINTS

    def __post_init__(self):
        if not (math.isfinite(self.lam) and math.isfinite(self.f_lambda)):
            raise ValidationError("lambda and f(lambda) must be finite")


def _scenario_inner(sc: ScenarioSet, fn: Callable[[float], float]) -> float:
    return core.expect(sc, fn)


def _inner_profile_gnormal(
    law: GNormalLaw,
    phi2: Callable[[float, float], float],
    x_nodes: np.ndarray,
) -> np.ndarray:
    """psi(x) = E_Y[phi2(x, .)] for G-normal Y, batched over x nodes.

    One 2D explicit solve: rows are frozen x values, columns the y grid.
    """
    grid = law.solver_grid()
    ys = grid.xs + law.shift
    init = np.array([[phi2(x, y) for y in ys] for x in x_nodes], dtype=float)
    if not np.all(np.isfinite(init)):
        raise ValidationError("phi2 non-finite on the inner grid")
    final = _evolve(law.g, init, grid)
    return final[:, grid.zero_index]


def _inner_values(
    dist_y: SublinearDistribution,
    phi2: Callable[[float, float], float],
    x_nodes: np.ndarray,
) -> np.ndarray:
    b = dist_y.backend
    if isinstance(b, ScenarioSet):
        return np.array(
            [_scenario_inner(b, lambda y, x=x: phi2(x, y)) for x in x_nodes]
        )
    if isinstance(b, GNormalLaw):
        return _inner_profile_gnormal(b, phi2, x_nodes)
    # generic (lazy) backend: one evaluation per node
    return np.array([b(lambda y, x=x: phi2(x, y)) for x in x_nodes])


def compose(
    dist_x: SublinearDistribution,
    dist_y: SublinearDistribution,
    phi2: Callable[[float, float], float],
    inner_grid: np.ndarray | None = None,
) -> float:
    """E[phi2(X, Y)] with Y independent of X (inner expectation over Y)."""
    bx = dist_x.backend
    if isinstance(bx, ScenarioSet):
        # outer atoms are the exact evaluation nodes; no interpolation
        atoms = bx.atoms
        psi = dict(zip(atoms, _inner_values(dist_y, phi2, atoms)))
        return core.expect(bx, lambda x: psi[x])
    if isinstance(bx, GNormalLaw):
        grid = bx.solver_grid()
        nodes = grid.xs + bx.shift
        if inner_grid is not None:
            lo, hi = float(np.min(inner_grid)), float(np.max(inner_grid))
            if nodes[0] < lo - 1e-12 or nodes[-1] > hi + 1e-12:
                raise CoverageError(
                    f"inner grid [{lo}, {hi}] does not cover outer support "
                    f"[{nodes[0]}, {nodes[-1]}]"
                )
            psi_grid = _inner_values(dist_y, phi2, np.asarray(inner_grid, float))
            psi = np.interp(nodes, inner_grid, psi_grid)
        else:
            psi = _inner_values(dist_y, phi2, nodes)
        final = _evolve(bx.g, psi, grid)
        return float(final[grid.zero_index])
    raise ValidationError("outer law must be scenario- or G-normal-backed")


def order_asymmetry_probe(
    dist_x: SublinearDistribution,
    dist_y: SublinearDistribution,
    phi2: Callable[[float, float], float],
) -> tuple[float, float]:
    """(Y independent of X, X independent of Y) values of E[phi2(X, Y)].

    Under sublinearity the two orders can genuinely differ; both are
    returned so tests can measure the gap instead of assuming one.
    """
    forward = compose(dist_x, dist_y, phi2)
    swapped = compose(dist_y, dist_x, lambda y, x: phi2(x, y))
    return forward, swapped


def _comb_expect(c: Combination, phi: Callable[[float], float]) -> float:
    """E[phi(lam X + f Y)], exploiting the affine structure per backend."""
    lam, f = c.lam, c.f_lambda
    bx, by = c.dist_x.backend, c.dist_y.backend

    # inner step: w(z) = E_Y[phi(z + f Y)]
    if isinstance(by, ScenarioSet):

        def w(z: float) -> float:
            return core.expect(by, lambda y: phi(z + f * y))

    elif isinstance(by, GNormalLaw):
        if f == 0.0:
            w = phi
        else:
            sig_y = abs(f) * by.g.sigma_bar
            half = INNER_HALF_WIDTH
            span_eval = abs(lam) * (
                INNER_HALF_WIDTH * c.dist_x.effective_sigma
                + abs(getattr(bx, "shift", 0.0))
            )
            span = span_eval + half * sig_y + abs(f * by.shift) + 1e-9
            igrid = Grid(-span, span, c.inner_points, 1.0, 0.4)
            zs = igrid.xs
            init = np.array([phi(z + f * by.shift) for z in zs], dtype=float)
            profile = _evolve(by.g.scaled(f), init, igrid)

            def w(z: float, zs=zs, profile=profile) -> float:
                if z < zs[0] - 1e-12 or z > zs[-1] + 1e-12:
                    raise CoverageError(f"inner grid too narrow for z = {z}")
                return float(np.interp(z, zs, profile))

    else:

        def w(z: float) -> float:
            return by(lambda y: phi(z + f * y))

    # outer step over X
    if isinstance(bx, ScenarioSet):
        return core.expect(bx, lambda x: w(lam * x))
    if isinstance(bx, GNormalLaw):
        grid = bx.solver_grid()
        psi = np.array([w(lam * (x + bx.shift)) for x in grid.xs], dtype=float)
        final = _evolve(bx.g, psi, grid)
        return float(final[grid.zero_index])
    raise ValidationError("outer law must be scenario- or G-normal-backed")


def comb_law(
    dist_x: SublinearDistribution,
    dist_y: SublinearDistribution,
    lam: float,
    f_lambda: float,
    inner_points: int = INNER_POINTS,
    label: str = "",
) -> SublinearDistribution:
    """Lazily evaluated law of lam * X + f_lambda * Y, Y independent of X.

    Evaluation is always by nested composition; no G-normality of the
    result is assumed even when both inputs are G-normal.
    """
    c = Combination(dist_x, dist_y, lam, f_lambda, inner_points)
    sigma = abs(lam) * dist_x.effective_sigma + abs(f_lambda) * dist_y.effective_sigma
    return SublinearDistribution.from_callable(
        lambda phi: _comb_expect(c, as_callable(phi)),
        max(sigma, 1e-12),
        label or f"comb(lam={lam:g}, f={f_lambda:g})",
    )
