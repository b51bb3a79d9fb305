"""Explicit monotone finite differences for the 1D G-heat equation.

The equation is du/dt = G(d2u/dx2) with G(a) = (sb^2 a+ - sl^2 a-)/2 for
a volatility band [sl, sb]; its solution at (t, 0) with initial data phi
is the sublinear expectation of phi(sqrt(t) X) for X G-normal.  Forward
Euler with the standard three-point second difference is monotone under
the CFL restriction dt * sb^2 / dx^2 <= 1/2, which is what guarantees
convergence to the viscosity solution despite the kink in G.

A recombining trinomial lattice with bang-bang volatility choice serves
as an independent dynamic-programming oracle for cross-validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DivergenceError, ValidationError


@dataclass(frozen=True)
class GFunction1D:
    """The generator of a 1D G-normal law: a volatility band [sigma_low, sigma_bar]."""

    sigma_low: float
    sigma_bar: float

    def __post_init__(self):
        if not (0.0 <= self.sigma_low <= self.sigma_bar):
            raise ValidationError(
                f"need 0 <= sigma_low <= sigma_bar, got ({self.sigma_low}, {self.sigma_bar})"
            )
        if self.sigma_bar <= 0.0:
            raise ValidationError("sigma_bar must be positive")

    def scaled(self, factor: float) -> "GFunction1D":
        f = abs(factor)
        return GFunction1D(self.sigma_low * f, self.sigma_bar * f)


def g_apply(g: GFunction1D, a: float):
    """G(a) = (sigma_bar^2 a+ - sigma_low^2 a-)/2; vectorizes over arrays."""
    a = np.asarray(a, dtype=float)
    out = 0.5 * (
        g.sigma_bar**2 * np.maximum(a, 0.0) - g.sigma_low**2 * np.maximum(-a, 0.0)
    )
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Grid:
    """Uniform space-time grid for one G-heat solve.

    n_points must be odd so x = 0 is a node (the read-off point).  The
    time step is cfl_fraction * dx^2 / sigma_bar^2, rounded down so the
    final time is hit exactly.
    """

    x_min: float
    x_max: float
    n_points: int = 401
    t_final: float = 1.0
    cfl_fraction: float = 0.4

    def __post_init__(self):
        if not (self.x_min < 0.0 < self.x_max):
            raise ValidationError("grid must straddle 0")
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise ValidationError("n_points must be an odd integer >= 3")
        if self.t_final <= 0.0:
            raise ValidationError("t_final must be positive")
        if not (0.0 < self.cfl_fraction <= 0.5):
            raise ValidationError("cfl_fraction must lie in (0, 0.5]")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def zero_index(self) -> int:
        i = int(round(-self.x_min / self.dx))
        if abs(self.x_min + i * self.dx) > 1e-9 * max(1.0, self.dx):
            raise ValidationError("x = 0 is not a grid node")
        return i

    def n_steps(self, sigma_bar: float) -> int:
        dt_max = self.cfl_fraction * self.dx**2 / sigma_bar**2
        return max(1, math.ceil(self.t_final / dt_max))


def default_grid(
    sigma_bar: float,
    t_final: float = 1.0,
    n_points: int = 401,
    half_width: float = 8.0,
    cfl_fraction: float = 0.4,
) -> Grid:
    """Domain +-half_width * sigma_bar * sqrt(t); wide enough that the
    linear-extrapolation boundary error at x = 0 is below tolerance."""
    span = half_width * sigma_bar * math.sqrt(t_final)
    return Grid(-span, span, n_points, t_final, cfl_fraction)


@dataclass(frozen=True)
class GridFunction:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.grid.n_points,):
            raise ValidationError(
                f"values shape {values.shape} does not match grid ({self.grid.n_points},)"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("grid function has non-finite values")

    def at_zero(self) -> float:
        return float(self.values[self.grid.zero_index])

    def to_csv(self) -> str:
        lines = ["x,u"]
        for x, u in zip(self.grid.xs, self.values):
            lines.append(f"{x:.17g},{u:.17g}")
        return "\n".join(lines) + "\n"


def _evolve(g: GFunction1D, values: np.ndarray, grid: Grid) -> np.ndarray:
    """Run the explicit scheme to t_final.  ``values`` may be a batch with
    the spatial axis last; each row is advanced independently."""
    u = np.array(values, dtype=float)
    n = grid.n_steps(g.sigma_bar)
    dt = grid.t_final / n
    inv_dx2 = 1.0 / grid.dx**2
    half_up = 0.5 * g.sigma_bar**2 * dt
    half_dn = 0.5 * g.sigma_low**2 * dt
    for step in range(n):
        d2 = (u[..., 2:] - 2.0 * u[..., 1:-1] + u[..., :-2]) * inv_dx2
        u[..., 1:-1] += half_up * np.maximum(d2, 0.0) - half_dn * np.maximum(-d2, 0.0)
        # boundary: zero second difference, i.e. endpoints do not move
        if not np.all(np.isfinite(u)):
            raise DivergenceError(f"non-finite value at time step {step + 1} of {n}")
    return u


def solve_gheat(
    g: GFunction1D, phi: Callable[[float], float], grid: Grid
) -> GridFunction:
    """Solve du/dt = G(u_xx), u(0, .) = phi, returning u(t_final, .)."""
    xs = grid.xs
    u0 = np.array([phi(x) for x in xs], dtype=float)
    if not np.all(np.isfinite(u0)):
        bad = xs[~np.isfinite(u0)][0]
        raise ValidationError(f"initial data is non-finite at x = {bad}")
    return GridFunction(grid, _evolve(g, u0, grid))


def gexpect(g: GFunction1D, phi: Callable[[float], float], grid: Grid) -> float:
    """Sublinear expectation of phi(sqrt(t_final) X) for X G-normal(g)."""
    return solve_gheat(g, phi, grid).at_zero()


def dp_oracle(
    g: GFunction1D,
    phi: Callable[[float], float],
    t: float = 1.0,
    n_steps: int = 2000,
) -> float:
    """Independent oracle: backward induction on a recombining trinomial lattice.

    Spacing is sigma_bar * sqrt(dt); one step under volatility sigma moves
    +-1 node with probability sigma^2 / (2 sigma_bar^2) each (variance
    matched exactly, mean zero).  Each node takes the max over the two
    band endpoints, which realizes the sup over the whole band since the
    one-step expectation is linear in sigma^2.  Converges to gexpect as
    n_steps grows.
    """
    if n_steps < 1:
        raise ValidationError("n_steps must be >= 1")
    dt = t / n_steps
    h = g.sigma_bar * math.sqrt(dt)
    p_hi = 0.5  # sigma_bar^2 / (2 sigma_bar^2)
    p_lo = g.sigma_low**2 / (2.0 * g.sigma_bar**2)
    assert 0.0 <= p_lo <= 0.5 and 0.0 <= p_hi <= 0.5

    xs = h * np.arange(-n_steps, n_steps + 1)
    v = np.array([phi(x) for x in xs], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValidationError("phi non-finite on the lattice")
    for k in range(n_steps, 0, -1):
        up, mid, down = v[2:], v[1:-1], v[:-2]
        hi = p_hi * (up + down) + (1.0 - 2.0 * p_hi) * mid
        lo = p_lo * (up + down) + (1.0 - 2.0 * p_lo) * mid
        v = np.maximum(hi, lo)
    return float(v[0])
