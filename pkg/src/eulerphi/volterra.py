"""Volterra integral equation F(x) - int_0^x F(t)/t dt = E2(x).

Candidate solutions are the one-parameter family (f1(x)+A) x; the homogeneous
equation is solved exactly by A x.  Everything is discretized on a half-offset
grid x_i = (i+1/2) h: E2 and f1 jump exactly at integers, and placing cell
midpoints there keeps the trapezoid rule second order (the two half-cells
around a jump have equal slopes, so their errors cancel).

Picard iteration is useless here: x is an eigenfunction of the integral
operator with eigenvalue 1, so the map does not contract across the solution
family.  The solver instead reduces the equation to the exact ODE form
(H/x)' = E2(x)/x^2 for H = F - E2, giving

    F(x) = E2(x) + x int_{x0}^x E2(t)/t^2 dt + K x,

with K pinned by an anchor value F(x0) = v0.  E2(t)/t^2 is bounded near 0
because E2(t) = -C(F) t^2 below 1, so the improper endpoint is tame.

The improper integral int_0^x g(t)/t dt realizes its epsilon -> 0 limit
analytically: below the first grid point g is modeled as c t (so g/t is the
constant c and the [0, t0] piece contributes c t0 = g(t0)); the model is
sanity-checked by requiring |g|/t to stay bounded over the first ten points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import (
    AnchorOutOfRange,
    BadGrid,
    NotHomogeneous,
    NotIntegrableNearZero,
    XBeyondGrid,
)

Provider = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridFunction:
    """Samples on the half-offset grid x_i = (i + 1/2) h over (0, X]."""

    xs: np.ndarray
    values: np.ndarray
    X: float
    h: float

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64)
        values = np.asarray(self.values)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", values)
        if xs.ndim != 1 or xs.shape != values.shape:
            raise BadGrid("grid and values must be 1-D arrays of equal length")
        if len(xs) < 2:
            raise BadGrid("need at least two grid points")
        if xs[0] <= 0 or xs[-1] > self.X * (1 + 1e-12):
            raise BadGrid(f"grid must lie in (0, {self.X}]")
        d = np.diff(xs)
        if d.min() <= 0 or abs(d.max() - d.min()) > 1e-9 * self.h:
            raise BadGrid("grid must be uniform and strictly increasing")
        if abs(d[0] - self.h) > 1e-9 * self.h:
            raise BadGrid(f"grid spacing {d[0]} != declared h = {self.h}")
        dist = np.abs(xs - np.round(xs))
        if dist.min() < 0.499 * self.h:
            raise BadGrid("grid points must avoid integers by at least h/2")
        if not np.all(np.isfinite(values.view(np.float64) if
                                  np.iscomplexobj(values) else values)):
            raise BadGrid("values must be finite")

    def __len__(self):
        return len(self.xs)


def make_grid(X: float, h: float) -> np.ndarray:
    """Half-offset points (i + 1/2) h up to X."""
    if not (h > 0 and X > h):
        raise BadGrid(f"need 0 < h < X, got h = {h}, X = {X}")
    n = int(math.floor(X / h - 0.5 + 1e-9)) + 1
    if n < 2:
        raise BadGrid(f"grid for X = {X}, h = {h} has fewer than 2 points")
    return (np.arange(n) + 0.5) * h


def grid_function(xs_or_X, values_or_provider, h: float = None) -> GridFunction:
    """Build a GridFunction from (X, provider, h) or (xs, values)."""
    if np.isscalar(xs_or_X):
        X = float(xs_or_X)
        xs = make_grid(X, h)
        values = np.asarray(values_or_provider(xs))
        return GridFunction(xs=xs, values=values, X=X, h=h)
    xs = np.asarray(xs_or_X, dtype=np.float64)
    h = float(xs[1] - xs[0]) if h is None else h
    return GridFunction(xs=xs, values=np.asarray(values_or_provider),
                        X=float(xs[-1] + h / 2), h=h)


# ---------------------------------------------------------------------------
# Solution family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolutionFamily:
    """Members x -> (f1(x) + A) x of the candidate family; member(0) = 0."""

    base: Provider          # xs -> x * f1(x)
    A: complex = 0.0

    def __call__(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        return self.base(xs) + self.A * xs


def solution_family(table, constants, A=0.0) -> SolutionFamily:
    """Family built on the closed-form f1 of a totient table."""
    from .decomp import f1_values

    def base(xs: np.ndarray) -> np.ndarray:
        return np.asarray(xs) * f1_values(xs, table, constants)

    return SolutionFamily(base=base, A=A)


# ---------------------------------------------------------------------------
# Improper integral int_0^x g(t)/t dt
# ---------------------------------------------------------------------------

def _integrand_check(g: GridFunction) -> np.ndarray:
    w = g.values / g.xs
    m = min(10, len(w))
    head = np.abs(w[:m])
    if head.max() > 10 * head[-1] + 1e-12 * (1 + head.max()):
        raise NotIntegrableNearZero(
            "|g(t)|/t grows toward 0 over the first grid points; "
            "g does not look like O(t)")
    return w


def _cumulative(g: GridFunction) -> np.ndarray:
    """W_i = int_0^{x_i} g/t dt: small-t model piece plus trapezoid."""
    w = _integrand_check(g)
    inner = np.concatenate(([0], np.cumsum((w[:-1] + w[1:]) / 2) * g.h))
    return g.values[0] + inner


def improper_integral(g: GridFunction, x: float) -> complex:
    """int_0^x g(t)/t dt for 0 < x <= X, trapezoid with an O(t) small-t model."""
    if x > g.X * (1 + 1e-12):
        raise XBeyondGrid(f"x = {x} beyond grid endpoint X = {g.X}")
    if x <= 0:
        raise XBeyondGrid(f"need x > 0, got {x}")
    w = _integrand_check(g)
    xs = g.xs
    if x <= xs[0]:
        # inside the modeled region: integrand is the constant g(t0)/t0
        return _plain(w[0] * x)
    cum = _cumulative(g)
    j = int(np.searchsorted(xs, x, side="right") - 1)
    if j >= len(xs) - 1:
        # past the last point by at most h/2: constant extrapolation
        return _plain(cum[-1] + w[-1] * (x - xs[-1]))
    wx = w[j] + (w[j + 1] - w[j]) * (x - xs[j]) / g.h
    return _plain(cum[j] + (w[j] + wx) / 2 * (x - xs[j]))


def _plain(v):
    v = complex(v)
    return v.real if v.imag == 0 else v


# ---------------------------------------------------------------------------
# Residual of a candidate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    """sup and per-point values of F - int_0^x F/t - E2 on the grid."""

    xs: np.ndarray
    residuals: np.ndarray
    sup: float
    argmax: float
    X: float
    h: float


def residual(candidate: Union[SolutionFamily, GridFunction, Provider],
             e2_provider: Provider, X: float, h: float) -> ResidualReport:
    """Check a candidate against the equation on the (X, h) half-offset grid."""
    xs = make_grid(X, h)
    if isinstance(candidate, GridFunction):
        if len(candidate.xs) != len(xs) or not np.allclose(
                candidate.xs, xs, rtol=0, atol=1e-9 * h):
            raise BadGrid("candidate grid does not match the requested (X, h)")
        g = candidate
    else:
        g = GridFunction(xs=xs, values=np.asarray(candidate(xs)), X=X, h=h)
    cum = _cumulative(g)
    res = g.values - cum - np.asarray(e2_provider(xs))
    a = np.abs(res)
    i = int(np.argmax(a))
    return ResidualReport(xs=xs, residuals=res, sup=float(a[i]),
                          argmax=float(xs[i]), X=X, h=h)


# ---------------------------------------------------------------------------
# Direct solver
# ---------------------------------------------------------------------------

def solve_from_e2(e2_provider: Provider, X: float, h: float,
                  anchor: tuple) -> GridFunction:
    """Solve the equation from E2 samples via the exact ODE reduction.

    anchor = (x0, v0) pins the free homogeneous component:
    F(x) = E2(x) + x int_{x0}^x E2(t)/t^2 dt + K x, K = (v0 - E2(x0))/x0.
    """
    xs = make_grid(X, h)
    if np.count_nonzero(xs < 1) < 10:
        raise BadGrid("need at least 10 grid points below 1; shrink h")
    x0, v0 = anchor
    x0 = float(x0)
    if not (0 < x0 <= X):
        raise AnchorOutOfRange(f"anchor x0 = {x0} outside (0, {X}]")
    e2 = np.asarray(e2_provider(xs))
    w = e2 / (xs * xs)
    cum = np.concatenate(([0], np.cumsum((w[:-1] + w[1:]) / 2) * h))

    def w_to(x: float) -> float:
        # int_{xs[0]}^{x} w dt, linear interpolation inside cells
        if x < xs[0]:
            return -(w[0] * (xs[0] - x))
        j = int(np.searchsorted(xs, x, side="right") - 1)
        if j >= len(xs) - 1:
            return cum[-1] + w[-1] * (x - xs[-1])
        wx = w[j] + (w[j + 1] - w[j]) * (x - xs[j]) / h
        return cum[j] + (w[j] + wx) / 2 * (x - xs[j])

    i_from_x0 = cum - w_to(x0)
    e2_at_x0 = np.asarray(e2_provider(np.array([x0])))[0]
    k = (v0 - e2_at_x0) / x0
    values = e2 + xs * i_from_x0 + k * xs
    return GridFunction(xs=xs, values=values, X=X, h=h)


# ---------------------------------------------------------------------------
# Homogeneous structure probe
# ---------------------------------------------------------------------------

def homogeneous_probe(g: GridFunction, tol: float = None) -> tuple:
    """Fit g ~ A x and report (A, sup deviation |g - A x|).

    Pre-check: g must satisfy the homogeneous equation (e2 = 0) within tol on
    its own grid; default tol scales with the sample size.  A failure raises
    NotHomogeneous - the numerical witness that only A x passes.
    """
    cum = _cumulative(g)
    res = np.abs(g.values - cum)
    scale = float(np.max(np.abs(g.values))) if len(g) else 0.0
    if tol is None:
        tol = max(1e-8, 1e-4 * max(1.0, scale))
    sup_res = float(res.max())
    if sup_res > tol:
        raise NotHomogeneous(
            f"homogeneous-equation residual {sup_res} exceeds tolerance {tol}")
    xs = g.xs
    a = complex(np.sum(np.conj(xs) * g.values) / np.sum(xs * xs))
    a = a.real if a.imag == 0 else a
    deviation = float(np.max(np.abs(g.values - a * xs)))
    return a, deviation
