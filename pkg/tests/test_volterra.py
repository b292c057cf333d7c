"""Grid functions, the improper integral, residuals, solver, and the probe."""

import numpy as np
import pytest

from eulerphi.coeffs import make_e2, phi_table
from eulerphi.decomp import f1_closed, f1_values
from eulerphi.errors import (
    AnchorOutOfRange,
    BadGrid,
    NotHomogeneous,
    NotIntegrableNearZero,
    XBeyondGrid,
)
from eulerphi.products import compute_constants
from eulerphi.volterra import (
    GridFunction,
    grid_function,
    homogeneous_probe,
    improper_integral,
    make_grid,
    residual,
    solution_family,
    solve_from_e2,
)


@pytest.fixture(scope="module")
def small_setup(zeta_spec):
    table = phi_table(zeta_spec, 25, mode="float")
    cons = compute_constants(zeta_spec, prime_cutoff=10 ** 5)
    return table, cons, make_e2(table, cons.c)


def zero_e2(xs):
    return np.zeros_like(np.asarray(xs, dtype=np.float64))


def test_make_grid_shape_and_offset():
    xs = make_grid(5.0, 0.1)
    assert xs[0] == pytest.approx(0.05)
    assert np.allclose(np.diff(xs), 0.1)
    assert xs[-1] <= 5.0
    # half-offset points stay clear of the integers
    dist = np.abs(xs - np.round(xs))
    assert dist.min() >= 0.05 - 1e-12
    with pytest.raises(BadGrid):
        make_grid(0.05, 0.1)


def test_grid_function_validation():
    with pytest.raises(BadGrid):
        GridFunction(xs=np.array([0.5, 1.0, 1.5]),
                     values=np.zeros(3), X=1.75, h=0.5)   # hits an integer
    with pytest.raises(BadGrid):
        GridFunction(xs=np.array([0.25, 0.75, 1.6]),
                     values=np.zeros(3), X=2.0, h=0.5)    # non-uniform
    with pytest.raises(BadGrid):
        GridFunction(xs=np.array([0.25]), values=np.zeros(1), X=0.5, h=0.5)
    g = grid_function(2.0, lambda xs: xs, 1e-3)
    assert len(g) == len(g.xs)


def test_improper_integral_linear_integrand():
    # g(t) = t: int_0^x g/t dt = x, exact for the trapezoid rule
    g = grid_function(2.0, lambda xs: xs, 1e-3)
    assert improper_integral(g, 2.0) == pytest.approx(2.0, abs=1e-12)
    assert improper_integral(g, 0.3141) == pytest.approx(0.3141, abs=1e-12)


def test_improper_integral_quadratic_integrand():
    # g(t) = t^2: int = x^2/2, small-t model error is O(h^2)
    h = 1e-3
    g = grid_function(2.0, lambda xs: xs ** 2, h)
    for x in (0.5, 1.37, 2.0):
        assert improper_integral(g, x) == pytest.approx(x * x / 2, abs=1e-6)


def test_improper_integral_domain():
    g = grid_function(2.0, lambda xs: xs, 1e-3)
    with pytest.raises(XBeyondGrid):
        improper_integral(g, 2.5)
    with pytest.raises(XBeyondGrid):
        improper_integral(g, 0.0)


def test_not_integrable_near_zero():
    g = grid_function(2.0, lambda xs: np.ones_like(xs), 1e-3)
    with pytest.raises(NotIntegrableNearZero):
        improper_integral(g, 1.0)


def test_residual_of_shifted_candidate():
    # candidate 0.01 x^2 against e2 = 0 leaves residual 0.01 x^2 / 2
    X, h = 5.0, 1e-3
    rep = residual(lambda xs: 0.01 * xs ** 2, zero_e2, X, h)
    want = 0.005 * rep.xs ** 2
    assert np.max(np.abs(rep.residuals - want)) < 1e-6
    assert rep.sup == pytest.approx(0.005 * rep.xs[-1] ** 2, rel=1e-3)
    assert rep.argmax == pytest.approx(rep.xs[-1])


def test_residual_grid_candidate_must_match():
    sol = solve_from_e2(zero_e2, 5.0, 1e-3, (1.0, 2.0))
    with pytest.raises(BadGrid):
        residual(sol, zero_e2, 5.0, 2e-3)


def test_solve_zero_e2_gives_homogeneous_member():
    # e2 = 0 anchored at (1.5, 3) must return exactly K x with K = 2
    sol = solve_from_e2(zero_e2, 5.0, 1e-3, (1.5, 3.0))
    assert np.max(np.abs(sol.values - 2.0 * sol.xs)) < 1e-12


def test_solve_anchor_validation():
    with pytest.raises(AnchorOutOfRange):
        solve_from_e2(zero_e2, 5.0, 1e-3, (6.0, 1.0))
    with pytest.raises(AnchorOutOfRange):
        solve_from_e2(zero_e2, 5.0, 1e-3, (0.0, 1.0))
    with pytest.raises(BadGrid):
        solve_from_e2(zero_e2, 5.0, 0.2, (1.0, 1.0))   # too few points below 1


def test_homogeneous_probe_recovers_slope():
    g = grid_function(4.0, lambda xs: 2.0 * xs, 1e-3)
    a, dev = homogeneous_probe(g)
    assert a == pytest.approx(2.0, abs=1e-12)
    assert dev < 1e-10


def test_homogeneous_probe_from_anchored_solve():
    # anchor (1, 2) pins the member 2x of the homogeneous family
    sol = solve_from_e2(zero_e2, 5.0, 1e-3, (1.0, 2.0))
    a, dev = homogeneous_probe(sol)
    assert a == pytest.approx(2.0, abs=1e-9)
    assert dev < 1e-9


def test_homogeneous_probe_rejects_quadratic():
    g = grid_function(4.0, lambda xs: xs ** 2, 1e-3)
    with pytest.raises(NotHomogeneous):
        homogeneous_probe(g)


def test_family_members_differ_by_ax(small_setup):
    table, cons, _ = small_setup
    fam0 = solution_family(table, cons, 0.0)
    fam3 = solution_family(table, cons, 3.0)
    xs = make_grid(20.0, 0.01)
    assert np.allclose(fam3(xs) - fam0(xs), 3.0 * xs, rtol=0, atol=1e-12)


def test_family_residual_small(small_setup):
    table, cons, e2p = small_setup
    fam = solution_family(table, cons, 0.0)
    rep = residual(fam, e2p, 20.0, 1e-3)
    assert rep.sup < 1e-5


def test_solver_recovers_family(small_setup):
    table, cons, e2p = small_setup
    x0 = 1.5
    v0 = x0 * f1_closed(x0, table, cons)
    sol = solve_from_e2(e2p, 10.0, 1e-3, (x0, v0))
    base = sol.xs * f1_values(sol.xs, table, cons)
    mask = sol.xs >= 0.5
    assert np.max(np.abs(sol.values - base)[mask]) < 1e-4
