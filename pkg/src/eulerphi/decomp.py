"""Arithmetic/analytic decomposition of the totient error term.

With E2(x) the symmetric-convention error term, the identity under test is

    E2(x) = x f1(x) + (1/2) g1(x)        for x >= 1,

where f1(x) = sum_n (alpha(n)/n) s(x/n) with s the midpoint sawtooth
(0 at integers, 1/2 - {x} otherwise) and
g1(x) = sum_n alpha(n) {x/n}({x/n} - 1).

f1 has the closed form  f1(x) = A1/2 - 2 C x + S_f(x)  where
S_f(x) = sum_{n<=x} (alpha(n)/n) floor(x/n) taken as a right limit; since
floor(x/n) depends only on floor(x), S_f(x) equals the cumulative sum of
phi(j)/j up to floor(x), with a half-jump correction -phi(N)/(2N) exactly at
integers.  The remainder R = E2 - x f1 satisfies R' = -f1 between integers
and R(x) = g1(x)/2 for x >= 1, giving three independent routes to R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .coeffs import TotientTable, error_term
from .errors import (
    MBeyondTable,
    ModeUnavailable,
    MSmallerThanX,
    NonPositiveX,
    UsageError,
    XBelowN,
    XBelowOne,
    XBeyondTable,
)
from .products import Constants, ValueWithBound

Scalar = Union[int, float, Fraction]


# ---------------------------------------------------------------------------
# Sawtooth and fractional parts
# ---------------------------------------------------------------------------

def sawtooth(x: Scalar) -> Scalar:
    """s(x): 0 at integers, 1/2 - {x} otherwise (midpoint convention)."""
    if isinstance(x, (int,)):
        return 0
    if isinstance(x, Fraction):
        k = math.floor(x)
        r = x - k
        return Fraction(0) if r == 0 else Fraction(1, 2) - r
    k = math.floor(x)
    if x == k:
        return 0.0
    return 0.5 - (x - k)


def _floor_of(x: Scalar) -> int:
    return math.floor(x)


def _frac_parts(x: float, n: np.ndarray):
    """floor(x/n) and {x/n} for integer n, robust to division rounding.

    x/n can round to just below an integer when n divides x exactly; the
    quotient is declared integral iff round(x/n) * n reproduces x.
    """
    q = x / n
    m = np.round(q)
    exact = m * n == x
    fl = np.where(exact, m, np.floor(q))
    fr = np.where(exact, 0.0, q - np.floor(q))
    return fl, fr


def _is_integer(x: Scalar) -> bool:
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    return x == math.floor(x)


def _plain(v):
    """Collapse numpy scalars; complex with zero imaginary part to real."""
    v = complex(v)
    return v.real if v.imag == 0 else v


def _exactify(v) -> Fraction:
    """Lift a constant to an exact rational; float -> Fraction is lossless.

    Exact-mode identities then hold as equalities in Q for any consistent
    constants (the truncation perturbations cancel algebraically), so rational
    comparisons come out exact rather than within rounding.
    """
    if isinstance(v, Fraction):
        return v
    if isinstance(v, complex):
        raise ModeUnavailable("complex constants have no exact-rational mode")
    return Fraction(v)


# ---------------------------------------------------------------------------
# f1
# ---------------------------------------------------------------------------

def _check_range(x, table: TotientTable, lowest) -> int:
    if x < lowest:
        raise XBelowOne(f"need x >= {lowest}, got {x}")
    k = _floor_of(x)
    if k > table.N:
        raise XBeyondTable(f"x = {x} beyond table N = {table.N}")
    return k

def f1_closed(x: Scalar, table: TotientTable, constants: Constants) -> Scalar:
    """f1 via the closed form A1/2 - 2Cx + S_f(x), half-jump at integers.

    x = 0 is the one point where the closed form and the series differ as
    limits; the series value, exactly 0, is returned there.
    """
    k = _check_range(x, table, 0)
    exact = table.exact and isinstance(x, (int, Fraction))
    if x == 0:
        return Fraction(0) if exact else 0.0
    a1, c = constants.a1.value, constants.c.value
    if exact:
        a1, c = _exactify(a1), _exactify(c)
    s_f = table.ratio_cumsum[k]
    if _is_integer(x):
        half = Fraction(1, 2) if exact else 0.5
        s_f = s_f - half * table.phi[k] / k
    return a1 / 2 - 2 * c * x + s_f


@dataclass(frozen=True)
class F1OneSided:
    """One-sided limits of f1 at an integer; f1 there is their midpoint."""

    left: Scalar
    right: Scalar
    half: Scalar
    f1_value: Scalar
    jump: Scalar


def f1_one_sided(N: int, table: TotientTable, constants: Constants) -> F1OneSided:
    """Left/right limits of f1 at integer N; f1(N) is their midpoint.

    The jump equals phi(N)/N, the n | N portion of the coefficient series.
    """
    if not isinstance(N, int) or N < 1:
        raise UsageError(f"need an integer N >= 1, got {N}")
    if N > table.N:
        raise XBeyondTable(f"N = {N} beyond table N = {table.N}")
    a1, c = constants.a1.value, constants.c.value
    if table.exact:
        a1, c = _exactify(a1), _exactify(c)
    base = a1 / 2 - 2 * c * N
    left = base + table.ratio_cumsum[N - 1]
    right = base + table.ratio_cumsum[N]
    two = Fraction(2) if table.exact else 2.0
    half = (left + right) / two
    return F1OneSided(left=left, right=right, half=half, f1_value=half,
                      jump=table.phi[N] / N)


def f1_series_raw(x: Scalar, table: TotientTable, M: int) -> Scalar:
    """The bare truncation sum_{n<=M} (alpha(n)/n) s(x/n), no tail correction."""
    if M > table.N:
        raise MBeyondTable(f"M = {M} beyond table N = {table.N}")
    if M < 1:
        raise UsageError(f"need M >= 1, got {M}")
    if x < 0:
        raise XBelowOne(f"need x >= 0, got {x}")
    if table.exact and isinstance(x, (int, Fraction)):
        total = Fraction(0)
        for n in range(1, M + 1):
            a = table.coeffs.alpha[n]
            if a == 0:
                continue
            total += a * sawtooth(Fraction(x) / n) / n
        return total
    x = float(x)
    n = np.arange(1, M + 1, dtype=np.float64)
    _, fr = _frac_parts(x, n)
    s = np.where(fr == 0, 0.0, 0.5 - fr)
    a = table.coeffs.alpha_array(M)[1:] if table.exact else np.asarray(table.coeffs.alpha)[1 : M + 1]
    return _plain(np.sum(a / n * s))


def f1_series(x: Scalar, table: TotientTable, constants: Constants,
              M: int) -> Scalar:
    """f1 via truncation at M plus the exact tail in closed form.

    For n > M >= x the sawtooth argument is in (0,1), so the tail collapses
    to (A1 - P1(M))/2 - x (A2 - P2(M)) with P1, P2 the partial sums of
    alpha(n)/n and alpha(n)/n^2.  Given the same constants this is
    algebraically identical to f1_closed; differences are pure rounding.
    """
    if M > table.N:
        raise MBeyondTable(f"M = {M} beyond table N = {table.N}")
    if x > M:
        raise MSmallerThanX(f"tail formula needs M >= x, got M = {M} < x = {x}")
    if x < 0:
        raise XBelowOne(f"need x >= 0, got {x}")
    if x == 0:
        return Fraction(0) if table.exact and isinstance(x, (int, Fraction)) else 0.0
    head = f1_series_raw(x, table, M)
    a1, a2 = constants.a1.value, constants.a2.value
    if table.exact and isinstance(x, (int, Fraction)):
        a1, a2 = _exactify(a1), _exactify(a2)
        p1 = Fraction(0)
        p2 = Fraction(0)
        for n in range(1, M + 1):
            a = table.coeffs.alpha[n]
            if a == 0:
                continue
            p1 += Fraction(a, n)
            p2 += Fraction(a, n * n)
        return head + (a1 - p1) / 2 - x * (a2 - p2)
    n = np.arange(1, M + 1, dtype=np.float64)
    a = table.coeffs.alpha_array(M)[1:] if table.exact else np.asarray(table.coeffs.alpha)[1 : M + 1]
    p1 = np.sum(a / n)
    p2 = np.sum(a / (n * n))
    return _plain(head + (a1 - p1) / 2 - float(x) * (a2 - p2))


def f1_values(xs: np.ndarray, table: TotientTable,
              constants: Constants) -> np.ndarray:
    """Vectorized f1_closed over a float grid (0 maps to 0 exactly)."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.size == 0:
        return np.zeros(0)
    if xs.min() < 0:
        raise XBelowOne(f"need x >= 0, got {xs.min()}")
    if xs.max() > table.N:
        raise XBeyondTable(f"{xs.max()} beyond table N = {table.N}")
    a1 = _plain(constants.a1.value)
    c = _plain(constants.c.value)
    if table.exact:
        rc = np.array([float(v) for v in table.ratio_cumsum])
    else:
        rc = np.asarray(table.ratio_cumsum)
    phi = table.phi_array()
    k = np.floor(xs).astype(np.int64)
    out = a1 / 2 - 2 * c * xs + rc[k]
    at_int = (xs == k) & (k >= 1)
    if np.any(at_int):
        kk = np.maximum(k, 1)
        out = out - np.where(at_int, phi[kk] / (2.0 * kk), 0.0)
    out = np.where(xs == 0, 0.0, out)
    return out


# ---------------------------------------------------------------------------
# g1
# ---------------------------------------------------------------------------

def g1(x: Scalar, table: TotientTable, constants: Constants) -> Scalar:
    """g1(x) = sum_n alpha(n) {x/n}({x/n}-1), summed in closed tail form.

    Terms with n > x have {x/n} = x/n, so the tail is
    x^2 (A2 - P2(x)) - x (A1 - P1(x)).
    """
    if x < 0:
        raise XBelowOne(f"need x >= 0, got {x}")
    k = _floor_of(x)
    if k > table.N:
        raise XBeyondTable(f"x = {x} beyond table N = {table.N}")
    a1, a2 = constants.a1.value, constants.a2.value
    if table.exact and isinstance(x, (int, Fraction)):
        a1, a2 = _exactify(a1), _exactify(a2)
        xf = Fraction(x)
        s_g = Fraction(0)
        p1 = Fraction(0)
        p2 = Fraction(0)
        for n in range(1, k + 1):
            a = table.coeffs.alpha[n]
            if a == 0:
                continue
            q = xf / n
            r = q - math.floor(q)
            s_g += a * r * (r - 1)
            p1 += Fraction(a, n)
            p2 += Fraction(a, n * n)
        return s_g + xf * xf * (a2 - p2) - xf * (a1 - p1)
    x = float(x)
    if k == 0:
        return _plain(x * x * a2 - x * a1)
    n = np.arange(1, k + 1, dtype=np.float64)
    _, fr = _frac_parts(x, n)
    a = table.coeffs.alpha_array(k)[1:] if table.exact else np.asarray(table.coeffs.alpha)[1 : k + 1]
    s_g = np.sum(a * fr * (fr - 1))
    p1 = np.sum(a / n)
    p2 = np.sum(a / (n * n))
    return _plain(s_g + x * x * (a2 - p2) - x * (a1 - p1))


# ---------------------------------------------------------------------------
# Fractional-part integral
# ---------------------------------------------------------------------------

def frac_integral(n: int, x: Scalar) -> Scalar:
    """int_n^x {t/n} dt = (n/2)({x/n}^2 + floor(x/n) - 1), for x >= n."""
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"need an integer n >= 1, got {n}")
    if x < n:
        raise XBelowN(f"integral starts at n = {n}, got x = {x}")
    if isinstance(x, Fraction) or isinstance(x, int):
        q = Fraction(x) / n
        fl = math.floor(q)
        r = q - fl
        return Fraction(n, 2) * (r * r + fl - 1)
    q = x / n
    m = round(q)
    if m * n == x:
        fl, r = float(m), 0.0
    else:
        fl = math.floor(q)
        r = q - fl
    return n / 2 * (r * r + fl - 1)


# ---------------------------------------------------------------------------
# R = E2 - x f1, three routes
# ---------------------------------------------------------------------------

def _integral_of_f1(x: float, table: TotientTable, constants: Constants):
    # int_0^x f1 = A1 x / 2 - C x^2 + sum_k S_f(k+0) len(piece k), pieces
    # (k, k+1) where S_f is constant; exact for the piecewise-linear f1.
    a1, c = constants.a1.value, constants.c.value
    k = _floor_of(x)
    rc = table.ratio_cumsum
    if table.exact and isinstance(x, (int, Fraction)):
        a1, c = _exactify(a1), _exactify(c)
        xf = Fraction(x)
        full = sum(rc[j] for j in range(1, k))
        partial = rc[k] * (xf - k) if k >= 1 else 0
        return a1 * xf / 2 - c * xf * xf + full + partial
    x = float(x)
    rcf = np.array([float(v) for v in rc[: k + 1]]) if table.exact \
        else np.asarray(rc)[: k + 1]
    full = float(np.sum(rcf[1:k])) if k >= 2 else 0.0
    partial = float(rcf[k]) * (x - k) if k >= 1 else 0.0
    return a1 * x / 2 - c * x * x + full + partial


def r_function(x: Scalar, table: TotientTable, constants: Constants,
               route: str = "definition") -> Scalar:
    """R(x) = E2(x) - x f1(x) by one of three independent routes.

    definition: assemble E2 and f1 directly (any x >= 0).
    integral:   R(x) = -int_0^x f1(t) dt, exact piecewise integration of the
                piecewise-linear f1 (needs x > 0).
    closed:     R(x) = g1(x)/2, valid for x >= 1.
    """
    if route == "definition":
        if x < 0:
            raise XBelowOne(f"need x >= 0, got {x}")
        k = _floor_of(x)
        if k > table.N:
            raise XBeyondTable(f"x = {x} beyond table N = {table.N}")
        e2 = error_term(table, constants.c, x, convention="symmetric")
        return e2 - x * f1_closed(x, table, constants)
    if route == "integral":
        if x <= 0:
            raise NonPositiveX(f"integral route needs x > 0, got {x}")
        k = _floor_of(x)
        if k > table.N:
            raise XBeyondTable(f"x = {x} beyond table N = {table.N}")
        return -_integral_of_f1(x, table, constants)
    if route == "closed":
        if x < 1:
            raise XBelowOne(f"closed route needs x >= 1, got {x}")
        two = Fraction(2) if table.exact and isinstance(x, (int, Fraction)) else 2.0
        return g1(x, table, constants) / two
    raise UsageError(f"route must be definition, integral, or closed; got {route!r}")


# ---------------------------------------------------------------------------
# Full decomposition report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionReport:
    """E2(x) against the arithmetic part x f1(x) and analytic part g1(x)/2.

    residual = e2 - arithmetic_part - analytic_part (exactly 0 in exact mode,
    pure rounding in float mode).  exact_verdict reports the constant-free
    reduced rational identity: 'pass'/'fail' for exact tables at rational x,
    'not-applicable' otherwise.
    """

    x: Scalar
    e2: ValueWithBound
    arithmetic_part: ValueWithBound
    analytic_part: ValueWithBound
    residual: Scalar
    exact_verdict: str


def _exact_reduced_identity(x: Fraction, table: TotientTable) -> bool:
    # sum'_{n<=x} phi(n) = x(S_f - J/2) + S_g/2 - x^2 P2 / 2 + x P1 / 2
    # with J = phi(x)/x at integer x (else 0); C and A1 have cancelled, so
    # every quantity is rational and the comparison is exact.
    k = math.floor(x)
    alpha = table.coeffs.alpha
    s_g = Fraction(0)
    p1 = Fraction(0)
    p2 = Fraction(0)
    for n in range(1, k + 1):
        a = alpha[n]
        if a == 0:
            continue
        q = x / n
        r = q - math.floor(q)
        s_g += a * r * (r - 1)
        p1 += Fraction(a, n)
        p2 += Fraction(a, n * n)
    s_f = table.ratio_cumsum[k]
    lhs = table.cumulative[k]
    j = Fraction(0)
    if x.denominator == 1:
        j = table.phi[k] / Fraction(k)
        lhs = lhs - table.phi[k] / 2
    rhs = x * (s_f - j / 2) + s_g / 2 - x * x * p2 / 2 + x * p1 / 2
    return lhs == rhs


def decompose(x: Scalar, table: TotientTable,
              constants: Constants) -> DecompositionReport:
    """Evaluate every piece of E2(x) = x f1(x) + g1(x)/2 at one point."""
    if x < 1:
        raise XBelowOne(f"decomposition needs x >= 1, got {x}")
    k = _floor_of(x)
    if k > table.N:
        raise XBeyondTable(f"x = {x} beyond table N = {table.N}")
    e2 = error_term(table, constants.c, x, convention="symmetric")
    f1v = f1_closed(x, table, constants)
    g1v = g1(x, table, constants)
    two = Fraction(2) if table.exact and isinstance(x, (int, Fraction)) else 2.0
    xf1 = x * f1v
    hg1 = g1v / two
    residual = e2 - xf1 - hg1
    xf = float(x)
    b_c, b_a1, b_a2 = constants.c.bound, constants.a1.bound, constants.a2.bound
    e2_b = b_c * xf * xf
    f1_b = b_a1 / 2 + 2 * xf * b_c
    g1_b = xf * xf * b_a2 + xf * b_a1
    verdict = "not-applicable"
    if table.exact and isinstance(x, (int, Fraction)):
        verdict = "pass" if _exact_reduced_identity(Fraction(x), table) else "fail"
    return DecompositionReport(
        x=x,
        e2=ValueWithBound(e2, e2_b, constants.c.bound_kind),
        arithmetic_part=ValueWithBound(xf1, xf * f1_b, constants.a1.bound_kind),
        analytic_part=ValueWithBound(hg1, g1_b / 2, constants.a1.bound_kind),
        residual=residual, exact_verdict=verdict)


def verify_identity_batch(xs, table: TotientTable) -> list:
    """Run the constant-free reduced identity at many rational x at once.

    Prefix sums of alpha(n)/n and alpha(n)/n^2 are shared across the batch,
    leaving one O(floor(x)) rational sawtooth sum per point.  Returns
    [(x, passed, rational_residual), ...].
    """
    if not table.exact:
        raise ModeUnavailable("the reduced identity needs an exact table")
    alpha = table.coeffs.alpha
    n_max = table.N
    p1 = [Fraction(0)] * (n_max + 1)
    p2 = [Fraction(0)] * (n_max + 1)
    for n in range(1, n_max + 1):
        a = alpha[n]
        p1[n] = p1[n - 1] + (Fraction(a, n) if a else 0)
        p2[n] = p2[n - 1] + (Fraction(a, n * n) if a else 0)
    out = []
    for x in xs:
        xq = Fraction(x)
        if xq < 1:
            raise XBelowOne(f"identity needs x >= 1, got {x}")
        k = math.floor(xq)
        if k > n_max:
            raise XBeyondTable(f"x = {x} beyond table N = {n_max}")
        s_g = Fraction(0)
        for n in range(1, k + 1):
            a = alpha[n]
            if a == 0:
                continue
            q = xq / n
            r = q - (q.numerator // q.denominator)
            if r:
                s_g += a * r * (r - 1)
        s_f = table.ratio_cumsum[k]
        lhs = table.cumulative[k]
        j = Fraction(0)
        if xq.denominator == 1:
            j = table.phi[k] / Fraction(k)
            lhs = lhs - table.phi[k] / 2
        rhs = xq * (s_f - j / 2) + s_g / 2 - xq * xq * p2[k] / 2 + xq * p1[k] / 2
        res = lhs - rhs
        out.append((xq, res == 0, res))
    return out
