"""Zeros of the twist-family invariants.

The family polynomial is a two-term power sum lambda1^n + sigma * lambda2^n,
so for large n its roots pile up along the equal-modulus set
|lambda1(z)| = |lambda2(z)|.  This module finds all roots of one family
member, samples that limit set, tests membership in the closed region
where |sigma(z)| dominates a small cyclotomic minimum, and hunts through
the (n, s, k) grid for a family root near a requested target.

Family members are never solved through their dense coefficients.  Raising
the lambdas to the n-th power spreads the coefficients over hundreds of
orders of magnitude, and a double-precision Horner evaluation of such a
polynomial is noise near the unit circle: the rounding floor (machine
epsilon times the largest term) can exceed the true value by twenty
orders.  Any dense method, ours or numpy's, then returns points that are
roots only of a noise-perturbed polynomial.  Instead the two-power
structure is evaluated directly: with E = lambda1^n / (sigma lambda2^n),
computed as an exponential of n log(lambda1/lambda2) - log sigma from the
small, perfectly conditioned lambda coefficients, a root is E = -1, the
residual is |E + 1| / (|E| + 1), and the Newton correction follows from
the log derivative.  The simultaneous Aberth-Ehrlich iteration then runs
on that functional form; only the starting circles come from the exact
integer coefficients.

General Laurent polynomials (without the power-sum structure) still go
through the dense path, with residuals normalized by the largest
evaluated term |c_j z^j|; see _residuals.  Records for the negative
family are the exact reciprocals of the positive ones (mirror identity),
which halves the grid work; the residual carries over unchanged because
E at the reciprocal point of the mirrored family is the same number.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import YamadaError
from .laurent import LaurentPoly, PoleAtZero, exact_div, sigma
from .replace import (
    DegreeCap,
    family_degree_estimate,
    family_polynomial,
    infinity_closed_form,
    r_compose,
)


class ZeroPolynomial(YamadaError):
    pass


class NoConvergence(YamadaError):
    """Raised when some residual is still above tolerance after the full
    iteration budget; carries every root estimate so callers can salvage
    the converged part."""

    def __init__(self, message: str, roots, residuals):
        super().__init__(message)
        self.roots = list(roots)
        self.residuals = list(residuals)


class PoleEncountered(YamadaError):
    pass


@dataclass(frozen=True)
class RootRecord:
    root: complex
    n: int
    s: int
    k: int
    sign: str
    residual: float
    degree: int


@dataclass(frozen=True)
class Witness:
    target: complex
    epsilon: float
    found: RootRecord
    distance: float


@dataclass(frozen=True)
class SearchCaps:
    k_max: int = 12
    s_max: int = 6
    n_max: int = 24
    degree_cap: int = 4000

    def doubled(self) -> "SearchCaps":
        return SearchCaps(
            2 * self.k_max, 2 * self.s_max, 2 * self.n_max, 2 * self.degree_cap
        )


@dataclass(frozen=True)
class NotFound:
    """Search outcome when no root landed inside the epsilon disc: the
    closest record seen over the whole capped grid, and the caps."""

    target: complex
    epsilon: float
    closest: RootRecord | None
    distance: float
    caps: SearchCaps


# ---------------------------------------------------------------------------
# polynomial root extraction

_GOLDEN = 0.6180339887498949


def _log_abs(c) -> float:
    """log|c| for an exact coefficient, safe far beyond float range."""
    if isinstance(c, Fraction):
        return _log_abs(c.numerator) - _log_abs(c.denominator)
    return math.log(abs(c))


def _initial_points(logmags: Sequence[float]) -> np.ndarray:
    """Starting points from the upper convex hull of (i, log|c_i|).

    Takes the coefficient log-magnitudes directly (-inf marks a zero
    coefficient) so callers with exact integer coefficients far beyond
    float range can still use the hull.  Each hull edge from index l to u
    contributes u - l points on the circle of radius
    (|c_l| / |c_u|)^(1/(u-l)), the classical estimate for how many roots
    live near that modulus.  Angles are spread with a golden-ratio
    stagger per edge so no start sits on a symmetry axis.
    """
    pts = [
        (i, lm) for i, lm in enumerate(logmags) if lm != -math.inf
    ]
    hull: list[tuple[int, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    out = np.empty(len(logmags) - 1, dtype=complex)
    pos = 0
    for e in range(len(hull) - 1):
        (lo, alo), (up, aup) = hull[e], hull[e + 1]
        m = up - lo
        radius = math.exp((alo - aup) / m)
        for j in range(m):
            theta = 2 * math.pi * ((j + _GOLDEN * (e + 1)) / m + _GOLDEN)
            out[pos] = radius * cmath.exp(1j * theta)
            pos += 1
    while pos < len(out):
        # end coefficients underflowed in scaling; park the leftovers on
        # a small circle and let the iteration sort them out
        out[pos] = 1e-6 * cmath.exp(2j * math.pi * _GOLDEN * (pos + 1))
        pos += 1
    return out


def _newton_ratio(cs: np.ndarray, rev: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p(z)/p'(z) for the ascending coefficient vector cs, evaluated
    directly inside the unit circle and through the reversed polynomial
    q(w) = w^d p(1/w) outside, where the direct Horner overflows."""
    d = len(cs) - 1
    out = np.empty_like(z)
    inner = np.abs(z) <= 1.0
    if inner.any():
        zi = z[inner]
        p = np.full_like(zi, cs[-1])
        dp = np.zeros_like(zi)
        for a in cs[-2::-1]:
            dp = dp * zi + p
            p = p * zi + a
        out[inner] = p / dp
    if not inner.all():
        zo = z[~inner]
        w = 1.0 / zo
        q = np.full_like(zo, rev[-1])
        dq = np.zeros_like(zo)
        for a in rev[-2::-1]:
            dq = dq * w + q
            q = q * w + a
        out[~inner] = zo * q / (d * q - w * dq)
    return out


def _residuals(
    cs: np.ndarray, rev: np.ndarray, z: np.ndarray, guard: float
) -> np.ndarray:
    """|p(z)| / (guard + max_j |c_j z^j|), the term-normalized residual.

    Dividing by the largest evaluated term makes the number scale-free:
    a true root sits at a few units of machine epsilon regardless of the
    root's modulus, while a point off by delta reports about
    degree * delta / |z|.  Dividing by the largest plain coefficient
    instead would be unattainably strict for roots outside the unit
    circle: |z|^degree amplification puts the floor far above any useful
    tolerance even in exact arithmetic, because the root itself only
    carries double precision.  The guard keeps the denominator positive;
    callers pass 1/max|coefficient| so the unscaled reading is
    |p| / (1 + largest term).  The identity |p(z)| = |z|^d |q(1/z)| for
    the reversed polynomial q keeps both factors finite outside the unit
    circle, where the ratio is formed without ever exponentiating |z|^d.
    """
    res = np.empty(len(z), dtype=float)
    inner = np.abs(z) <= 1.0
    if inner.any():
        zi = z[inner]
        t = np.abs(zi)
        p = np.full_like(zi, cs[-1])
        m = np.full_like(t, abs(cs[-1]))
        for a in cs[-2::-1]:
            p = p * zi + a
            m = np.maximum(m * t, abs(a))
        res[inner] = np.abs(p) / (guard + m)
    if not inner.all():
        zo = z[~inner]
        w = 1.0 / zo
        t = np.abs(w)
        q = np.full_like(zo, rev[-1])
        m = np.full_like(t, abs(rev[-1]))
        for a in rev[-2::-1]:
            q = q * w + a
            m = np.maximum(m * t, abs(a))
        # both |p(z)| and the largest term carry the common factor
        # |z|^d, which cancels; the guard shrinks by the same factor
        # and t^d underflows harmlessly for large |z|
        res[~inner] = np.abs(q) / (guard * t ** (len(rev) - 1) + m)
    return res


def _aberth(
    cs: np.ndarray, guard: float, max_iter: int, chunk: int = 512
) -> np.ndarray:
    """Simultaneous iteration with per-point freezing.

    A point whose residual reaches machine scale is frozen: it still
    repels the others but stops moving, so a resonant denominator at a
    near-double root cannot kick settled points loose again.  The best
    full configuration seen (by worst residual) is kept as a fallback in
    case the last stragglers wander at the iteration cap.
    """
    d = len(cs) - 1
    rev = cs[::-1].copy()
    z = _initial_points(
        [-math.inf if c == 0.0 else math.log(abs(c)) for c in cs]
    )
    freeze_tol = 100.0 * d * np.finfo(float).eps
    best = z.copy()
    best_score = math.inf
    with np.errstate(all="ignore"):
        for it in range(max_iter):
            res = _residuals(cs, rev, z, guard)
            score = float(np.max(res))
            if score < best_score:
                best_score = score
                best = z.copy()
            idx = np.nonzero(res > freeze_tol)[0]
            if len(idx) == 0:
                return z
            ratio = _newton_ratio(cs, rev, z[idx])
            rep = np.empty(len(idx), dtype=complex)
            for a in range(0, len(idx), chunk):
                sub = idx[a : a + chunk]
                blk = z[sub, None] - z[None, :]
                blk[np.arange(len(sub)), sub] = np.inf
                rep[a : a + chunk] = (1.0 / blk).sum(axis=1)
            step = ratio / (1.0 - ratio * rep)
            bad = ~np.isfinite(step)
            if bad.any():
                # a stalled iterate (p' = 0 or overflow): nudge it off
                step[bad] = 0.1 * (1.0 + np.abs(z[idx[bad]])) * np.exp(
                    2j * math.pi * _GOLDEN * (idx[bad] + it + 1)
                )
            z[idx] = z[idx] - step
        res = _residuals(cs, rev, z, guard)
        if float(np.max(res)) > best_score:
            return best
    return z


def _polish(
    cs: np.ndarray,
    rev: np.ndarray,
    z: np.ndarray,
    res: np.ndarray,
    guard: float,
    rounds: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Newton steps that are only kept when they lower the residual."""
    with np.errstate(all="ignore"):
        for _ in range(rounds):
            z2 = z - _newton_ratio(cs, rev, z)
            r2 = _residuals(cs, rev, z2, guard)
            better = r2 < res
            z = np.where(better, z2, z)
            res = np.where(better, r2, res)
    return z, res


def _find_roots_full(
    p: LaurentPoly,
    tol: float | None = 1e-9,
    max_iter: int = 400,
    polish_rounds: int = 3,
) -> tuple[list[complex], list[float], int]:
    """All roots of the Laurent polynomial p with their residuals.

    The power-of-A shift that clears negative exponents is stripped, so a
    root at zero never appears.  Coefficients are scaled by their max
    absolute value through exact Fractions before any float touches them.
    tol = None skips the convergence gate and returns whatever the
    iteration settled on.
    """
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no well-defined roots")
    _, coeffs = p.dense_coeffs()
    d = len(coeffs) - 1
    if d == 0:
        return [], [], 0
    big = max(abs(c) for c in coeffs)
    cs = np.array([float(Fraction(c, big)) for c in coeffs], dtype=float)
    guard = float(Fraction(1, big))
    rev = cs[::-1].copy()
    if d == 1:
        z = np.array([complex(Fraction(-coeffs[0], coeffs[1]))])
    else:
        z = _aberth(cs, guard, max_iter)
    with np.errstate(all="ignore"):
        res = _residuals(cs, rev, z, guard)
    z, res = _polish(cs, rev, z, res, guard, polish_rounds)
    order = sorted(
        range(d),
        key=lambda i: (cmath.phase(z[i]), abs(z[i]), z[i].real, z[i].imag),
    )
    roots = [complex(z[i]) for i in order]
    residuals = [float(res[i]) for i in order]
    if tol is not None and any(r > tol for r in residuals):
        worst = max(residuals)
        raise NoConvergence(
            f"worst residual {worst:.3e} above tolerance {tol:.3e}",
            roots,
            residuals,
        )
    return roots, residuals, d


def find_roots(p: LaurentPoly, tol: float = 1e-9) -> list[complex]:
    """All complex roots of p, each with term-normalized residual
    |p(root)| / (1 + max_j |c_j root^j|) at most tol.

    Roots of the A^m shift that clears negative exponents are artifacts
    and never reported.  A nonzero constant has no roots and returns [].
    """
    roots, _, _ = _find_roots_full(p, tol)
    return roots


# ---------------------------------------------------------------------------
# the two-term limit set

@lru_cache(maxsize=None)
def _limit_terms(
    s: int, k: int, sign: str = "+"
) -> tuple[LaurentPoly, LaurentPoly]:
    tw = infinity_closed_form(k, sign)
    bead_r = r_compose("theta", [tw] * s)
    bead_closed = r_compose("bouquet", [tw] * s)
    return -bead_r, exact_div(bead_r + bead_closed, sigma())


def limit_curve_gap(z: complex, s: int, k: int) -> float:
    """|lambda1(z)| - |lambda2(z)| for the two powers competing in the
    family polynomial; its zero set is where roots accumulate as the
    cycle length grows.

    Both lambdas are exact Laurent polynomials here (the divisions by
    sigma come out even), but points with sigma(z) = 0 or sigma(z) = -1
    are rejected anyway: there the second term's coefficient sigma or the
    theta normalization 1 + sigma vanishes and the two-power reading of
    the family breaks down.
    """
    if z == 0:
        raise PoleEncountered("z = 0 is outside the Laurent domain")
    sig = z + 1.0 + 1.0 / z
    if abs(sig) < 1e-12 or abs(sig + 1.0) < 1e-12:
        raise PoleEncountered(f"sigma({z}) is 0 or -1")
    l1, l2 = _limit_terms(s, k)
    return abs(l1.eval_complex(z)) - abs(l2.eval_complex(z))


def _gap_vectorized(
    zs: np.ndarray, l1: LaurentPoly, l2: LaurentPoly
) -> np.ndarray:
    lo1, c1 = l1.dense_coeffs()
    lo2, c2 = l2.dense_coeffs()
    v1 = np.polynomial.polynomial.polyval(zs, np.array(c1, dtype=float))
    v2 = np.polynomial.polynomial.polyval(zs, np.array(c2, dtype=float))
    return np.abs(v1 * zs ** lo1) - np.abs(v2 * zs ** lo2)


def limit_curve_points(
    s: int,
    k: int,
    angles: int = 720,
    radial: int = 240,
    r_lo: float = 0.05,
    r_hi: float = 20.0,
    refine: float = 1e-8,
) -> list[complex]:
    """Sample the gap-zero set on a polar grid, bisecting every sign
    change both along rays and along circles.

    A branch running radially never changes the gap's sign along a ray,
    so a ray-only scan misses it entirely; scanning the circles as well
    (with wraparound) catches those.  Bisection stops once the bracket is
    shorter than refine (arc length, for the circle passes).  The points
    come back sorted by angle then radius, deterministically for fixed
    arguments.
    """
    l1, l2 = _limit_terms(s, k)
    radii = np.geomspace(r_lo, r_hi, radial)
    step = 2 * math.pi / angles
    thetas = step * np.arange(angles)
    units = np.exp(1j * thetas)
    grid = radii[None, :] * units[:, None]
    with np.errstate(all="ignore"):
        gaps = _gap_vectorized(grid, l1, l2)
    finite = np.isfinite(gaps)
    found: list[tuple[float, float]] = []

    # sign changes along each ray, bisected in radius
    cross = np.nonzero(
        finite[:, :-1]
        & finite[:, 1:]
        & (np.sign(gaps[:, :-1]) * np.sign(gaps[:, 1:]) < 0)
    )
    ai, ri = cross
    lo = radii[ri]
    hi = radii[ri + 1]
    glo = gaps[ai, ri]
    us = units[ai]
    with np.errstate(all="ignore"):
        for _ in range(80):
            if not len(lo) or float(np.max(hi - lo)) <= refine:
                break
            mid = 0.5 * (lo + hi)
            gm = _gap_vectorized(mid * us, l1, l2)
            left = np.sign(gm) * np.sign(glo) > 0
            lo = np.where(left, mid, lo)
            glo = np.where(left, gm, glo)
            hi = np.where(left, hi, mid)
    found.extend(
        (float(thetas[a]), float(m)) for a, m in zip(ai, 0.5 * (lo + hi))
    )

    # sign changes along each circle, bisected in angle
    rolled = np.vstack([gaps[1:], gaps[:1]])
    frolled = np.vstack([finite[1:], finite[:1]])
    cross = np.nonzero(
        finite & frolled & (np.sign(gaps) * np.sign(rolled) < 0)
    )
    ai, ri = cross
    rad = radii[ri]
    tlo = thetas[ai]
    thi = tlo + step
    glo = gaps[ai, ri]
    with np.errstate(all="ignore"):
        for _ in range(80):
            if not len(tlo) or float(np.max((thi - tlo) * rad)) <= refine:
                break
            tm = 0.5 * (tlo + thi)
            gm = _gap_vectorized(rad * np.exp(1j * tm), l1, l2)
            left = np.sign(gm) * np.sign(glo) > 0
            tlo = np.where(left, tm, tlo)
            glo = np.where(left, gm, glo)
            thi = np.where(left, thi, tm)
    found.extend(
        (float(t) % (2 * math.pi), float(r))
        for t, r in zip(0.5 * (tlo + thi), rad)
    )

    found.sort()
    return [r * cmath.exp(1j * t) for t, r in found]


def omega_member(z: complex) -> bool:
    """Membership in the closed region where |sigma(z)| is at least the
    smallest of 1, |z^3 + 2z^2 + z + 1| and its reciprocal-image twin."""
    if z == 0:
        raise PoleAtZero("the region test is undefined at zero")
    w = 1.0 / z
    lhs = abs(z + 1.0 + w)
    rhs = min(
        1.0,
        abs(z * z * z + 2 * z * z + z + 1),
        abs(1 + w + 2 * w * w + w * w * w),
    )
    return lhs >= rhs


# ---------------------------------------------------------------------------
# family roots through the two-power structure

_CYCLOTOMIC = LaurentPoly({0: 1, 1: 1, 2: 1})
_CYCLOTOMIC_ROOTS = (
    complex(-0.5, -0.8660254037844386),
    complex(-0.5, 0.8660254037844386),
)


def _nonconstant_gcd(p: LaurentPoly, q: LaurentPoly) -> bool:
    """Whether two Laurent polynomials share a nonunit factor (exact
    Euclid over the rationals)."""
    a = [Fraction(c) for c in p.dense_coeffs()[1]]
    b = [Fraction(c) for c in q.dense_coeffs()[1]]
    while b:
        r = a[:]
        while len(r) >= len(b):
            f = r[-1] / b[-1]
            off = len(r) - len(b)
            for i in range(len(b) - 1):
                r[off + i] -= f * b[i]
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        a, b = b, r
    return len(a) > 1


@lru_cache(maxsize=None)
def _power_tables(s: int, k: int, sign: str) -> tuple:
    """Evaluation tables for one family's power-sum structure.

    Returns (parts, has_cyclotomic): dense float coefficients with their
    leading exponents, plus derivative rows, for lambda1, lambda2,
    lambda1 / c and sigma / c, where c is the cyclotomic z^2 + z + 1 when
    it divides lambda1 (it always divides sigma) and the constant 1
    otherwise.  Factoring c out matters because its roots are zeros of
    both power terms at once: the polynomial vanishes there without any
    cancellation between the terms, which no residual built on their
    competition can certify.  The lambdas have small integer
    coefficients, so all of this evaluates to full precision.

    The two lambdas sharing a factor of their own would put roots of the
    family outside every tool here, so that case is refused loudly (it
    does not happen for any cell this module is asked about).
    """
    l1, l2 = _limit_terms(s, k, sign)
    if _nonconstant_gcd(l1, l2):
        raise YamadaError(
            f"the two power terms for (s, k) = ({s}, {k}) share a factor;"
            " the family root structure is degenerate there"
        )
    try:
        l1_red = exact_div(l1, _CYCLOTOMIC)
        has_cyc = True
    except YamadaError:
        l1_red = l1
        has_cyc = False
    sig_red = exact_div(sigma(), _CYCLOTOMIC) if has_cyc else sigma()
    parts = []
    for p in (l1, l2, l1_red, sig_red):
        lo, cs = p.dense_coeffs()
        c = np.array([float(x) for x in cs], dtype=float)
        parts.append((lo, c, lo - 1, c * (lo + np.arange(len(c)))))
    return tuple(parts), has_cyc


@lru_cache(maxsize=None)
def _exact_tables(s: int, k: int, sign: str) -> tuple:
    """The same four parts as _power_tables, with the integer coefficient
    rows kept exact for high precision work."""
    l1, l2 = _limit_terms(s, k, sign)
    has_cyc = _power_tables(s, k, sign)[1]
    l1_red = exact_div(l1, _CYCLOTOMIC) if has_cyc else l1
    sig_red = exact_div(sigma(), _CYCLOTOMIC) if has_cyc else sigma()
    parts = []
    for p in (l1, l2, l1_red, sig_red):
        lo, cs = p.dense_coeffs()
        dcs = tuple(c * (lo + i) for i, c in enumerate(cs))
        parts.append((lo, tuple(cs), lo - 1, dcs))
    return tuple(parts)


_REFINE_ABOVE = 1e-10


def _refine_mp(
    n: int,
    s: int,
    k: int,
    sign: str,
    flagged: np.ndarray,
    frozen: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Aberth refinement of a few flagged points at 240-bit precision.

    Where the two power terms have near-coincident zeros (the tightest
    pair over the working grid sits 1.2e-5 apart), their values at a
    family root fall so far below their own coefficient scale that the
    double-precision residual floors around 1e-7 regardless of how good
    the point is.  The points are fine; the certificate needs more bits.
    This refines just the flagged points against the exact integer
    tables, with the rest of the configuration entering the repulsion
    sum frozen, then rounds each result back to a double and reports the
    residual evaluated in high precision at the rounded point, so the
    record stays an honest statement about the root actually returned.
    """
    parts = _exact_tables(s, k, sign)

    def ev(part, z):
        lo, cs, dlo, dcs = part
        p = mpmath.mpc(0)
        for c in reversed(cs):
            p = p * z + c
        q = mpmath.mpc(0)
        for c in reversed(dcs):
            q = q * z + c
        return p * z**lo, q * z**dlo

    def terms(z):
        a1, d1 = ev(parts[0], z)
        a2, d2 = ev(parts[1], z)
        a1c, d1c = ev(parts[2], z)
        a2s, d2s = ev(parts[3], z)
        b1 = a1 ** (n - 1) * a1c
        b2 = a2s * a2**n
        h1 = (n - 1) * d1 / a1 + d1c / a1c
        h2 = d2s / a2s + n * d2 / a2
        return b1, b2, b1 * h1 + b2 * h2

    with mpmath.mp.workprec(240):
        zs = [mpmath.mpc(w) for w in flagged]
        others = [mpmath.mpc(w) for w in frozen]
        target = mpmath.mpf(10) ** -30
        for _ in range(40):
            vals = [terms(z) for z in zs]
            worst = max(
                abs(b1 + b2) / (abs(b1) + abs(b2)) for b1, b2, _ in vals
            )
            if worst < target:
                break
            news = []
            for i, (z, (b1, b2, dq)) in enumerate(zip(zs, vals)):
                rep = mpmath.mpc(0)
                for j, w in enumerate(zs):
                    if j != i:
                        rep += 1 / (z - w)
                for w in others:
                    rep += 1 / (z - w)
                step = (b1 + b2) / dq
                news.append(z - step / (1 - step * rep))
            zs = news
        out = np.empty(len(zs), dtype=complex)
        res = np.empty(len(zs), dtype=float)
        for i, z in enumerate(zs):
            zd = complex(z)
            b1, b2, _ = terms(mpmath.mpc(zd))
            out[i] = zd
            res[i] = float(abs(b1 + b2) / (abs(b1) + abs(b2)))
    return out, res


def _family_ratio(
    n: int, tables: tuple, lo: int, z: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Residual and Newton ratio for the reduced family polynomial at z.

    The working polynomial is Q = lambda1^(n-1) (lambda1/c)
    + (sigma/c) lambda2^n, the family member with any shared cyclotomic
    factor c stripped (c = 1 reduces this to the plain power sum).  Both
    terms are formed in log space, then rescaled by the larger one:
    with T_i = exp(t_i - max), a root is T1 + T2 = 0, the residual
    |T1 + T2| / (|T1| + |T2|) measures the value against the scale the
    evaluation actually carries, and the Newton correction is
    (T1 + T2) / (T1 h1 + T2 h2) with h_i the term's log derivative.
    Nothing here can overflow: the rescaled terms have modulus at most 1.

    The family's exponents are all negative, so as a function it also
    vanishes at infinity, and plain Newton happily chases that spurious
    zero outward.  Shifting the logarithmic derivative by lo/z (lo is the
    lowest exponent of the reduced dense polynomial) turns the target
    into the dense degree-d form, whose far field pulls strays back in
    with steps of z/d.
    """
    (p1, p2, p1c, p2s), _ = tables
    pv = np.polynomial.polynomial.polyval
    a1 = pv(z, p1[1]) * z ** p1[0]
    a2 = pv(z, p2[1]) * z ** p2[0]
    a1c = pv(z, p1c[1]) * z ** p1c[0]
    a2s = pv(z, p2s[1]) * z ** p2s[0]
    d1 = pv(z, p1[3]) * z ** p1[2]
    d2 = pv(z, p2[3]) * z ** p2[2]
    d1c = pv(z, p1c[3]) * z ** p1c[2]
    d2s = pv(z, p2s[3]) * z ** p2s[2]
    if n == 1:
        t1 = np.log(a1c)
        h1 = d1c / a1c
    else:
        t1 = (n - 1) * np.log(a1) + np.log(a1c)
        h1 = (n - 1) * d1 / a1 + d1c / a1c
    t2 = np.log(a2s) + n * np.log(a2)
    h2 = d2s / a2s + n * d2 / a2
    m = np.maximum(t1.real, t2.real)
    dead = ~np.isfinite(m)
    T1 = np.exp(t1 - m)
    T2 = np.exp(t2 - m)
    res = np.abs(T1 + T2) / (np.abs(T1) + np.abs(T2))
    ratio = (T1 + T2) / (T1 * h1 + T2 * h2)
    ratio = ratio * z / (z - lo * ratio)
    res = np.where(dead, 0.0, res)
    ratio = np.where(dead, 0.0, ratio)
    return res, ratio


def _family_aberth(
    n: int,
    tables: tuple,
    lo: int,
    z: np.ndarray,
    max_iter: int,
    chunk: int = 512,
) -> tuple[np.ndarray, np.ndarray]:
    """Aberth-Ehrlich iteration on the structured evaluation, with the
    same per-point freezing and best-configuration fallback as the dense
    version.  Returns the points and their residuals."""
    d = len(z)
    freeze_tol = 100.0 * d * np.finfo(float).eps
    best = z.copy()
    best_score = math.inf
    with np.errstate(all="ignore"):
        for it in range(max_iter):
            res, ratio = _family_ratio(n, tables, lo, z)
            score = float(np.max(res))
            if score < best_score:
                best_score = score
                best = z.copy()
            idx = np.nonzero(res > freeze_tol)[0]
            if len(idx) == 0:
                return z, res
            rep = np.empty(len(idx), dtype=complex)
            for a in range(0, len(idx), chunk):
                sub = idx[a : a + chunk]
                blk = z[sub, None] - z[None, :]
                blk[np.arange(len(sub)), sub] = np.inf
                rep[a : a + chunk] = (1.0 / blk).sum(axis=1)
            step = ratio[idx] / (1.0 - ratio[idx] * rep)
            bad = ~np.isfinite(step)
            if bad.any():
                step[bad] = 0.1 * (1.0 + np.abs(z[idx[bad]])) * np.exp(
                    2j * math.pi * _GOLDEN * (idx[bad] + it + 1)
                )
            z[idx] = z[idx] - step
        res, _ = _family_ratio(n, tables, lo, z)
        if float(np.max(res)) > best_score:
            z = best
            res, _ = _family_ratio(n, tables, lo, z)
    return z, res


def _crowded(z: np.ndarray, spacing_factor: float = 0.1) -> set[int]:
    """Indices of roots with a suspiciously close neighbor.

    A double-precision solve localizes a simple root to far better than
    the typical spacing 1/d between the d roots, but when two roots sit
    orders of magnitude closer than that, the evaluation noise blurs
    them into one blob and the returned points can land anywhere inside
    it even though their residuals look immaculate.  Both members of
    any pair closer than spacing_factor/d are flagged for the
    high-precision pass, which resolves them cleanly.
    """
    d = len(z)
    if d < 2:
        return set()
    thresh = spacing_factor / d
    order = np.argsort(z.real)
    zs = z[order]
    out: set[int] = set()
    for i in range(d - 1):
        for j in range(i + 1, d):
            if zs[j].real - zs[i].real > thresh:
                break
            if abs(zs[j] - zs[i]) < thresh:
                out.add(int(order[i]))
                out.add(int(order[j]))
    return out


def _family_roots_full(
    n: int,
    s: int,
    k: int,
    sign: str = "+",
    tol: float | None = 1e-9,
    degree_cap: int | None = 4000,
    max_iter: int = 400,
    polish_rounds: int = 3,
) -> tuple[list[complex], list[float], int]:
    """All roots of one family member with structured residuals.

    Any cyclotomic factor shared by the two power terms is divided out
    exactly first; its roots are known in closed form and come back with
    residual zero (they are exact roots, placed to double precision).
    The exact integer coefficients of the reduced polynomial fix the
    degree and the starting circles (their magnitudes are taken in log
    form, since they overflow floats long before the caps do); every
    evaluation afterwards goes through the power-sum form, which stays
    conditioned at any n.
    """
    p = family_polynomial(n, s, k, sign, degree_cap=degree_cap)
    degree = len(p.dense_coeffs()[1]) - 1
    tables = _power_tables(s, k, sign)
    exact: list[complex] = []
    if tables[1]:
        p = exact_div(p, _CYCLOTOMIC)
        exact = list(_CYCLOTOMIC_ROOTS)
    lo, coeffs = p.dense_coeffs()
    d = len(coeffs) - 1
    if d == 0:
        z = np.empty(0, dtype=complex)
        res = np.empty(0, dtype=float)
    elif d == 1:
        z = np.array([complex(Fraction(-coeffs[0], coeffs[1]))])
        with np.errstate(all="ignore"):
            res, _ = _family_ratio(n, tables, lo, z)
    else:
        z = _initial_points(
            [-math.inf if c == 0 else _log_abs(c) for c in coeffs]
        )
        z, _ = _family_aberth(n, tables, lo, z, max_iter)
        with np.errstate(all="ignore"):
            res, ratio = _family_ratio(n, tables, lo, z)
            for _ in range(polish_rounds):
                z2 = z - ratio
                r2, ratio2 = _family_ratio(n, tables, lo, z2)
                better = r2 < res
                z = np.where(better, z2, z)
                res = np.where(better, r2, res)
                ratio = np.where(better, ratio2, ratio)
    shaky = set(np.nonzero(res > _REFINE_ABOVE)[0].tolist())
    shaky |= _crowded(z)
    if shaky:
        flagged = np.array(sorted(shaky))
        keep = np.ones(len(z), dtype=bool)
        keep[flagged] = False
        z[flagged], res[flagged] = _refine_mp(
            n, s, k, sign, z[flagged], z[keep]
        )
    pool = [(complex(a), float(b)) for a, b in zip(z, res)]
    pool.extend((root, 0.0) for root in exact)
    pool.sort(key=lambda t: (cmath.phase(t[0]), abs(t[0]), t[0].real, t[0].imag))
    roots = [t[0] for t in pool]
    residuals = [t[1] for t in pool]
    if tol is not None and any(r > tol for r in residuals):
        worst = max(residuals)
        raise NoConvergence(
            f"worst residual {worst:.3e} above tolerance {tol:.3e}",
            roots,
            residuals,
        )
    return roots, residuals, degree


# ---------------------------------------------------------------------------
# grid scans and witness search

def _cell_records(
    n: int,
    s: int,
    k: int,
    sign: str,
    tol: float | None,
    degree_cap: int | None,
    cache: dict | None,
) -> tuple[RootRecord, ...]:
    """Root records of one family member, cached by (n, s, k, sign).

    Negative-family records are the exact reciprocals of the positive
    ones (mirror identity), with the residual carried over: E for the
    mirrored member at 1/z is the same number as E at z, so the
    structured residual is too.
    """
    key = (n, s, k, sign)
    if cache is not None and key in cache:
        return cache[key]
    if sign == "-":
        plus = _cell_records(n, s, k, "+", tol, degree_cap, cache)
        recs = tuple(
            sorted(
                (
                    RootRecord(
                        root=1.0 / r.root,
                        n=n,
                        s=s,
                        k=k,
                        sign="-",
                        residual=r.residual,
                        degree=r.degree,
                    )
                    for r in plus
                ),
                key=lambda r: (cmath.phase(r.root), abs(r.root)),
            )
        )
    else:
        try:
            roots, residuals, degree = _family_roots_full(
                n, s, k, "+", tol, degree_cap
            )
        except NoConvergence as err:
            roots, residuals = err.roots, err.residuals
            degree = len(roots)
        recs = tuple(
            RootRecord(
                root=root, n=n, s=s, k=k, sign="+", residual=res, degree=degree
            )
            for root, res in zip(roots, residuals)
        )
    if cache is not None:
        cache[key] = recs
    return recs


def _witness_plan(caps: SearchCaps, sign: str) -> list[tuple[int, int, int]]:
    """Visit order for the witness search: coarse shells first.

    The capped box is peeled along its halving chain (caps, half caps,
    half of that, down to the unit box) and cells are grouped by the
    smallest box of the chain that contains them, cheapest group first.
    Within a group the order is k, then s, then n, all ascending.  The
    point of the shells is the doubling contract: halving doubled caps
    gives back the original caps, so the doubled plan is the original
    plan plus one outer shell appended at the end.  A search that found
    a witness keeps finding the same one when the caps are doubled, and
    a search that failed only ever gets closer.
    """
    chain = [caps]
    while True:
        prev = chain[-1]
        nxt = SearchCaps(
            max(1, prev.k_max // 2),
            max(1, prev.s_max // 2),
            max(1, prev.n_max // 2),
            max(1, prev.degree_cap // 2),
        )
        if nxt == prev:
            break
        chain.append(nxt)
    chain.reverse()

    def depth(n: int, s: int, k: int, deg: int) -> int:
        for i, box in enumerate(chain):
            if (
                k <= box.k_max
                and s <= box.s_max
                and n <= box.n_max
                and deg <= box.degree_cap
            ):
                return i
        raise AssertionError("cell escaped its own caps")

    cells: list[tuple[int, int, int, int]] = []
    for k in range(1, caps.k_max + 1):
        for s in range(1, caps.s_max + 1):
            for n in range(1, caps.n_max + 1):
                deg = family_degree_estimate(n, s, k, sign)
                if deg > caps.degree_cap:
                    break
                cells.append((depth(n, s, k, deg), n, s, k))
    cells.sort(key=lambda c: c[0])  # stable: keeps k,s,n order inside a shell
    return [(n, s, k) for _, n, s, k in cells]


def density_witness(
    z0: complex,
    eps: float,
    caps: SearchCaps = SearchCaps(),
    tol: float = 1e-9,
    cache: dict | None = None,
    jobs: int = 1,
):
    """Hunt for a family root within eps of the target z0.

    Targets with |z0| <= 1 search the positive family, the rest the
    negative one (its roots are the reciprocal cloud).  Cells are
    visited in the shell order of _witness_plan, so cheap certificates
    win and doubling the caps never degrades the answer; the first cell
    containing a root inside the eps disc returns a Witness for the
    closest such root.  Cells whose degree estimate exceeds the degree
    cap are outside the search space.  If the caps run out, NotFound
    reports the closest root seen anywhere in the grid.

    jobs > 1 precomputes upcoming cells in worker processes while the
    results are still consumed in visit order, so the outcome is the
    same one the sequential search returns (later cells may be solved
    and discarded once a witness shows up).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    mod = abs(z0)
    if not 0.05 <= mod <= 20.0:
        raise ValueError(
            "targets must satisfy 0.05 <= |z0| <= 20; the family scaling"
            " degenerates at the origin"
        )
    sign = "+" if mod <= 1.0 else "-"
    if cache is None:
        cache = {}
    plan = _witness_plan(caps, sign)
    best: RootRecord | None = None
    best_d = math.inf

    def check(recs):
        nonlocal best, best_d
        hit: RootRecord | None = None
        hit_d = math.inf
        for rec in recs:
            dist = abs(rec.root - z0)
            if dist < best_d:
                best, best_d = rec, dist
            if dist < eps and dist < hit_d:
                hit, hit_d = rec, dist
        return hit, hit_d

    if jobs > 1 and len(plan) > 1:
        span = 2 * jobs
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for lo in range(0, len(plan), span):
                window = plan[lo : lo + span]
                fresh = [c for c in window if c + (sign,) not in cache]
                tasks = [
                    (n, s, k, (sign,), tol, caps.degree_cap)
                    for n, s, k in fresh
                ]
                for cell, recs in zip(fresh, pool.map(_scan_cell, tasks)):
                    cache[cell + (sign,)] = tuple(recs)
                for cell in window:
                    hit, hit_d = check(cache[cell + (sign,)])
                    if hit is not None:
                        return Witness(
                            target=z0, epsilon=eps, found=hit, distance=hit_d
                        )
    else:
        for n, s, k in plan:
            hit, hit_d = check(
                _cell_records(n, s, k, sign, tol, caps.degree_cap, cache)
            )
            if hit is not None:
                return Witness(
                    target=z0, epsilon=eps, found=hit, distance=hit_d
                )
    return NotFound(
        target=z0, epsilon=eps, closest=best, distance=best_d, caps=caps
    )


def _scan_cell(args) -> list[RootRecord]:
    n, s, k, signs, tol, degree_cap = args
    local: dict = {}
    out: list[RootRecord] = []
    for sign in signs:
        out.extend(_cell_records(n, s, k, sign, tol, degree_cap, local))
    return out


def scan_family(
    ns: Iterable[int],
    ss: Iterable[int],
    ks: Iterable[int],
    signs: Sequence[str] = ("+",),
    tol: float | None = 1e-9,
    degree_cap: int | None = 4000,
    jobs: int = 1,
    cache: dict | None = None,
) -> list[RootRecord]:
    """Root records for every family member in the grid, sorted by
    (n, s, k, sign, root angle).  jobs > 1 fans the cells out over
    processes; both signs of a cell stay in one task so the mirror pair
    shares its root computation."""
    for sign in signs:
        if sign not in ("+", "-"):
            raise ValueError("signs must be '+' or '-'")
    cells = sorted(
        {(n, s, k) for n in ns for s in ss for k in ks}
    )
    ordered_signs = tuple(sorted(set(signs)))
    records: list[RootRecord] = []
    if jobs > 1 and len(cells) > 1:
        tasks = [
            (n, s, k, ordered_signs, tol, degree_cap) for n, s, k in cells
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for (n, s, k), chunk in zip(cells, pool.map(_scan_cell, tasks)):
                records.extend(chunk)
                if cache is not None:
                    for sign in ordered_signs:
                        cache[(n, s, k, sign)] = tuple(
                            r for r in chunk if r.sign == sign
                        )
    else:
        if cache is None:
            cache = {}
        for n, s, k in cells:
            for sign in ordered_signs:
                records.extend(
                    _cell_records(n, s, k, sign, tol, degree_cap, cache)
                )
    records.sort(
        key=lambda r: (
            r.n,
            r.s,
            r.k,
            r.sign,
            cmath.phase(r.root),
            abs(r.root),
        )
    )
    return records


# ---------------------------------------------------------------------------
# serialization

def record_to_dict(rec: RootRecord) -> dict:
    return {
        "n": rec.n,
        "s": rec.s,
        "k": rec.k,
        "sign": rec.sign,
        "re": rec.root.real,
        "im": rec.root.imag,
        "residual": rec.residual,
        "degree": rec.degree,
    }


def records_to_csv(records: Sequence[RootRecord]) -> str:
    lines = ["n,s,k,sign,re,im,residual,degree"]
    for r in records:
        lines.append(
            f"{r.n},{r.s},{r.k},{r.sign},{r.root.real!r},{r.root.imag!r},"
            f"{r.residual!r},{r.degree}"
        )
    return "\n".join(lines) + "\n"


def records_to_svg(records: Sequence[RootRecord], size: int = 640) -> str:
    """Static scatter of the root cloud with the unit circle overlaid."""
    half = size / 2.0
    rmax = 1.0
    for r in records:
        rmax = max(rmax, abs(r.root))
    scale = (half - 10.0) / rmax
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}"'
        f' height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<line x1="0" y1="{half:.1f}" x2="{size}" y2="{half:.1f}"'
        ' stroke="#dddddd" stroke-width="1"/>',
        f'<line x1="{half:.1f}" y1="0" x2="{half:.1f}" y2="{size}"'
        ' stroke="#dddddd" stroke-width="1"/>',
        f'<circle cx="{half:.1f}" cy="{half:.1f}" r="{scale:.2f}"'
        ' fill="none" stroke="#999999" stroke-width="1"/>',
    ]
    for r in records:
        cx = half + r.root.real * scale
        cy = half - r.root.imag * scale
        color = "#1f6feb" if r.sign == "+" else "#d29922"
        parts.append(
            f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="1.8" fill="{color}"'
            ' fill-opacity="0.7"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def witness_to_dict(result) -> dict:
    """JSON-ready form of a density search outcome, either branch."""
    if isinstance(result, Witness):
        return {
            "found": True,
            "target": [result.target.real, result.target.imag],
            "epsilon": result.epsilon,
            "distance": result.distance,
            "root": record_to_dict(result.found),
        }
    return {
        "found": False,
        "target": [result.target.real, result.target.imag],
        "epsilon": result.epsilon,
        "distance": result.distance,
        "closest": (
            record_to_dict(result.closest) if result.closest else None
        ),
        "caps": {
            "k_max": result.caps.k_max,
            "s_max": result.caps.s_max,
            "n_max": result.caps.n_max,
            "degree_cap": result.caps.degree_cap,
        },
    }
