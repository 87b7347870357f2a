"""Special functions on the complex plane

Gamma, log-Gamma, Beta, digamma, upper incomplete gamma, Riemann zeta and the
Gauss hypergeometric function 2F1 for real argument, plus independent
quadrature oracles used by tests and the `oracle` CLI command.

Every kernel takes an optional `ctx` (see precision.get_context); the default
is the hardware-double backend.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Tuple

import mpmath
import numpy as np
from scipy import integrate, special

from errors import ConvergenceError, DomainError, PoleError
from precision import DOUBLE_DOUBLE, check_finite, compensated_sum, cpow, get_context, is_double, significant_digits

logger = logging.getLogger(__name__)

FP = mpmath.fp

# Lanczos kernel, g = 7, nine terms
_LANCZOS_G = 7
_LANCZOS = (0.99999999999980993, 676.5203681218851, -1259.1392167224028,
            771.32342877765313, -176.61502916214059, 12.507343278686905,
            -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7)

HYP_CAP = 200000
HYP_MAX_X = 0.95
SAFETY = 10

# peak term over result beyond which a double-precision series is re-summed at 106 bits
CANCELLATION_LIMIT = 1e3

# |1 - 2^(1-s)| below which zeta leaves the eta series for Euler-Maclaurin
ETA_FACTOR_FLOOR = 0.1


@dataclass(frozen=True)
class Hyp2F1Args:
    """Parameters of F(a, b; c; x) with real x < 1"""
    a: complex
    b: complex
    c: complex
    x: float


@dataclass(frozen=True)
class EvalResult:
    value: complex
    err_estimate: float
    terms_used: int


# ----------------------------------------------------------------------------
# Helpers
# ----------------------------------------------------------------------------

def _is_nonpositive_integer(ctx, z) -> bool:
    re, im = ctx.re(z), ctx.im(z)
    return im == 0 and re <= 0 and re == int(re)


def _tolerance(ctx):
    return ctx.eps * 4


@lru_cache(maxsize=None)
def _bernoulli_even(count: int) -> Tuple[Fraction, ...]:
    """B_2, B_4, ..., B_{2*count} as exact fractions"""
    return tuple(Fraction(*mpmath.bernfrac(2 * j)) for j in range(1, count + 1))


def _asymptotic_plan(ctx) -> Tuple[int, int]:
    """(shift threshold, number of Bernoulli terms) for the working precision"""
    if is_double(ctx):
        return 15, 12
    return 40, 24


def _frac(ctx, q: Fraction):
    return ctx.mpf(q.numerator) / q.denominator


# ----------------------------------------------------------------------------
# Gamma family
# ----------------------------------------------------------------------------

def _lanczos_gamma(ctx, z):
    z = z - 1
    x = ctx.mpf(_LANCZOS[0])
    for i in range(1, len(_LANCZOS)):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return ctx.sqrt(2 * ctx.pi) * ctx.exp((z + 0.5) * ctx.log(t) - t) * x


def gamma(z, ctx=FP):
    """Complex Gamma function

    Lanczos kernel at double precision, exp(log_gamma) at extended precision,
    reflection for Re z < 1/2.
    """
    z = ctx.convert(z)
    if _is_nonpositive_integer(ctx, z):
        raise PoleError(f"Gamma has a pole at z = {z}")
    if ctx.re(z) < 0.5:
        value = ctx.pi / (ctx.sin(ctx.pi * z) * gamma(1 - z, ctx))
    elif is_double(ctx):
        value = _lanczos_gamma(ctx, z)
    else:
        value = ctx.exp(log_gamma(z, ctx))
    if ctx.im(z) == 0:
        value = ctx.re(value)
    return check_finite(ctx, value, "gamma")


def log_gamma(z, ctx=FP):
    """Principal log-Gamma for Re z > 0 by shifted Stirling series"""
    z = ctx.convert(z)
    if ctx.re(z) <= 0:
        raise DomainError(f"log_gamma requires Re z > 0, got {z}")
    threshold, terms = _asymptotic_plan(ctx)
    shift = ctx.mpf(0)
    while abs(z) < threshold:
        shift += ctx.log(z)
        z = z + 1
    series = (z - 0.5) * ctx.log(z) - z + ctx.log(2 * ctx.pi) / 2
    zinv = 1 / z
    zinv2 = zinv * zinv
    power = zinv
    for j, b in enumerate(_bernoulli_even(terms), start=1):
        series += _frac(ctx, b) / (2 * j * (2 * j - 1)) * power
        power *= zinv2
    return series - shift


def beta(z1, z2, ctx=FP):
    """B(z1, z2) = Gamma(z1) Gamma(z2) / Gamma(z1 + z2)"""
    z1, z2 = ctx.convert(z1), ctx.convert(z2)
    for z in (z1, z2, z1 + z2):
        if _is_nonpositive_integer(ctx, z):
            raise PoleError(f"Beta argument {z} is a non-positive integer")
    if ctx.re(z1) > 0 and ctx.re(z2) > 0:
        return ctx.exp(log_gamma(z1, ctx) + log_gamma(z2, ctx) - log_gamma(z1 + z2, ctx))
    return gamma(z1, ctx) * gamma(z2, ctx) / gamma(z1 + z2, ctx)


def gamma_ratio(num, den, ctx=FP):
    """Gamma(num) / Gamma(den) for Re num, Re den > 0 without overflow"""
    return ctx.exp(log_gamma(num, ctx) - log_gamma(den, ctx))


def digamma(z, ctx=FP):
    """psi(z) by upward recurrence and the asymptotic series"""
    z = ctx.convert(z)
    if _is_nonpositive_integer(ctx, z):
        raise PoleError(f"digamma has a pole at z = {z}")
    if ctx.re(z) < 0.5:
        return digamma(1 - z, ctx) - ctx.pi * ctx.cos(ctx.pi * z) / ctx.sin(ctx.pi * z)
    threshold, terms = _asymptotic_plan(ctx)
    acc = ctx.mpf(0)
    while abs(z) < threshold:
        acc -= 1 / z
        z = z + 1
    zinv2 = 1 / (z * z)
    power = zinv2
    value = ctx.log(z) - 1 / (2 * z)
    for j, b in enumerate(_bernoulli_even(terms), start=1):
        value -= _frac(ctx, b) / (2 * j) * power
        power *= zinv2
    return value + acc


def upper_incomplete_gamma(s, x, ctx=FP, cap: int = 5000):
    """Gamma(s, x) for real x > 0

    Continued fraction for x > Re s + 1, otherwise Gamma(s) minus the lower
    series. Nonpositive-integer s always takes the continued fraction.
    """
    s = ctx.convert(s)
    x = ctx.mpf(x)
    if x <= 0:
        raise DomainError(f"upper_incomplete_gamma requires x > 0, got {x}")
    if x > ctx.re(s) + 1 or _is_nonpositive_integer(ctx, s):
        value = _incgamma_fraction(ctx, s, x, cap)
    else:
        value = gamma(s, ctx) - _lower_incgamma_series(ctx, s, x, cap)
    return check_finite(ctx, value, "upper_incomplete_gamma")


def _lower_incgamma_series(ctx, s, x, cap):
    tol = _tolerance(ctx)
    term = 1 / s
    total = term
    for j in range(1, cap):
        term *= x / (s + j)
        total += term
        if abs(term) < tol * abs(total):
            return ctx.exp(s * ctx.log(x) - x) * total
    raise ConvergenceError(f"lower incomplete gamma series did not converge for s={s}, x={x}")


def _incgamma_fraction(ctx, s, x, cap):
    # modified Lentz
    tiny = ctx.mpf(10) ** (-300 if is_double(ctx) else -600)
    tol = _tolerance(ctx)
    b = x + 1 - s
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, cap):
        an = -i * (i - s)
        b += 2
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < tol:
            return ctx.exp(s * ctx.log(x) - x) * h
    raise ConvergenceError(f"incomplete gamma continued fraction stalled for s={s}, x={x}")


# ----------------------------------------------------------------------------
# Riemann zeta
# ----------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _borwein_weights(n: int) -> Tuple[Fraction, ...]:
    """d_0..d_n of the Chebyshev-accelerated eta series (exact)"""
    weights = []
    partial = Fraction(0)
    for i in range(n + 1):
        partial += Fraction(math.factorial(n + i - 1) * 4 ** i,
                            math.factorial(n - i) * math.factorial(2 * i))
        weights.append(n * partial)
    return tuple(weights)


def zeta(s, ctx=FP):
    """Riemann zeta on C minus {1}

    Accelerated alternating series for Re s > 0, functional equation otherwise.
    Near the zeros of 1 - 2^(1-s) on Re s = 1 the Euler-Maclaurin sum takes over.
    """
    s = ctx.convert(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s == 0:
        return ctx.mpf(-0.5)
    if ctx.re(s) <= 0:
        # zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1-s) zeta(1-s)
        return (cpow(ctx, 2, s) * cpow(ctx, ctx.pi, s - 1) * ctx.sin(ctx.pi * s / 2)
                * gamma(1 - s, ctx) * zeta(1 - s, ctx))
    eta_factor = 1 - cpow(ctx, 2, 1 - s)
    if abs(eta_factor) < ETA_FACTOR_FLOOR:
        value = _zeta_euler_maclaurin(ctx, s)
    else:
        value = _zeta_eta_series(ctx, s, eta_factor)
    if ctx.im(s) == 0:
        value = ctx.re(value)
    return check_finite(ctx, value, "zeta")


def _zeta_euler_maclaurin(ctx, s):
    """sum_{j<N} j^-s + N^(1-s)/(s-1) + N^-s/2 + sum_i B_2i/(2i)! (s)_(2i-1) N^(1-s-2i)"""
    _, count = _asymptotic_plan(ctx)
    cutoff = int(abs(s)) + 3 * count
    terms = [cpow(ctx, j, -s) for j in range(1, cutoff)]
    terms.append(cpow(ctx, cutoff, 1 - s) / (s - 1))
    terms.append(cpow(ctx, cutoff, -s) / 2)
    rising = s
    power = cpow(ctx, cutoff, -s - 1)
    for i, b in enumerate(_bernoulli_even(count), start=1):
        terms.append(_frac(ctx, b / math.factorial(2 * i)) * rising * power)
        rising *= (s + 2 * i - 1) * (s + 2 * i)
        power /= cutoff * cutoff
    logger.debug("zeta(%s) by Euler-Maclaurin, N=%d, %d corrections", s, cutoff, count)
    return compensated_sum(ctx, terms)


def _zeta_eta_series(ctx, s, eta_factor):
    height = float(abs(ctx.im(s)))
    n = int(math.ceil((significant_digits(ctx) + 0.7 * height + 3) / 0.76))
    d = _borwein_weights(n)
    dn = d[n]
    terms = []
    for k in range(n):
        weight = _frac(ctx, d[k] - dn)
        term = weight * cpow(ctx, k + 1, -s)
        terms.append(-term if k % 2 else term)
    total = compensated_sum(ctx, terms)
    return -total / (_frac(ctx, dn) * eta_factor)


# ----------------------------------------------------------------------------
# Gauss hypergeometric function
# ----------------------------------------------------------------------------

def _check_hyp_args(ctx, args: Hyp2F1Args):
    if _is_nonpositive_integer(ctx, ctx.convert(args.c)):
        raise DomainError(f"2F1 lower parameter c = {args.c} is a non-positive integer")
    if args.x > HYP_MAX_X:
        raise DomainError(f"2F1 argument x = {args.x} outside (-inf, {HYP_MAX_X}]")


def _terminating_degree(ctx, a, b):
    degrees = [int(-ctx.re(p)) for p in (a, b) if _is_nonpositive_integer(ctx, p)]
    return min(degrees) if degrees else None


def _settling_index(a, b, c) -> int:
    """Index past which the term ratio of the Gauss series is monotone"""
    return int(max(abs(a), abs(b), abs(c))) + 2


def _extended_args(ctx, *values):
    """Move double-precision values into the 106-bit context"""
    ext = get_context(DOUBLE_DOUBLE)
    return ext, [ext.convert(complex(v)) for v in values]


def _gauss_series(ctx, a, b, c, x, cap):
    """Sum the Gauss series at real x with |x| < 1

    The error estimate covers the truncated tail and the rounding carried by
    the largest term. In double precision a sum that cancels by more than
    CANCELLATION_LIMIT is redone at 106 bits.
    """
    tol = _tolerance(ctx)
    degree = _terminating_degree(ctx, a, b)
    settle = _settling_index(a, b, c)
    term = ctx.mpc(1)
    terms = [term]
    running = term
    peak = 1.0
    tail = 0.0
    j = 0
    while True:
        if degree is not None and j >= degree:
            break
        ratio = (a + j) * (b + j) / ((c + j) * (j + 1))
        term = term * ratio * x
        j += 1
        terms.append(term)
        running += term
        peak = max(peak, float(abs(term)))
        if j >= cap:
            raise ConvergenceError(f"2F1 series exceeded {cap} terms (a={a}, b={b}, c={c}, x={x})")
        rho = abs(ratio * x)
        if degree is None and j > settle and rho < 1 and abs(term) * rho / (1 - rho) <= tol * abs(running):
            tail = float(abs(term)) * SAFETY
            break
    value = compensated_sum(ctx, terms)
    if is_double(ctx) and peak > CANCELLATION_LIMIT * float(abs(value)):
        ext, (ea, eb, ec, ex) = _extended_args(ctx, a, b, c, x)
        logger.debug("2F1 series cancels by %.1e at (a=%s, b=%s, c=%s, x=%s), re-summing at %d bits",
                     peak / max(float(abs(value)), 1e-300), a, b, c, x, ext.prec)
        redone = _gauss_series(ext, ea, eb, ec, ext.re(ex), cap)
        return EvalResult(ctx.convert(complex(redone.value)), tail + float(ctx.eps) * abs(complex(redone.value)),
                          redone.terms_used)
    rounding = peak * float(ctx.eps) * (j + 1)
    return EvalResult(value, tail + rounding, j + 1)


def hyp2f1(args: Hyp2F1Args, ctx=FP, cap: int = HYP_CAP) -> EvalResult:
    """F(a, b; c; x) for real x <= 0.95

    Direct series on [0, 0.95], Pfaff transformation for x < 0, polynomial
    shortcut when a or b is a non-positive integer.
    """
    _check_hyp_args(ctx, args)
    a, b, c = ctx.convert(args.a), ctx.convert(args.b), ctx.convert(args.c)
    x = ctx.mpf(args.x)
    if x == 0:
        return EvalResult(ctx.mpc(1), 0.0, 1)
    if x > 0 or _terminating_degree(ctx, a, b) is not None:
        return _gauss_series(ctx, a, b, c, x, cap)
    w = x / (x - 1)
    # prefer the variant that terminates
    if _is_nonpositive_integer(ctx, c - a):
        inner = _gauss_series(ctx, c - a, b, c, w, cap)
        scale = cpow(ctx, 1 - x, -b)
    else:
        inner = _gauss_series(ctx, a, c - b, c, w, cap)
        scale = cpow(ctx, 1 - x, -a)
    return EvalResult(scale * inner.value, float(abs(scale)) * inner.err_estimate, inner.terms_used)


class _PochhammerTrack:
    """Factors of (p)_j with the zero factor skipped, and the running sum of 1/(p+i)"""

    def __init__(self, ctx, p):
        self.p = p
        self.harmonic = ctx.mpc(0)
        self.zero = False

    def advance(self, i):
        """Next surviving factor of the product"""
        factor = self.p + i
        if factor == 0:
            self.zero = True
            return 1
        self.harmonic += 1 / factor
        return factor


def _gauss_gradient(ctx, a, b, c, x, cap):
    """(dF/da, dF/db, dF/dc) by term-wise differentiation, |x| < 1

    The surviving part of each term is carried by the ratio recurrence of the
    Gauss series, so no Pochhammer product is ever formed on its own.
    """
    tol = _tolerance(ctx)
    ta, tb, tc = _PochhammerTrack(ctx, a), _PochhammerTrack(ctx, b), _PochhammerTrack(ctx, c)
    da, db, dc = [], [], []
    settle = _settling_index(a, b, c)
    base = ctx.mpc(1)
    running = ctx.mpf(0)
    peak = 0.0
    for j in range(1, cap):
        i = j - 1
        base = base * ta.advance(i) * tb.advance(i) / tc.advance(i) * x / j
        if not ta.zero and not tb.zero:
            ga, gb, gc = base * ta.harmonic, base * tb.harmonic, -base * tc.harmonic
        elif ta.zero and not tb.zero:
            ga, gb, gc = base, 0, 0
        elif tb.zero and not ta.zero:
            ga, gb, gc = 0, base, 0
        else:
            ga, gb, gc = 0, 0, 0
        da.append(ga)
        db.append(gb)
        dc.append(gc)
        size = abs(ga) + abs(gb) + abs(gc)
        running += size
        peak = max(peak, float(size))
        if j > settle:
            rho = abs((a + j) * (b + j) / ((c + j) * (j + 1)) * x)
            if rho < 1 and size * (1 + rho / (1 - rho)) <= tol * running:
                grad = (compensated_sum(ctx, da), compensated_sum(ctx, db), compensated_sum(ctx, dc))
                smallest = min(float(abs(g)) for g in grad if g != 0) if any(g != 0 for g in grad) else 0.0
                if is_double(ctx) and peak > CANCELLATION_LIMIT * max(smallest, 1.0):
                    ext, (ea, eb, ec, ex) = _extended_args(ctx, a, b, c, x)
                    logger.debug("2F1 gradient cancels at (a=%s, b=%s, c=%s, x=%s), re-summing at %d bits",
                                 a, b, c, x, ext.prec)
                    redone = _gauss_gradient(ext, ea, eb, ec, ext.re(ex), cap)
                    return tuple(ctx.convert(complex(g)) for g in redone)
                return grad
    raise ConvergenceError(f"2F1 gradient series exceeded {cap} terms (a={a}, b={b}, c={c}, x={x})")


def hyp2f1_param_grad(args: Hyp2F1Args, ctx=FP, cap: int = HYP_CAP):
    """Partial derivatives of F(a, b; c; x) in a, b and c

    Terms whose Pochhammer symbol contains exactly one vanishing factor
    contribute the product of the surviving factors.
    """
    _check_hyp_args(ctx, args)
    a, b, c = ctx.convert(args.a), ctx.convert(args.b), ctx.convert(args.c)
    x = ctx.mpf(args.x)
    if x == 0:
        zero = ctx.mpc(0)
        return zero, zero, zero
    if x > 0:
        return _gauss_gradient(ctx, a, b, c, x, cap)
    # F = (1-x)^(-a) G(a, c-b; c; w)
    w = x / (x - 1)
    scale = cpow(ctx, 1 - x, -a)
    g = _gauss_series(ctx, a, c - b, c, w, cap).value
    g1, g2, g3 = _gauss_gradient(ctx, a, c - b, c, w, cap)
    d_a = -ctx.log(1 - x) * scale * g + scale * g1
    d_b = -scale * g2
    d_c = scale * (g2 + g3)
    return d_a, d_b, d_c


def hyp2f1_euler_oracle(a, b, c, x: float) -> complex:
    """F(a, b; c; x) from the Euler integral, by adaptive quadrature

    Endpoint powers use the algebraic weight of QUADPACK, the imaginary parts
    of the exponents stay in the integrand.
    """
    a, b, c = complex(a), complex(b), complex(c)
    if not (c.real > b.real > 0):
        raise DomainError(f"Euler integral needs Re c > Re b > 0, got b={b}, c={c}")
    if x >= 1:
        raise DomainError(f"Euler integral needs x < 1, got {x}")
    if x == 0:
        return 1.0 + 0j
    alpha, beta_ = b.real - 1, (c - b).real - 1
    ia, ib = 1j * b.imag, 1j * (c - b).imag

    def integrand(t):
        t = min(max(t, 1e-300), 1.0 - 1e-16)
        return t ** ia * (1 - t) ** ib * (1 - x * t) ** (-a)

    opts = dict(weight="alg", wvar=(alpha, beta_), epsabs=0.0, epsrel=1e-12, limit=200)
    re, _ = integrate.quad(lambda t: integrand(t).real, 0.0, 1.0, **opts)
    im, _ = integrate.quad(lambda t: integrand(t).imag, 0.0, 1.0, **opts)
    norm = special.gamma(b) * special.gamma(c - b) / special.gamma(c)
    return complex(re, im) / norm


def lattice_sum_check(z: complex, k: int) -> float:
    """|sum_m (z+m)^-k - (-2 pi i)^k / Gamma(k) sum_m m^(k-1) e(mz)|"""
    z = complex(z)
    if k % 2 or k < 4:
        raise DomainError(f"lattice sum needs an even weight >= 4, got {k}")
    if z.imag <= 0:
        raise DomainError(f"lattice sum needs Im z > 0, got {z}")
    # tail of sum |m|^-k beyond M is below 2 M^(1-k)/(k-1)
    cutoff = int(math.ceil((1e-17 * (k - 1) / 2) ** (-1.0 / (k - 1)))) + 1
    m = np.arange(1, cutoff + 1, dtype=float)
    lhs_terms = np.concatenate(([z ** (-k)], (z + m) ** (-k), (z - m) ** (-k)))
    lhs = complex(math.fsum(lhs_terms.real), math.fsum(lhs_terms.imag))
    rhs_terms = []
    j = 1
    while True:
        term = j ** (k - 1) * np.exp(2j * np.pi * j * z)
        rhs_terms.append(term)
        if abs(term) < 1e-20 * abs(sum(rhs_terms)) and j > 2:
            break
        j += 1
    series = complex(math.fsum(t.real for t in rhs_terms), math.fsum(t.imag for t in rhs_terms))
    rhs = (-2j * math.pi) ** k / math.factorial(k - 1) * series
    residual = abs(lhs - rhs)
    logger.debug("lattice sum k=%d z=%s: %d lattice terms, %d Fourier terms, residual %.3e",
                 k, z, lhs_terms.size, j, residual)
    return residual
