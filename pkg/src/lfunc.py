"""L-values, Petersson norms and L(1, sym^2 f) for level-1 eigenforms"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from numpy.polynomial.legendre import leggauss

from errors import ConvergenceError, DomainError, RangeError
from modforms import Eigenform
from precision import compensated_sum, context_name, cpow
from specialfn import SAFETY, gamma, upper_incomplete_gamma

logger = logging.getLogger(__name__)

FP = mpmath.fp

ARC_START_ORDER = 8
ARC_TERMS = 48

PETERSSON_METHOD = "rectangle:incomplete-gamma+arc:gauss-legendre"
SYM2_METHOD = "rankin-selberg:petersson"


@dataclass(frozen=True)
class LValueResult:
    """Value at the point 1/2 + s"""
    s: complex
    value: complex
    err_estimate: float
    terms_used: int = 0


@dataclass(frozen=True)
class NormData:
    petersson_sq: float
    sym2_at_1: float
    petersson_method: str = PETERSSON_METHOD
    sym2_method: str = SYM2_METHOD


def _check_strip(f: Eigenform, s, ctx):
    if abs(ctx.re(s)) > f.weight / 2 - 1:
        raise DomainError(f"|Re s| must not exceed k/2 - 1 = {f.weight / 2 - 1}, got s = {s}")


def _mellin_piece(ctx, w, x):
    """Gamma(w, x) / x^w"""
    return upper_incomplete_gamma(w, x, ctx) * cpow(ctx, x, -w)


def completed_L(f: Eigenform, s, ctx=FP) -> LValueResult:
    """Lambda(1/2 + s) = (2 pi)^-(s + k/2) Gamma(s + k/2) L(1/2 + s, f)

    Summed as sum_n a(n) [Gamma(k/2 + s, 2 pi n)/(2 pi n)^(k/2 + s)
                          + i^k Gamma(k/2 - s, 2 pi n)/(2 pi n)^(k/2 - s)].
    """
    s = ctx.convert(s)
    _check_strip(f, s, ctx)
    half = ctx.mpf(f.weight) / 2
    sign = -1 if (f.weight // 2) % 2 else 1
    terms = []
    mass = ctx.mpf(0)
    for n in range(1, f.length + 1):
        x = 2 * ctx.pi * n
        a = ctx.mpf(f.coefficient(n))
        plus = _mellin_piece(ctx, half + s, x)
        minus = _mellin_piece(ctx, half - s, x)
        size = abs(a) * (abs(plus) + abs(minus))
        if n > 1 and size <= ctx.eps * mass:
            value = compensated_sum(ctx, terms)
            return LValueResult(complex(s), value, float(size) * SAFETY, n - 1)
        terms.append(a * plus + sign * a * minus)
        mass += size
    raise RangeError(f"coefficient table of length {f.length} too short for Lambda at s = {s}")


def L_value(f: Eigenform, s, ctx=FP) -> LValueResult:
    """L(1/2 + s, f) in the analytic normalization"""
    s = ctx.convert(s)
    completed = completed_L(f, s, ctx)
    half = ctx.mpf(f.weight) / 2
    factor = cpow(ctx, 2 * ctx.pi, s + half) / gamma(s + half, ctx)
    return LValueResult(complex(s), completed.value * factor,
                        completed.err_estimate * float(abs(factor)), completed.terms_used)


def _rectangle_part(f: Eigenform, ctx):
    """sum_n a(n)^2 Gamma(k-1, 4 pi n)/(4 pi n)^(k-1), the region y >= 1"""
    k = f.weight
    terms = []
    total = ctx.mpf(0)
    for n in range(1, f.length + 1):
        x = 4 * ctx.pi * n
        term = ctx.mpf(f.coefficient(n)) ** 2 * _mellin_piece(ctx, k - 1, x)
        term = ctx.re(term)
        if n > 1 and abs(term) <= ctx.eps * total:
            return compensated_sum(ctx, terms).real
        terms.append(term)
        total += term
    raise RangeError(f"coefficient table of length {f.length} too short for the Petersson norm")


def _fourier_sum(ctx, coeffs, z):
    """sum_{n <= M} a(n) e(nz) by Horner in q = e(z)"""
    q = ctx.exp(2j * ctx.pi * z)
    acc = ctx.mpc(0)
    for a in reversed(coeffs):
        acc = (acc + a) * q
    return acc


def _arc_part(f: Eigenform, ctx, order: int, coeffs):
    """Gauss-Legendre tensor rule on |x| <= 1/2, sqrt(1 - x^2) <= y <= 1"""
    nodes, weights = leggauss(order)
    nodes = [ctx.mpf(float(t)) for t in nodes]
    weights = [ctx.mpf(float(w)) for w in weights]
    exponent = f.weight - 2
    terms = []
    for tx, wx in zip(nodes, weights):
        x = tx / 2
        lower = ctx.sqrt(1 - x * x)
        span = 1 - lower
        for ty, wy in zip(nodes, weights):
            y = lower + span * (ty + 1) / 2
            value = _fourier_sum(ctx, coeffs, ctx.mpc(x, y))
            density = ctx.re(value) ** 2 + ctx.im(value) ** 2
            terms.append(wx / 2 * wy * span / 2 * density * y ** exponent)
    return compensated_sum(ctx, terms).real


def petersson_norm(f: Eigenform, ctx=FP, tol: float = 1e-10, cap: int = 1024):
    """||f||^2 = integral over the fundamental domain of |f|^2 y^k dmu"""
    if f.length < 200:
        raise RangeError(f"Petersson norm needs at least 200 coefficients, got {f.length}")
    return _petersson_norm(f, ctx, tol, cap)


@lru_cache(maxsize=32)
def _petersson_norm(f: Eigenform, ctx, tol, cap):
    rectangle = _rectangle_part(f, ctx)
    coeffs = [ctx.mpf(f.coefficient(n)) for n in range(1, min(f.length, ARC_TERMS) + 1)]
    order = ARC_START_ORDER
    previous = _arc_part(f, ctx, order, coeffs)
    while order * 2 <= cap:
        order *= 2
        current = _arc_part(f, ctx, order, coeffs)
        if abs(current - previous) <= tol * abs(rectangle + current):
            logger.debug("Petersson norm k=%d: arc order %d, rectangle %s, arc %s",
                         f.weight, order, rectangle, current)
            return rectangle + current
        previous = current
    raise ConvergenceError(f"arc quadrature for weight {f.weight} did not settle by order {cap}")


def sym2_L1(f: Eigenform, ctx=FP, tol: float = 1e-10, cap: int = 1024) -> NormData:
    """L(1, sym^2 f) = ||f||^2 (4 pi)^(k-1) 2 pi^2 / Gamma(k)"""
    norm = petersson_norm(f, ctx, tol, cap)
    k = f.weight
    value = norm * (4 * ctx.pi) ** (k - 1) * 2 * ctx.pi ** 2 / gamma(k, ctx)
    logger.debug("L(1, sym2) for weight %d via %s: %s", k, context_name(ctx), value)
    return NormData(norm, value)


def sym2_L1_smoothed(f: Eigenform, X1: float = 60.0, X2: float = 30.0, count: int = 2000) -> float:
    """Slow-series cross-check of L(1, sym^2 f)

    S(X) = sum b(n) e^(-n/X) with b(n) = sum_{d^2 | n} lambda(n/d^2)^2, the
    coefficients of zeta(s) L(s, sym^2 f). S(X) = X L(1, sym^2 f) + const up to
    a rapidly decaying remainder, so the difference quotient isolates L(1).
    """
    count = min(count, f.length)
    lam = f.lambda_table(FP)
    b = [0.0] * (count + 1)
    d = 1
    while d * d <= count:
        for m in range(1, count // (d * d) + 1):
            b[m * d * d] += lam[m] ** 2
        d += 1

    def smoothed(X):
        return compensated_sum(FP, [b[n] * FP.exp(-n / X) for n in range(1, count + 1)]).real

    return (smoothed(X1) - smoothed(X2)) / (X1 - X2)
