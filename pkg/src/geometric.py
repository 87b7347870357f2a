"""Geometric side of the trace formula

Main term M2 (four closed-form summands), the three error series built on
the kernels psi, phi and Phi, the (0,0) forms (contour integral and digamma
kernel), the singular orbital integral, and per-matrix regular orbital
integrals with a 2-D quadrature oracle.

Sign convention for the error series: the psi- and phi-series carry
(-1)^(k/2), the Phi-series carries +1.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Tuple

import mpmath
import numpy as np
from scipy import integrate

from errors import ConvergenceError, DomainError, PoleError, RegionError, UnsupportedWeightError
from modforms import SUPPORTED_WEIGHTS, sigma_v
from precision import DOUBLE_DOUBLE, compensated_sum, cpow, get_context, is_double
from specialfn import (SAFETY, Hyp2F1Args, beta, digamma, gamma, gamma_ratio, hyp2f1,
                       hyp2f1_param_grad, log_gamma, zeta)

logger = logging.getLogger(__name__)

FP = mpmath.fp

ORIGIN_EPS = 1e-12
SERIES_TOL = 1e-12
SERIES_CAP = 100000
DECAY_MARGIN = 0.2
MIN_SERIES_TERMS = 8

# from this weight on the phi series runs at 106 bits even on the double backend
EXTENDED_PHI_WEIGHT = 18

CELL_PLUS = 1   # ad = n + m, bc = m
CELL_MIDDLE = 2  # ad = n - m, bc = m, 1 <= m <= n - 1
CELL_MINUS = 3  # ad = m - n, bc = m, m >= n + 1


def parity(k: int) -> int:
    """i^k = (-1)^(k/2) for even k"""
    if k % 2:
        raise DomainError(f"weight must be even, got {k}")
    return -1 if (k // 2) % 2 else 1


def c_k(k: int, ctx=FP):
    """C_k = pi i^k / (2^(k-3) (k-1))"""
    return parity(k) * ctx.pi / (ctx.mpf(2) ** (k - 3) * (k - 1))


# ----------------------------------------------------------------------------
# Parameters and results
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralParams:
    """Coordinates (k, n, s1, s2) of one instance of the identity"""
    k: int
    n: int
    s1: complex = 0j
    s2: complex = 0j

    @property
    def half(self) -> int:
        return self.k // 2

    @property
    def is_origin(self) -> bool:
        return abs(self.s1) < ORIGIN_EPS and abs(self.s2) < ORIGIN_EPS

    def validate(self) -> "SpectralParams":
        if self.k not in SUPPORTED_WEIGHTS:
            raise UnsupportedWeightError(
                f"unsupported weight {self.k}: expected one of {sorted(SUPPORTED_WEIGHTS)}")
        if self.n < 1:
            raise RegionError(f"index n must be positive, got {self.n}")
        bound = self.half - 1
        for name, s in (("s1", self.s1), ("s2", self.s2)):
            if abs(complex(s).real) >= bound:
                raise RegionError(f"|Re {name}| must be below k/2 - 1 = {bound}, got {s}")
        if self.is_origin:
            return self
        diff = complex(self.s1) - complex(self.s2)
        if abs(diff.imag) < ORIGIN_EPS and abs(diff.real - round(diff.real)) < ORIGIN_EPS:
            raise RegionError(f"s1 - s2 = {diff} is an integer away from the origin")
        if abs(complex(self.s1) + complex(self.s2)) < ORIGIN_EPS:
            raise RegionError("s1 + s2 = 0 away from the origin sits on a zeta pole of M2")
        return self

    def to_dict(self) -> dict:
        return {"k": self.k, "n": self.n,
                "s1": {"re": complex(self.s1).real, "im": complex(self.s1).imag},
                "s2": {"re": complex(self.s2).real, "im": complex(self.s2).imag}}


@dataclass
class MomentBreakdown:
    """Geometric side split into its summands"""
    m2_terms: Tuple[complex, complex, complex, complex]
    e1: complex
    e2: complex
    e3: complex
    e1_terms_used: int = 0
    e3_terms_used: int = 0
    e1_tail: float = 0.0
    e3_tail: float = 0.0
    pathway: str = "generic"
    total: complex = field(init=False)

    def __post_init__(self):
        parts = list(self.m2_terms) + [self.e1, self.e2, self.e3]
        self.total = complex(math.fsum(complex(z).real for z in parts),
                             math.fsum(complex(z).imag for z in parts))

    @property
    def m2(self) -> complex:
        return sum(complex(z) for z in self.m2_terms)

    def to_dict(self) -> dict:
        def pair(z):
            z = complex(z)
            return {"re": z.real, "im": z.imag}

        return {"m2": [pair(z) for z in self.m2_terms],
                "e": [pair(self.e1), pair(self.e2), pair(self.e3)],
                "total": pair(self.total),
                "e1_terms_used": self.e1_terms_used,
                "e3_terms_used": self.e3_terms_used,
                "e1_tail": self.e1_tail,
                "e3_tail": self.e3_tail,
                "pathway": self.pathway}


# ----------------------------------------------------------------------------
# Main term and the singular orbital integral
# ----------------------------------------------------------------------------

def _s_pair(p: SpectralParams, ctx):
    return ctx.convert(p.s1), ctx.convert(p.s2)


def m2_main(p: SpectralParams, ctx=FP):
    """The four summands of M2(n; s1, s2)"""
    s1, s2 = _s_pair(p, ctx)
    if s1 + s2 == 0:
        raise PoleError("M2 summands are singular at s1 + s2 = 0")
    if s1 == s2:
        raise PoleError("M2 summands are singular at s1 = s2")
    k, n, h = p.k, p.n, ctx.mpf(p.half)
    sign = parity(k)
    sd = sigma_v(s1 - s2, n, ctx)
    ss = sigma_v(s1 + s2, n, ctx)
    two_pi = 2 * ctx.pi
    ratio1 = gamma_ratio(h - s1, h + s1, ctx)
    ratio2 = gamma_ratio(h - s2, h + s2, ctx)
    t1 = sd * cpow(ctx, n, -s1 - 0.5) * zeta(1 + s1 + s2, ctx)
    t2 = (sd * cpow(ctx, n, s2 - 0.5) * zeta(1 - s1 - s2, ctx) * ratio1 * ratio2
          * cpow(ctx, two_pi, 2 * s1 + 2 * s2))
    t3 = sign * ss * cpow(ctx, n, -s2 - 0.5) * zeta(1 - s1 + s2, ctx) * ratio1 * cpow(ctx, two_pi, 2 * s1)
    t4 = sign * ss * cpow(ctx, n, -s1 - 0.5) * zeta(1 + s1 - s2, ctx) * ratio2 * cpow(ctx, two_pi, 2 * s2)
    return t1, t2, t3, t4


def prefactor(p: SpectralParams, ctx=FP):
    """2^(k-1) pi (2 pi)^(-s1-s2) n^((k-1)/2) Gamma(s1+k/2) Gamma(s2+k/2) / Gamma(k)"""
    s1, s2 = _s_pair(p, ctx)
    k, n, h = p.k, p.n, ctx.mpf(p.half)
    log_gammas = log_gamma(s1 + h, ctx) + log_gamma(s2 + h, ctx) - log_gamma(k, ctx)
    return (ctx.mpf(2) ** (k - 1) * ctx.pi * cpow(ctx, 2 * ctx.pi, -s1 - s2)
            * cpow(ctx, n, ctx.mpf(k - 1) / 2) * ctx.exp(log_gammas))


def j_sing(p: SpectralParams, ctx=FP):
    """Singular orbital integral in its four-term closed form"""
    s1, s2 = _s_pair(p, ctx)
    k, n, h = p.k, p.n, ctx.mpf(p.half)
    inv_c = 1 / c_k(k, ctx)
    ik = parity(k)
    two_pi = 2 * ctx.pi
    nk = ctx.mpf(n) ** (k - 1)
    sd = sigma_v(s1 - s2, n, ctx)
    ss = sigma_v(s1 + s2, n, ctx)

    def gammas(*args):
        return ctx.exp(sum(log_gamma(z, ctx) for z in args) - log_gamma(k, ctx))

    t1 = (2 * inv_c * ik * gammas(s1 + h, s2 + h) * cpow(ctx, two_pi, -s1 - s2)
          * zeta(1 + s1 + s2, ctx) * sd * nk * cpow(ctx, n, -s1 - h))
    t2 = (2 * cpow(ctx, two_pi, s1 + s2) * inv_c * ik * nk * sd * cpow(ctx, n, s2 - h)
          * gammas(h - s1, h - s2) * zeta(1 - s1 - s2, ctx))
    t3 = (2 * inv_c * gammas(h - s1, s2 + h) * cpow(ctx, two_pi, s1 - s2)
          * zeta(1 - s1 + s2, ctx) * ss * nk * cpow(ctx, n, -s2 - h))
    t4 = (2 * cpow(ctx, two_pi, s2 - s1) * inv_c * nk * ss * cpow(ctx, n, -s1 - h)
          * gammas(s1 + h, h - s2) * zeta(1 + s1 - s2, ctx))
    return t1 + t2 + t3 + t4


def main_term_from_singular(p: SpectralParams, ctx=FP):
    """(2 pi^2/(k-1)) j_sing / prefactor, which equals the sum of m2_main"""
    return 2 * ctx.pi ** 2 / (p.k - 1) * j_sing(p, ctx) / prefactor(p, ctx)


# ----------------------------------------------------------------------------
# Error-series kernels
# ----------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _kernel_constants(k: int, s1, s2, ctx):
    """m-independent factors shared by psi and Phi"""
    h = ctx.mpf(k // 2)
    gammas = ctx.exp(log_gamma(h - s1, ctx) + log_gamma(h - s2, ctx) - log_gamma(k, ctx))
    scale = 2 * cpow(ctx, 2 * ctx.pi, s1 + s2) * gammas
    return h, scale


def _hyp(ctx, a, b, c, x) -> complex:
    return hyp2f1(Hyp2F1Args(a, b, c, x), ctx).value


def psi_term(p: SpectralParams, m: int, ctx=FP):
    """psi_k(n, m; s1, s2)"""
    if m < 1:
        raise DomainError(f"psi kernel needs m >= 1, got {m}")
    s1, s2 = _s_pair(p, ctx)
    h, scale = _kernel_constants(p.k, s1, s2, ctx)
    n = p.n
    x = -ctx.mpf(n) / m
    return (scale * ctx.cos(ctx.pi * (s1 - s2) / 2) * cpow(ctx, m, s2) * cpow(ctx, n + m, -s1 - s2)
            * (ctx.mpf(n) / m) ** h * _hyp(ctx, h - s2, h - s1, 2 * h, x))


def Phi_term(p: SpectralParams, m: int, ctx=FP):
    """Phi_k(n, m; s1, s2) for m >= n + 1"""
    n = p.n
    if m <= n:
        raise DomainError(f"Phi kernel needs m >= n + 1 = {n + 1}, got {m}")
    s1, s2 = _s_pair(p, ctx)
    h, scale = _kernel_constants(p.k, s1, s2, ctx)
    x = ctx.mpf(n) / m
    return (scale * ctx.cos(ctx.pi * (s1 + s2) / 2) * cpow(ctx, m, s2) * cpow(ctx, m - n, -s1 - s2)
            * x ** h * _hyp(ctx, h - s2, h - s1, 2 * h, x))


def phi_term(p: SpectralParams, m: int, ctx=FP):
    """phi_k(n, m; s1, s2) for 1 <= m <= n - 1, two 2F1 terms with sine denominators"""
    n = p.n
    if not 1 <= m <= n - 1:
        raise DomainError(f"phi kernel needs 1 <= m <= n - 1 = {n - 1}, got {m}")
    s1, s2 = _s_pair(p, ctx)
    diff = s1 - s2
    if ctx.im(diff) == 0 and ctx.re(diff) == int(ctx.re(diff)):
        raise PoleError(f"phi kernel is singular at integer s1 - s2 = {diff}")
    h = ctx.mpf(p.half)
    x = ctx.mpf(m) / n
    lead = cpow(ctx, 2 * ctx.pi, s1 + s2 + 1) * cpow(ctx, n - m, -s1 - s2)
    first = (lead / (2 * ctx.sin(ctx.pi * (s2 - s1) / 2)) * cpow(ctx, n, s2)
             * gamma_ratio(h - s2, s2 + h, ctx) / gamma(1 + diff, ctx)
             * _hyp(ctx, h - s2, 1 - h - s2, 1 + diff, x))
    second = (lead / (2 * ctx.sin(ctx.pi * diff / 2)) * cpow(ctx, n, s1) * cpow(ctx, m, -diff)
              * gamma_ratio(h - s1, s1 + h, ctx) / gamma(1 - diff, ctx)
              * _hyp(ctx, h - s1, 1 - h - s1, 1 - diff, x))
    return first + second


def phi0(k: int, x, ctx=FP):
    """(0,0) phi kernel

    (-log x - 2 psi(k/2) + 2 psi(1)) F(k/2, 1-k/2; 1; x)
        - (d_a + d_b + 2 d_c) F(a, b; c; x) at (k/2, 1-k/2, 1).
    The limit of phi_term as (s1, s2) -> 0 is twice this value.
    """
    x = ctx.mpf(x)
    if not 0 < x <= 0.95:
        raise DomainError(f"phi0 needs x in (0, 0.95], got {x}")
    h = ctx.mpf(k) / 2
    args = Hyp2F1Args(h, 1 - h, 1, x)
    value = hyp2f1(args, ctx).value
    d_a, d_b, d_c = hyp2f1_param_grad(args, ctx)
    log_part = -ctx.log(x) - 2 * digamma(h, ctx) + 2 * digamma(1, ctx)
    return ctx.re(log_part * value - (d_a + d_b + 2 * d_c))


# ----------------------------------------------------------------------------
# Error series
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesResult:
    value: complex
    terms_used: int
    tail_bound: float


def _decay_exponent(p: SpectralParams) -> float:
    return p.half - abs(complex(p.s1).real) - abs(complex(p.s2).real) - DECAY_MARGIN


def _sum_with_tail(ctx, term: Callable[[int], complex], start: int, alpha: float, tol: float,
                   cap: int, min_index: int, label: str) -> SeriesResult:
    """Sum term(m) for m >= start until the power-law tail majorant drops below tol

    The majorant is SAFETY * C * M^(1 - alpha)/(alpha - 1), C the running
    envelope of |term(m)| m^alpha.
    """
    if alpha <= 1.05:
        raise ConvergenceError(f"{label}: decay exponent {alpha:.3f} too small for a tail bound")
    terms = []
    envelope = 0.0
    m = start
    while True:
        value = term(m)
        terms.append(value)
        envelope = max(envelope, float(abs(value)) * m ** alpha)
        count = m - start + 1
        if count >= MIN_SERIES_TERMS and m >= min_index:
            bound = SAFETY * envelope * m ** (1 - alpha) / (alpha - 1)
            if bound < tol:
                logger.debug("%s: %d terms, tail bound %.3e", label, count, bound)
                return SeriesResult(compensated_sum(ctx, terms), count, bound)
        if count >= cap:
            raise ConvergenceError(f"{label} did not reach tolerance {tol:g} within {cap} terms")
        m += 1


def _phi_context(k: int, ctx):
    """The phi kernels cancel heavily at large weight"""
    if is_double(ctx) and k >= EXTENDED_PHI_WEIGHT:
        return get_context(DOUBLE_DOUBLE)
    return ctx


def e_total(p: SpectralParams, tol: float = SERIES_TOL, ctx=FP, cap: int = SERIES_CAP,
            max_terms: Optional[int] = None):
    """(E1, E2, E3) with their diagnostics as SeriesResult triples

    At the origin the kernels switch to their (0,0) forms. `max_terms` fixes
    the truncation of E1 and E3 instead of the tail rule (used to probe
    truncation honesty).
    """
    n, k = p.n, p.k
    sign = parity(k)
    origin = p.is_origin
    s1, s2 = (ctx.mpf(0), ctx.mpf(0)) if origin else _s_pair(p, ctx)
    point = SpectralParams(k, n, 0j, 0j) if origin else p
    scale = 1 / ctx.sqrt(n)
    diff, total = s1 - s2, s1 + s2

    def first(m):
        return sigma_v(diff, m, ctx) * sigma_v(total, n + m, ctx) * psi_term(point, m, ctx)

    def third(m):
        return sigma_v(diff, m, ctx) * sigma_v(total, m - n, ctx) * Phi_term(point, m, ctx)

    mid = _phi_context(k, ctx)
    ms1, ms2 = (mid.mpf(0), mid.mpf(0)) if origin else _s_pair(p, mid)

    def middle(m):
        kernel = 2 * phi0(k, mid.mpf(m) / n, mid) if origin else phi_term(p, m, mid)
        return sigma_v(ms1 + ms2, n - m, mid) * sigma_v(ms1 - ms2, m, mid) * kernel

    alpha = _decay_exponent(p)
    if max_terms is None:
        r1 = _sum_with_tail(ctx, first, 1, alpha, tol, cap, 2 * n + 4, "psi series")
        r3 = _sum_with_tail(ctx, third, n + 1, alpha, tol, cap, 3 * n + 4, "Phi series")
    else:
        r1 = SeriesResult(compensated_sum(ctx, [first(m) for m in range(1, max_terms + 1)]),
                          max_terms, 0.0)
        r3 = SeriesResult(compensated_sum(ctx, [third(m) for m in range(n + 1, n + 1 + max_terms)]),
                          max_terms, 0.0)
    e2 = compensated_sum(mid, [middle(m) for m in range(1, n)]) if n > 1 else mid.mpc(0)
    if mid is not ctx:
        e2 = ctx.convert(complex(e2))
    e1 = SeriesResult(sign * scale * r1.value, r1.terms_used, r1.tail_bound * float(scale))
    e2 = SeriesResult(sign * scale * e2, max(n - 1, 0), 0.0)
    e3 = SeriesResult(scale * r3.value, r3.terms_used, r3.tail_bound * float(scale))
    return e1, e2, e3


# ----------------------------------------------------------------------------
# The origin
# ----------------------------------------------------------------------------

def m2_zero(k: int, n: int, eps: float = 0.1, K: int = 64, ctx=FP) -> float:
    """M2(n; 0, 0) from its contour-integral form

    Trapezoidal rule on |s| = eps for
    (1/2 pi i) oint 4 n^(-1/2) Gamma((s+k)/2)^2 (2 pi)^(-s) Gamma(k/2)^(-2)
        sigma_0(n) n^(-s/2) zeta(1+s) ds/s,
    times (1 + (-1)^(k/2))/2, which removes the main term at k = 2 mod 4.
    """
    if not 0 < eps < 0.5:
        raise DomainError(f"contour radius must lie in (0, 0.5), got {eps}")
    if K < 16:
        raise DomainError(f"contour needs at least 16 samples, got {K}")
    coarse = _contour_mean(ctx, k, n, eps, K)
    fine = _contour_mean(ctx, k, n, eps, 2 * K)
    if abs(fine - coarse) > 1e-10 * max(1.0, float(abs(fine))):
        raise ConvergenceError(f"contour mean moved by {float(abs(fine - coarse)):.3e} under sample doubling")
    if abs(ctx.im(fine)) > 1e-10 * max(1.0, float(abs(fine))):
        raise ConvergenceError(f"contour mean has imaginary part {ctx.im(fine)}")
    return ctx.re(fine) * (1 + parity(k)) / 2


def _contour_mean(ctx, k, n, eps, K):
    h = ctx.mpf(k) / 2
    base = 4 / ctx.sqrt(n) * sigma_v(0, n, ctx)
    lg = log_gamma(h, ctx)
    samples = []
    for j in range(K):
        s = eps * ctx.exp(2j * ctx.pi * j / K)
        gammas = ctx.exp(2 * log_gamma((s + k) / 2, ctx) - 2 * lg)
        samples.append(base * gammas * cpow(ctx, 2 * ctx.pi, -s) * cpow(ctx, n, -s / 2) * zeta(1 + s, ctx))
    return compensated_sum(ctx, samples) / K


def m2_zero_closed(k: int, n: int, ctx=FP) -> float:
    """(1 + (-1)^(k/2)) sigma_0(n) n^(-1/2) (2 gamma - log n - 2 log 2 pi + 2 psi(k/2))"""
    euler = -digamma(1, ctx)
    bracket = 2 * euler - ctx.log(n) - 2 * ctx.log(2 * ctx.pi) + 2 * digamma(ctx.mpf(k) / 2, ctx)
    return (1 + parity(k)) * sigma_v(0, n, ctx) / ctx.sqrt(n) * ctx.re(bracket)


# ----------------------------------------------------------------------------
# Assembly
# ----------------------------------------------------------------------------

def geometric_total(p: SpectralParams, tol: float = SERIES_TOL, ctx=FP, cap: int = SERIES_CAP,
                    contour_radius: float = 0.1, contour_samples: int = 64) -> MomentBreakdown:
    """M2 + E with the per-term breakdown"""
    p.validate()
    e1, e2, e3 = e_total(p, tol, ctx, cap)
    if p.is_origin:
        m2 = (m2_zero(p.k, p.n, contour_radius, contour_samples, ctx), 0.0, 0.0, 0.0)
        pathway = "origin"
    else:
        m2 = m2_main(p, ctx)
        pathway = "generic"
    return MomentBreakdown(tuple(complex(z) for z in m2), complex(e1.value), complex(e2.value),
                           complex(e3.value), e1.terms_used, e3.terms_used,
                           e1.tail_bound, e3.tail_bound, pathway)


def functional_gamma(k: int, s, ctx=FP):
    """(2 pi)^(2s) Gamma(k/2 - s)/Gamma(k/2 + s)"""
    h = ctx.mpf(k) / 2
    s = ctx.convert(s)
    return cpow(ctx, 2 * ctx.pi, 2 * s) * gamma_ratio(h - s, h + s, ctx)


def geometric_functional_residual(p: SpectralParams, tol: float = SERIES_TOL, ctx=FP) -> float:
    """Relative residual of G(s1, s2) = (-1)^(k/2) gamma(s1) G(-s1, s2)"""
    direct = geometric_total(p, tol, ctx).total
    mirrored = geometric_total(SpectralParams(p.k, p.n, -complex(p.s1), p.s2), tol, ctx).total
    predicted = parity(p.k) * complex(functional_gamma(p.k, p.s1, ctx)) * mirrored
    return abs(direct - predicted) / max(abs(direct), 1e-300)


# ----------------------------------------------------------------------------
# Regular orbital integrals for single matrices
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class MatrixOrbit:
    """Representative (a, b, c, d) of a regular orbit, positive entries

    cell 1: ad = n + m, bc = m
    cell 2: ad = n - m, bc = m
    cell 3: ad = m - n, bc = m
    """
    a: int
    b: int
    c: int
    d: int
    cell: int

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 1:
            raise DomainError(f"orbit entries must be positive, got {(self.a, self.b, self.c, self.d)}")
        if self.cell not in (CELL_PLUS, CELL_MIDDLE, CELL_MINUS):
            raise DomainError(f"unknown cell {self.cell}")
        if self.n < 1:
            raise DomainError(f"orbit {(self.a, self.b, self.c, self.d)} gives index {self.n} in cell {self.cell}")

    @property
    def m(self) -> int:
        return self.b * self.c

    @property
    def n(self) -> int:
        ad, bc = self.a * self.d, self.b * self.c
        if self.cell == CELL_PLUS:
            return ad - bc
        if self.cell == CELL_MIDDLE:
            return ad + bc
        return bc - ad


def _orbit_denominator(orbit: MatrixOrbit, y1, y2):
    a, b, c, d = orbit.a, orbit.b, orbit.c, orbit.d
    if orbit.cell == CELL_PLUS:
        return b + 1j * a * y1 + 1j * d * y2 - c * y1 * y2
    if orbit.cell == CELL_MIDDLE:
        return b + 1j * a * y1 + 1j * d * y2 + c * y1 * y2
    return b + 1j * a * y1 - 1j * d * y2 + c * y1 * y2


def orbital_closed_form(orbit: MatrixOrbit, k: int, s1, s2, ctx=FP):
    """X(s1, s2) + conj(X(conj s1, conj s2)) for one orbit, in closed form

    X is the double integral of y1^(k/2 - s1) y2^(k/2 + s2) / D^k dy1 dy2/(y1 y2)
    with D the orbit's denominator (see orbital_quadrature_oracle).
    """
    s1, s2 = ctx.convert(s1), ctx.convert(s2)
    h = ctx.mpf(k) / 2
    a, b, c, d, n, m = orbit.a, orbit.b, orbit.c, orbit.d, orbit.n, orbit.m
    if orbit.cell == CELL_MIDDLE:
        # same conversion factor that turns every cell into its kernel
        convert = (parity(k) * cpow(ctx, n, -h) * cpow(ctx, 2 * ctx.pi, -s1 - s2)
                   * ctx.exp(log_gamma(h + s1, ctx) + log_gamma(h + s2, ctx) - log_gamma(k, ctx)))
        return convert * cpow(ctx, a, s1 + s2) * cpow(ctx, c, s1 - s2) * phi_term(SpectralParams(k, n, s1, s2), m, ctx)
    betas = beta(s2 + h, h - s2, ctx) * beta(h - s1, h + s1, ctx)
    common = cpow(ctx, b, s2) * cpow(ctx, c, s1) * cpow(ctx, m, -h) * cpow(ctx, d, -s1 - s2) * betas
    if orbit.cell == CELL_PLUS:
        phase = 2 * parity(k) * ctx.cos(ctx.pi * (s1 - s2) / 2)
        x = -ctx.mpf(n) / m
    else:
        phase = 2 * ctx.cos(ctx.pi * (s1 + s2) / 2)
        x = ctx.mpf(n) / m
    return phase * common * _hyp(ctx, h - s2, h - s1, 2 * h, x)


def orbital_quadrature_oracle(orbit: MatrixOrbit, k: int, s1, s2, box: float = 1e4,
                              epsrel: float = 1e-10) -> complex:
    """X(s1, s2) + conj(X(conj s1, conj s2)) by adaptive 2-D quadrature

    Works in t = log y over the box [-log box, log box]^2; the integrand is
    y1^(k/2 - s1) y2^(k/2 + s2) (D^-k + conj(D)^-k).
    """
    s1, s2 = complex(s1), complex(s2)
    h = k / 2
    limit = math.log(box)

    def integrand(t2, t1):
        y1, y2 = math.exp(t1), math.exp(t2)
        den = _orbit_denominator(orbit, y1, y2)
        weight = np.exp((h - s1) * t1 + (h + s2) * t2)
        return weight * (den ** (-k) + den.conjugate() ** (-k))

    re, err_re = integrate.dblquad(lambda t2, t1: integrand(t2, t1).real, -limit, limit,
                                   -limit, limit, epsabs=0.0, epsrel=epsrel)
    im, err_im = integrate.dblquad(lambda t2, t1: integrand(t2, t1).imag, -limit, limit,
                                   -limit, limit, epsabs=0.0, epsrel=epsrel)
    value = complex(re, im)
    if max(err_re, err_im) > 1e-4 * max(abs(value), 1e-300):
        raise ConvergenceError(f"orbital quadrature for {orbit} stalled (error {max(err_re, err_im):.3e})")
    logger.debug("orbital quadrature %s: %s (err %.2e, %.2e)", orbit, value, err_re, err_im)
    return value
