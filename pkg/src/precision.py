"""Working-precision backends

Kernels are written against an mpmath context object and never import a
float type directly. Two contexts are offered:

    double          mpmath.fp (hardware floats and complex)
    double-double   a private mpmath MPContext pinned to 106 bits

The private context is never shared with mpmath.mp, and its precision is set
once at construction, so concurrent readers see a fixed working precision.
"""

import logging
import math
import os
from functools import lru_cache
from typing import Iterable, Optional

import mpmath
from mpmath.ctx_mp import MPContext

from errors import ConfigError, ConvergenceError

logger = logging.getLogger(__name__)

DOUBLE = "double"
DOUBLE_DOUBLE = "double-double"
PRECISIONS = (DOUBLE, DOUBLE_DOUBLE)
PRECISION_ENV = "RTF_PRECISION"

_BITS = {DOUBLE: 53, DOUBLE_DOUBLE: 106}


@lru_cache(maxsize=None)
def get_context(name: str = DOUBLE):
    """Return the arithmetic context for a precision name"""
    if name == DOUBLE:
        return mpmath.fp
    if name == DOUBLE_DOUBLE:
        ctx = MPContext()
        ctx.prec = _BITS[DOUBLE_DOUBLE]
        logger.debug("Created %d-bit context", ctx.prec)
        return ctx
    raise ConfigError(f"Unknown precision '{name}', expected one of {', '.join(PRECISIONS)}")


def context_name(ctx) -> str:
    """Inverse of get_context, used in report provenance"""
    return DOUBLE if is_double(ctx) else DOUBLE_DOUBLE


def is_double(ctx) -> bool:
    return ctx.prec <= _BITS[DOUBLE]


def resolve_precision(flag: Optional[str] = None, configured: Optional[str] = None) -> str:
    """Pick the backend: flag, then environment, then config file, then default"""
    for source, value in (("flag", flag), ("environment", os.environ.get(PRECISION_ENV)),
                          ("config", configured)):
        if value:
            if value not in PRECISIONS:
                raise ConfigError(f"Unknown precision '{value}' from {source}")
            return value
    return DOUBLE


def significant_digits(ctx) -> int:
    return int(ctx.prec * math.log10(2))


def compensated_sum(ctx, terms: Iterable):
    """Exactly rounded sum of real or complex terms in the given context

    The double backend uses math.fsum on the real and imaginary parts; the
    extended backend uses mpmath's exact mantissa accumulation.
    """
    terms = list(terms)
    if not is_double(ctx):
        return ctx.fsum(terms)
    re_parts = [complex(t).real for t in terms]
    im_parts = [complex(t).imag for t in terms]
    return ctx.mpc(math.fsum(re_parts), math.fsum(im_parts))


def cpow(ctx, x, s):
    """x**s for positive real x and complex s, through the real logarithm"""
    if s == 0:
        return ctx.mpc(1)
    return ctx.exp(s * ctx.log(ctx.mpf(x)))


def check_finite(ctx, z, what: str):
    """Raise ConvergenceError instead of letting Inf/NaN escape"""
    re, im = ctx.re(z), ctx.im(z)
    if ctx.isnan(re) or ctx.isnan(im) or ctx.isinf(re) or ctx.isinf(im):
        raise ConvergenceError(f"{what} produced a non-finite value")
    return z
