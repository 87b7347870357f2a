"""Level-1 modular forms with exact integer q-expansions

Delta, E4 and E6 are built from exact integer series; the normalized Hecke
eigenform of weight k in {12, 16, 18, 20, 22, 26} is Delta times a monomial
in E4 and E6. Normalized eigenvalues lambda(n) = a(n)/n^((k-1)/2) are the only
place where integers become floating values.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from errors import DomainError, RangeError, ResourceError, UnsupportedWeightError
from precision import context_name, cpow

logger = logging.getLogger(__name__)

FP = mpmath.fp

QEXP_CAP = 20000
DEFAULT_LENGTH = 2000
QEXP_MAGIC = "QEXP1"

# weight -> (power of E4, power of E6) multiplying Delta
SUPPORTED_WEIGHTS: Dict[int, Tuple[int, int]] = {
    12: (0, 0),
    16: (1, 0),
    18: (0, 1),
    20: (2, 0),
    22: (1, 1),
    26: (2, 1),
}


# ----------------------------------------------------------------------------
# Arithmetic functions
# ----------------------------------------------------------------------------

@lru_cache(maxsize=65536)
def factorize(n: int) -> Tuple[Tuple[int, int], ...]:
    """Prime factorization by trial division"""
    if n < 1:
        raise DomainError(f"factorize needs a positive integer, got {n}")
    factors = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        factors.append((n, 1))
    return tuple(factors)


def divisors(n: int) -> List[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return sorted(divs)


def sigma_int(n: int, power: int) -> int:
    """Exact sigma_power(n) for non-negative integer power"""
    total = 1
    for p, e in factorize(n):
        total *= sum(p ** (power * i) for i in range(e + 1))
    return total


def sigma_v(v, n: int, ctx=FP):
    """sigma_v(n) = sum over d | n of d^v"""
    if n < 1:
        raise DomainError(f"sigma_v needs n >= 1, got {n}")
    v = ctx.convert(v)
    if v == 0:
        return ctx.mpf(sigma_int(n, 0))
    total = ctx.mpf(1)
    for p, e in factorize(n):
        pv = cpow(ctx, p, v)
        local = ctx.mpf(1)
        power = ctx.mpf(1)
        for _ in range(e):
            power *= pv
            local += power
        total *= local
    return total


def tau_v(v, n: int, ctx=FP):
    """tau_v(n) = sigma_{2v}(n)/n^v, assembled symmetrically in v"""
    if n < 1:
        raise DomainError(f"tau_v needs n >= 1, got {n}")
    v = ctx.convert(v)
    total = ctx.mpf(1)
    for p, e in factorize(n):
        total *= sum(cpow(ctx, p, (2 * i - e) * v) for i in range(e + 1))
    return total


# ----------------------------------------------------------------------------
# Exact q-expansions
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class QExpansion:
    """Integer q-expansion a(0) + a(1) q + ... + a(N) q^N"""
    weight: int
    coeffs: Tuple[int, ...]  # a(1..N)
    constant: int = 0

    @property
    def count(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> int:
        if n == 0:
            return self.constant
        if not 1 <= n <= self.count:
            raise RangeError(f"coefficient a({n}) requested from a table of length {self.count}")
        return self.coeffs[n - 1]

    def series(self) -> np.ndarray:
        """Object array a(0..N) for exact arithmetic"""
        return np.array((self.constant,) + self.coeffs, dtype=object)

    @classmethod
    def from_series(cls, weight: int, series: Sequence[int]) -> "QExpansion":
        return cls(weight, tuple(int(a) for a in series[1:]), int(series[0]))


def _check_length(N: int, cap: int = QEXP_CAP):
    if N < 1:
        raise DomainError(f"q-expansion length must be positive, got {N}")
    if N > cap:
        raise ResourceError(f"q-expansion length {N} exceeds the configured cap {cap}")


def _mul(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    """Product of two exact series truncated at q^N"""
    return np.convolve(a[:N + 1], b[:N + 1])[:N + 1]


def _power(a: np.ndarray, exponent: int, N: int) -> np.ndarray:
    result = np.zeros(N + 1, dtype=object)
    result[0] = 1
    base = a
    while exponent:
        if exponent & 1:
            result = _mul(result, base, N)
        exponent >>= 1
        if exponent:
            base = _mul(base, base, N)
    return result


def euler_product_series(N: int) -> np.ndarray:
    """prod (1 - q^m) up to q^N by the pentagonal-number theorem"""
    series = np.zeros(N + 1, dtype=object)
    j = 0
    while True:
        sign = -1 if j % 2 else 1
        placed = False
        for g in {j * (3 * j - 1) // 2, j * (3 * j + 1) // 2}:
            if g <= N:
                series[g] += sign
                placed = True
        if not placed:
            return series
        j += 1


@lru_cache(maxsize=8)
def delta_qexp(N: int = DEFAULT_LENGTH, cap: int = QEXP_CAP) -> QExpansion:
    """Ramanujan's Delta = q prod (1 - q^m)^24, coefficients tau(1..N)"""
    _check_length(N, cap)
    eta24 = _power(euler_product_series(N - 1), 24, N - 1)
    logger.debug("Delta expanded to q^%d", N)
    return QExpansion(12, tuple(int(a) for a in eta24))


@lru_cache(maxsize=8)
def eisenstein_qexp(weight: int, N: int = DEFAULT_LENGTH, cap: int = QEXP_CAP) -> QExpansion:
    """E4 = 1 + 240 sum sigma_3(n) q^n, E6 = 1 - 504 sum sigma_5(n) q^n"""
    _check_length(N, cap)
    if weight == 4:
        scale, power = 240, 3
    elif weight == 6:
        scale, power = -504, 5
    else:
        raise UnsupportedWeightError(f"Eisenstein series of weight {weight} not provided")
    return QExpansion(weight, tuple(scale * sigma_int(n, power) for n in range(1, N + 1)), 1)


# ----------------------------------------------------------------------------
# Eigenforms
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Eigenform:
    """Normalized Hecke eigenform of level 1 in a one-dimensional space"""
    weight: int
    qexp: QExpansion
    _lambda_cache: Dict[str, list] = field(default_factory=dict, compare=False, repr=False)

    @property
    def length(self) -> int:
        return self.qexp.count

    def coefficient(self, n: int) -> int:
        return self.qexp[n]

    def lambda_table(self, ctx=FP) -> list:
        """lambda(1..N) in the working precision (index 0 unused)"""
        key = context_name(ctx)
        table = self._lambda_cache.get(key)
        if table is None:
            exponent = ctx.mpf(self.weight - 1) / 2
            table = [ctx.mpf(0)] + [ctx.mpf(a) / ctx.mpf(n) ** exponent
                                   for n, a in enumerate(self.qexp.coeffs, start=1)]
            self._lambda_cache[key] = table
        return table


def eigenform(k: int, N: int = DEFAULT_LENGTH, cap: int = QEXP_CAP) -> Eigenform:
    """The unique normalized eigenform Delta * E4^i * E6^j of weight k"""
    if k not in SUPPORTED_WEIGHTS:
        raise UnsupportedWeightError(
            f"unsupported weight {k}: expected one of {sorted(SUPPORTED_WEIGHTS)}")
    return _eigenform(k, N, cap)


@lru_cache(maxsize=32)
def _eigenform(k: int, N: int, cap: int) -> Eigenform:
    _check_length(N, cap)
    e4_power, e6_power = SUPPORTED_WEIGHTS[k]
    product = delta_qexp(N, cap).series()
    if e4_power:
        product = _mul(product, _power(eisenstein_qexp(4, N, cap).series(), e4_power, N), N)
    if e6_power:
        product = _mul(product, _power(eisenstein_qexp(6, N, cap).series(), e6_power, N), N)
    form = Eigenform(k, QExpansion.from_series(k, product))
    logger.info("✓ Eigenform of weight %d expanded to q^%d", k, N)
    return form


def hecke_lambda(f: Eigenform, n: int, ctx=FP):
    """lambda_f(n) = a(n) / n^((k-1)/2)"""
    if not 1 <= n <= f.length:
        raise RangeError(f"lambda({n}) requested from a table of length {f.length}")
    return f.lambda_table(ctx)[n]


# ----------------------------------------------------------------------------
# QEXP cache files
# ----------------------------------------------------------------------------

def format_qexp(qexp: QExpansion) -> str:
    lines = [f"{QEXP_MAGIC} weight={qexp.weight} count={qexp.count}"]
    if qexp.constant:
        lines.append(f"0 {qexp.constant}")
    lines.extend(f"{n} {a}" for n, a in enumerate(qexp.coeffs, start=1))
    return "\n".join(lines) + "\n"


def parse_qexp(text: str) -> QExpansion:
    lines = text.splitlines()
    if not lines:
        raise DomainError("empty QEXP cache")
    header = lines[0].split()
    if len(header) != 3 or header[0] != QEXP_MAGIC:
        raise DomainError(f"bad QEXP header: {lines[0]!r}")
    fields = dict(item.split("=", 1) for item in header[1:])
    weight, count = int(fields["weight"]), int(fields["count"])
    constant = 0
    coeffs = []
    for line in lines[1:]:
        if not line.strip():
            continue
        index, value = line.split()
        index = int(index)
        if index == 0:
            constant = int(value)
            continue
        if index != len(coeffs) + 1:
            raise DomainError(f"QEXP cache out of order at index {index}")
        coeffs.append(int(value))
    if len(coeffs) != count:
        raise DomainError(f"QEXP cache declares {count} coefficients but holds {len(coeffs)}")
    return QExpansion(weight, tuple(coeffs), constant)


def save_qexp(qexp: QExpansion, path) -> Path:
    path = Path(path).expanduser()
    path.write_text(format_qexp(qexp))
    logger.info("✓ Coefficient cache saved to %s", path)
    return path


def load_qexp(path) -> QExpansion:
    path = Path(path).expanduser()
    qexp = parse_qexp(path.read_text())
    logger.info("✓ Coefficient cache loaded from %s", path)
    return qexp


def qexp_digest(qexp: QExpansion) -> str:
    """Cache id: sha256 of the canonical text form"""
    return hashlib.sha256(format_qexp(qexp).encode("ascii")).hexdigest()[:16]


def eigenform_from_cache(path, k: int, N: Optional[int] = None) -> Eigenform:
    """Eigenform backed by a cache file, checked against the requested weight"""
    qexp = load_qexp(path)
    if qexp.weight != k:
        raise DomainError(f"cache {path} holds weight {qexp.weight}, not {k}")
    if N is not None:
        if N > qexp.count:
            raise RangeError(f"cache {path} holds {qexp.count} coefficients, {N} requested")
        qexp = QExpansion(k, qexp.coeffs[:N])
    return Eigenform(k, qexp)
