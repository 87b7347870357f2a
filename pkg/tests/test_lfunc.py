import math

import mpmath
import numpy as np
import pytest

from errors import DomainError, RangeError
from lfunc import L_value, completed_L, petersson_norm, sym2_L1, sym2_L1_smoothed
from modforms import eigenform
from precision import get_context

FP = mpmath.fp

# <Delta, Delta> over SL2(Z)\H with y^12 dx dy / y^2
DELTA_NORM = 1.035362056804320922347816812e-6


def test_functional_equation(forms):
    for k in (12, 18, 26):
        f = forms[k]
        sign = -1 if (k // 2) % 2 else 1
        for s in (0.07 + 0.11j, 0.31 - 0.4j, 1.5 + 2j):
            plus = complex(completed_L(f, s).value)
            minus = complex(completed_L(f, -s).value)
            assert abs(plus - sign * minus) < 1e-11 * max(1.0, abs(plus))


def test_dirichlet_series_in_absolute_convergence(delta):
    lam = delta.lambda_table()
    for s in (4.5, 4.5 + 0.3j, 4.8 - 1j):
        direct = math.fsum(lam[n] * (n ** -(0.5 + s)).real for n in range(1, delta.length + 1)) \
            + 1j * math.fsum(lam[n] * (n ** -(0.5 + s)).imag for n in range(1, delta.length + 1))
        value = complex(L_value(delta, s).value)
        assert abs(value - direct) < 1e-10 * abs(direct)


def test_central_zero_for_odd_sign(forms):
    for k in (18, 22, 26):
        assert abs(L_value(forms[k], 0).value) < 1e-10


def test_central_value_nonzero_for_delta(delta):
    # L(6, Delta) in the arithmetic normalization is about 0.792122
    value = complex(L_value(delta, 0).value)
    assert abs(value.imag) < 1e-14
    assert 0.5 < value.real < 1.0


def test_strip_and_table_checks(delta):
    with pytest.raises(DomainError):
        L_value(delta, 5.5)
    short = eigenform(12, 5)
    with pytest.raises(RangeError):
        completed_L(short, 0.1)


def test_petersson_norm_of_delta(delta):
    assert abs(petersson_norm(delta) - DELTA_NORM) < 1e-9 * DELTA_NORM


def test_petersson_self_convergence(delta):
    loose = petersson_norm(delta, tol=1e-9)
    tight = petersson_norm(delta, tol=1e-12)
    assert abs(loose - tight) < 1e-9 * tight


def test_petersson_needs_coefficients():
    with pytest.raises(RangeError):
        petersson_norm(eigenform(12, 100))


def test_sym2_matches_smoothed_series(forms):
    for k in (12, 16):
        f = forms[k]
        value = sym2_L1(f).sym2_at_1
        assert abs(sym2_L1_smoothed(f) - value) < 1e-4 * value


def test_sym2_relation(delta):
    norms = sym2_L1(delta)
    expected = norms.petersson_sq * (4 * math.pi) ** 11 * 2 * math.pi ** 2 / math.factorial(11)
    assert abs(norms.sym2_at_1 - expected) < 1e-13 * expected


def test_double_double_l_value(delta):
    dd = get_context("double-double")
    s = 0.07 + 0.11j
    high = mpmath.mpmathify(L_value(delta, s, dd).value)
    low = complex(L_value(delta, s).value)
    assert abs(complex(high) - low) < 1e-13 * abs(low)


def _grid_points(count, seed):
    rng = np.random.default_rng(seed)
    return [complex(rng.uniform(-1.5, 1.5), rng.uniform(-3.0, 3.0)) for _ in range(count)]


@pytest.mark.parametrize("k", [12, 16, 18, 20, 22, 26])
def test_functional_equation_grid(forms, k):
    f = forms[k]
    sign = -1 if (k // 2) % 2 else 1
    for s in _grid_points(20, k):
        plus = complex(completed_L(f, s).value)
        minus = complex(completed_L(f, -s).value)
        assert abs(plus - sign * minus) < 1e-11 * max(1.0, abs(plus))


@pytest.mark.parametrize("k", [12, 20, 26])
def test_completed_L_independent_of_table_length(k):
    short, long_ = eigenform(k, 500), eigenform(k, 1000)
    for s in (0.07 + 0.11j, -0.13 + 0.05j, 0.31):
        a, b = completed_L(short, s), completed_L(long_, s)
        assert a.terms_used < short.length
        assert abs(complex(a.value) - complex(b.value)) <= a.err_estimate + 1e-15 * abs(complex(b.value))
