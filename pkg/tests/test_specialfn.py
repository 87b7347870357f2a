import math

import mpmath
import numpy as np
import pytest

from errors import DomainError, PoleError
from precision import get_context
from specialfn import (Hyp2F1Args, beta, digamma, gamma, gamma_ratio, hyp2f1, hyp2f1_euler_oracle,
                       hyp2f1_param_grad, lattice_sum_check, log_gamma, upper_incomplete_gamma, zeta)

FP = mpmath.fp
DD = get_context("double-double")


def rel(a, b):
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1e-300)


def sample_points(count, seed, box=5.0):
    """Random points at distance >= 0.1 from the poles of Gamma"""
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < count:
        x, y = rng.uniform(-box, box, size=2)
        z = complex(x, y)
        if abs(y) < 0.1 and x < 0.5 and abs(x - round(x)) < 0.1:
            continue
        points.append(z)
    return points


# ----------------------------------------------------------------
# Gamma family

def test_gamma_integers_and_half():
    for n in range(1, 15):
        assert rel(gamma(n), math.factorial(n - 1)) < 1e-14
    assert rel(gamma(0.5), math.sqrt(math.pi)) < 1e-14


def test_gamma_recurrence_residual():
    worst = max(rel(gamma(z + 1), z * gamma(z)) for z in sample_points(500, 1))
    assert worst < 1e-12


def test_gamma_reflection_residual():
    worst = 0.0
    for z in sample_points(500, 2):
        lhs = gamma(z) * gamma(1 - z)
        worst = max(worst, rel(lhs, FP.pi / FP.sin(FP.pi * z)))
    assert worst < 1e-12


def test_gamma_matches_mpmath():
    for z in sample_points(50, 3):
        assert rel(gamma(z), mpmath.gamma(z)) < 1e-12


def test_gamma_poles():
    for z in (0, -1, -7):
        with pytest.raises(PoleError):
            gamma(z)


def test_log_gamma_consistent_with_gamma():
    for z in sample_points(100, 4):
        if z.real <= 0.2:
            continue
        assert rel(FP.exp(log_gamma(z)), gamma(z)) < 1e-12


def test_log_gamma_rejects_left_half_plane():
    with pytest.raises(DomainError):
        log_gamma(-0.5 + 1j)


def test_extended_gamma_beyond_double():
    z = mpmath.mpc("3.3", "1.7")
    with mpmath.workprec(130):
        exact = mpmath.gamma(z)
        value = mpmath.mpmathify(gamma(z, DD))
        assert abs(value - exact) / abs(exact) < 1e-28


def test_beta_and_gamma_ratio():
    assert rel(beta(2, 3), 1 / 12) < 1e-14
    assert rel(beta(0.3 + 0.4j, 1.7), beta(1.7, 0.3 + 0.4j)) < 1e-14
    assert rel(gamma_ratio(10.5, 8.5), 9.5 * 8.5) < 1e-13


def test_digamma():
    assert rel(digamma(1), -0.57721566490153286) < 1e-14
    for z in sample_points(50, 5):
        expected = complex(mpmath.digamma(z))
        assert abs(complex(digamma(z)) - expected) < 1e-11 * max(1.0, abs(expected))


def test_upper_incomplete_gamma():
    for s, x in ((6.1 + 0.2j, 2.0), (6.1 + 0.2j, 10.0), (6.0, 40.0), (-0.3 + 0.5j, 3.0), (11.0, 4 * math.pi)):
        assert rel(upper_incomplete_gamma(s, x), mpmath.gammainc(s, a=x)) < 1e-11


def test_upper_incomplete_gamma_needs_positive_x():
    with pytest.raises(DomainError):
        upper_incomplete_gamma(2.0, 0.0)


# ----------------------------------------------------------------
# zeta

def test_zeta_special_values():
    assert rel(zeta(2), math.pi ** 2 / 6) < 1e-14
    assert rel(zeta(4), math.pi ** 4 / 90) < 1e-14
    assert zeta(0) == -0.5
    assert rel(zeta(-1), -1 / 12) < 1e-13
    assert abs(zeta(-2)) < 1e-14


def test_zeta_matches_mpmath():
    for s in (0.3 + 2j, 5 - 1j, -3.5, 0.5 + 14.134725j, 1.2 + 30j, -2.5 + 4j):
        expected = complex(mpmath.zeta(s))
        assert abs(complex(zeta(s)) - expected) / max(1.0, abs(expected)) < 1e-11


def test_zeta_functional_equation_on_critical_line():
    worst = 0.0
    for t in np.linspace(1.0, 40.0, 25):
        s = complex(0.5, t)
        chi = 2 ** s * math.pi ** (s - 1) * FP.sin(FP.pi * s / 2) * gamma(1 - s)
        value = complex(zeta(s))
        worst = max(worst, abs(value - complex(chi * zeta(1 - s))) / max(1.0, abs(value)))
    assert worst < 1e-11


def test_zeta_pole():
    with pytest.raises(PoleError):
        zeta(1)


def test_zeta_extended():
    s = mpmath.mpc("0.5", "6")
    with mpmath.workprec(130):
        exact = mpmath.zeta(s)
        value = mpmath.mpmathify(zeta(s, DD))
        assert abs(value - exact) < 1e-28


# ----------------------------------------------------------------
# 2F1

HYP_TUPLES = [(0.3 + 0.2j, 1.5, 3.1, 0.6), (6.0, 5.9 + 0.1j, 12.0, -0.4), (2.5 - 0.3j, 0.8, 2.2 + 0.5j, 0.9),
              (1.0, 2.0, 4.5, -3.0), (6.0, 6.0, 12.0, -0.05), (5.8, 6.1, 12.0, 0.25),
              (6.0, -5.0, 1.0, 0.75), (6.1 + 0.1j, -4.9 + 0.1j, 1.2, 0.5), (0.5, 0.5, 1.5, 0.95),
              (3.0, 1.2, 2.5, -12.0)]


@pytest.mark.parametrize("a,b,c,x", HYP_TUPLES)
def test_hyp2f1_matches_mpmath(a, b, c, x):
    value = hyp2f1(Hyp2F1Args(a, b, c, x)).value
    assert rel(value, mpmath.hyp2f1(a, b, c, x)) < 1e-10


def test_hyp2f1_euler_oracle():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        b = rng.uniform(0.5, 3.0)
        c = b + rng.uniform(0.5, 3.0)
        a = complex(rng.uniform(-2.0, 4.0), rng.uniform(-0.5, 0.5))
        x = rng.uniform(-2.0, 0.9)
        worst = max(worst, rel(hyp2f1(Hyp2F1Args(a, b, c, x)).value, hyp2f1_euler_oracle(a, b, c, x)))
    assert worst < 1e-9


def test_hyp2f1_terminating_polynomial():
    # F(-2, b; c; x) = 1 - 2 b x / c + b (b + 1) x^2 / (c (c + 1))
    b, c, x = 1.5, 2.5, -7.0
    expected = 1 - 2 * b * x / c + b * (b + 1) * x ** 2 / (c * (c + 1))
    assert rel(hyp2f1(Hyp2F1Args(-2, b, c, x)).value, expected) < 1e-14


def test_hyp2f1_rejects_bad_arguments():
    with pytest.raises(DomainError):
        hyp2f1(Hyp2F1Args(1.0, 1.0, -2.0, 0.3))
    with pytest.raises(DomainError):
        hyp2f1(Hyp2F1Args(1.0, 1.0, 2.0, 0.97))


def _finite_difference(a, b, c, x, h=1e-5):
    def f(aa, bb, cc):
        return complex(hyp2f1(Hyp2F1Args(aa, bb, cc, x)).value)

    return ((f(a + h, b, c) - f(a - h, b, c)) / (2 * h),
            (f(a, b + h, c) - f(a, b - h, c)) / (2 * h),
            (f(a, b, c + h) - f(a, b, c - h)) / (2 * h))


def test_param_grad_matches_finite_differences():
    rng = np.random.default_rng(11)
    tuples = [(6.0, -5.0, 1.0, 0.4), (8.0, -7.0, 1.0, 0.8), (6.0, -5.0, 1.0, -0.5)]
    while len(tuples) < 50:
        a, b = rng.uniform(0.5, 6.0, size=2)
        c = rng.uniform(1.0, 12.0)
        x = rng.uniform(-1.5, 0.8)
        tuples.append((a, b, c, x))
    for a, b, c, x in tuples:
        grad = hyp2f1_param_grad(Hyp2F1Args(a, b, c, x))
        numeric = _finite_difference(a, b, c, x)
        for exact, approx in zip(grad, numeric):
            assert abs(complex(exact) - approx) < 1e-6 * max(1.0, abs(approx))


# ----------------------------------------------------------------
# lattice sum

def test_lattice_sum_identity():
    for z in (0.1 + 0.9j, -0.3 + 1.1j, 0.45 + 0.7j, 0.2 + 1.5j, 1j):
        assert lattice_sum_check(z, 12) < 1e-10


def test_lattice_sum_domain():
    with pytest.raises(DomainError):
        lattice_sum_check(0.3 - 0.1j, 12)


@pytest.mark.parametrize("k", [12, 26])
@pytest.mark.parametrize("x", [0.8, 0.9, 0.95])
def test_param_grad_terminating_b_near_one(k, x):
    h = k // 2
    grad = hyp2f1_param_grad(Hyp2F1Args(h, 1 - h, 1, x))
    with mpmath.workdps(40):
        a, b, c, z = mpmath.mpf(h), mpmath.mpf(1 - h), mpmath.mpf(1), mpmath.mpf(x)
        expected = (mpmath.diff(lambda t: mpmath.hyp2f1(t, b, c, z), a),
                    mpmath.diff(lambda t: mpmath.hyp2f1(a, t, c, z), b),
                    mpmath.diff(lambda t: mpmath.hyp2f1(a, b, t, z), c))
        expected = [complex(e) for e in expected]
    for value, ref in zip(grad, expected):
        assert abs(complex(value) - ref) < 1e-9 * max(1.0, abs(ref))


# F(k/2 - s2, 1 - k/2 - s2; 1 + s1 - s2; x), the shape of the middle-cell kernel
CANCELLING = [(22, 7 / 8), (26, 5 / 6), (26, 0.5), (20, 0.9), (26, 0.95)]


@pytest.mark.parametrize("k,x", CANCELLING)
def test_hyp2f1_cancelling_series(k, x):
    s1, s2 = 0.07 + 0.11j, -0.13 + 0.05j
    h = k // 2
    a, b, c = h - s2, 1 - h - s2, 1 + s1 - s2
    result = hyp2f1(Hyp2F1Args(a, b, c, x))
    with mpmath.workdps(40):
        expected = complex(mpmath.hyp2f1(mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(c), mpmath.mpf(x)))
    assert rel(result.value, expected) < 1e-11
    assert result.err_estimate > 0


def test_hyp2f1_error_estimate_covers_rounding():
    # alternating terms far larger than the sum
    result = hyp2f1(Hyp2F1Args(13.0, -12.13, 1.2, 0.9))
    with mpmath.workdps(40):
        expected = complex(mpmath.hyp2f1(13, mpmath.mpf(-12.13), mpmath.mpf(1.2), mpmath.mpf(0.9)))
    assert abs(complex(result.value) - expected) <= result.err_estimate + 1e-15 * abs(expected)


ETA_ZEROS = [complex(1, 2 * math.pi * j / math.log(2)) for j in (1, 2, 3, 5)]


@pytest.mark.parametrize("s", ETA_ZEROS)
def test_zeta_at_zeros_of_eta_factor(s):
    for offset in (0, 1e-6, 1e-3j, 0.05, -0.04 + 0.02j):
        point = s + offset
        with mpmath.workdps(30):
            expected = complex(mpmath.zeta(point))
        assert rel(zeta(point), expected) < 1e-11


def test_zeta_at_zero_of_eta_factor_extended():
    s = mpmath.mpc(1, 2 * mpmath.pi / mpmath.log(2))
    with mpmath.workprec(130):
        exact = mpmath.zeta(s)
        value = mpmath.mpmathify(zeta(s, DD))
        assert abs(value - exact) / abs(exact) < 1e-28
