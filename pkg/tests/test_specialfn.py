import math

import numpy as np
import pytest

from superradiance.errors import DomainError
from superradiance.specialfn import QuadratureRule, f1, f2, gaussian_expect, hyp_u_half

# Reference values computed with mpmath.hyperu at 30 decimal digits, an
# implementation independent of the integral representation used here.
U_REFERENCE = {
    1e-8: 1.1283790642451079,
    1e-4: 1.1278702591737542,
    0.5: 0.7988762974352382,
    1.0: 0.6809205902998781,
    2.0: 0.5548132113060852,
    1e4: 0.009999250140584,
}
TWO_OVER_SQRT_PI = 1.1283791670955126
F2_REFERENCE = {
    0.1: 0.9855320424836198,
    0.3: 0.8959907501503106,
    1.0: 0.5648908472456582,
    3.0: 0.2449022242755855,
    10.0: 0.07876522425062434,
    100.0: 0.00797690815247793,
}


@pytest.mark.parametrize("z,expected", sorted(U_REFERENCE.items()))
def test_hyp_u_half_against_independent_reference(z, expected):
    assert hyp_u_half(z) == pytest.approx(expected, rel=1e-10)


def test_hyp_u_half_matches_mpmath_at_random_points():
    # Cross-implementation consistency at 20 seeded random arguments.
    mpmath = pytest.importorskip("mpmath")
    rng = np.random.default_rng(314)
    zs = 10.0 ** rng.uniform(-4, 8, size=20)
    for z in zs:
        ref = float(mpmath.hyperu(mpmath.mpf(1) / 2, 0, mpmath.mpf(z)))
        assert hyp_u_half(z) == pytest.approx(ref, rel=1e-9)


def test_hyp_u_half_large_z_asymptote():
    # U(1/2, 0, z) ~ z^{-1/2} as z -> inf.
    z = 1e8
    assert hyp_u_half(z) * math.sqrt(z) == pytest.approx(1.0, abs=1e-4)


def test_hyp_u_half_small_z_limit():
    # U(1/2, 0, 0) = Gamma(1)/Gamma(3/2) = 2/sqrt(pi).
    assert hyp_u_half(1e-8) == pytest.approx(TWO_OVER_SQRT_PI, abs=1e-6)


def test_hyp_u_half_domain():
    with pytest.raises(DomainError):
        hyp_u_half(0.0)
    with pytest.raises(DomainError):
        hyp_u_half(-1.0)


def test_f1_limits_and_definition():
    assert f1(0.0) == 0.0
    assert f1(1.0) == pytest.approx(hyp_u_half(0.5), rel=1e-14)
    assert f1(1e6) == pytest.approx(TWO_OVER_SQRT_PI, rel=1e-6)


def test_f2_limits_and_reference_values():
    assert f2(0.0) == 1.0
    for r, expected in F2_REFERENCE.items():
        assert f2(r) == pytest.approx(expected, rel=1e-10)


def test_f2_large_r_asymptote():
    # f2 ~ sqrt(2/pi)/r for large sigma/delta.
    asymptote = math.sqrt(2.0 / math.pi)
    assert f2(10.0) == pytest.approx(asymptote / 10.0, rel=0.05)
    assert f2(100.0) == pytest.approx(asymptote / 100.0, rel=0.005)


def test_f1_f2_monotone_and_bounded():
    grid = np.linspace(0.0, 100.0, 1000)
    f1_vals = np.array([f1(r) for r in grid])
    f2_vals = np.array([f2(r) for r in grid])
    assert np.all(np.diff(f1_vals) > 0)
    assert np.all(np.diff(f2_vals) < 0)
    assert np.all((f2_vals > 0) & (f2_vals <= 1.0))


def test_gauss_hermite_rule_invariants():
    for order in (20, 200, 400):
        rule = QuadratureRule.gauss_hermite(order)
        assert rule.weights.sum() == pytest.approx(math.sqrt(math.pi), abs=1e-12)
        # Exact moments of the weight e^{-t^2}: sqrt(pi), sqrt(pi)/2, 3 sqrt(pi)/4.
        for degree, moment in ((0, math.sqrt(math.pi)),
                               (2, math.sqrt(math.pi) / 2.0),
                               (4, 3.0 * math.sqrt(math.pi) / 4.0)):
            value = float(rule.weights @ rule.nodes**degree)
            assert value == pytest.approx(moment, rel=1e-10)


def test_gaussian_expect_degenerate_sigma():
    assert gaussian_expect(lambda x: x * x, 0.0, mean=3.0) == 9.0


def test_gaussian_expect_identity_mean():
    for sigma, mean in ((0.5, 2.0), (3.0, -1.0), (10.0, 0.0)):
        assert gaussian_expect(lambda x: x, sigma, mean) == pytest.approx(mean, abs=1e-12)


def test_gaussian_expect_known_moments():
    # E[X^2] = mean^2 + sigma^2 for X ~ N(mean, sigma^2).
    assert gaussian_expect(lambda x: x * x, 2.0, mean=1.0) == pytest.approx(5.0, rel=1e-12)


@pytest.mark.parametrize("r", [0.1, 1.0, 10.0])
def test_gaussian_expect_matches_f2(r):
    got = gaussian_expect(lambda x: (1.0 + x * x) ** -1.5, sigma=r)
    assert got == pytest.approx(f2(r), abs=1e-8)


def test_gaussian_expect_matches_f2_including_fallback_regime():
    # sigma/delta = 100 needs ~1e6 Hermite nodes, far past the ladder cap;
    # the Gauss-Kronrod fallback must hold the same tolerance.
    for r in (30.0, 100.0):
        got = gaussian_expect(lambda x: (1.0 + x * x) ** -1.5, sigma=r)
        assert got == pytest.approx(f2(r), abs=1e-8)


def test_gaussian_expect_explicit_rule_is_plain_quadrature():
    rule = QuadratureRule.gauss_hermite(200)
    got = gaussian_expect(lambda x: np.cos(x), 1.0, rule=rule)
    assert got == pytest.approx(math.exp(-0.5), rel=1e-12)


def test_gaussian_expect_scalar_only_callable():
    def scalar_fn(x):
        return math.tanh(float(x))

    got = gaussian_expect(scalar_fn, 0.7, mean=0.3)
    ref = gaussian_expect(lambda x: np.tanh(x), 0.7, mean=0.3)
    assert got == pytest.approx(ref, rel=1e-12)


def test_gaussian_expect_negative_sigma_rejected():
    with pytest.raises(DomainError):
        gaussian_expect(lambda x: x, -1.0)
