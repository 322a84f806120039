import math

import numpy as np
import pytest
from scipy import integrate, optimize

from pearsonq.quantiles import chi2_sf, chi2_upper, normal_two_sided_p, normal_upper


def chi2_pdf(x, k):
    return x ** (k / 2 - 1) * math.exp(-x / 2) / (2 ** (k / 2) * math.gamma(k / 2))


def quad_upper(alpha, k):
    """Quantile by root-finding on the integrated density (independent oracle)."""
    def tail(c):
        return integrate.quad(chi2_pdf, c, np.inf, args=(k,), epsabs=1e-14, epsrel=1e-13)[0] - alpha
    return optimize.brentq(tail, 1e-6, 200, xtol=1e-13)


def test_chi2_3_quantile():
    ref = quad_upper(0.05, 3)
    assert ref == pytest.approx(7.8147, abs=5e-5)
    assert chi2_upper(0.05, 3) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("alpha", [0.10, 0.05, 0.025, 0.01])
def test_chi2_2_closed_form(alpha):
    assert chi2_upper(alpha, 2) == pytest.approx(quad_upper(alpha, 2), abs=1e-9)
    assert chi2_upper(alpha, 2) == pytest.approx(-2 * math.log(alpha), abs=1e-14)


def test_table_asymptotic_row():
    assert [round(chi2_upper(a, 2), 2) for a in (0.10, 0.05, 0.025, 0.01)] == [4.61, 5.99, 7.38, 9.21]


def test_chi2_sf_consistency():
    for k in (2, 3):
        for a in (0.2, 0.05, 0.001):
            assert chi2_sf(chi2_upper(a, k), k) == pytest.approx(a, abs=1e-12)
    assert chi2_sf(-1.0, 3) == 1.0


def test_normal_quantile_oracle():
    pdf = lambda z: math.exp(-z * z / 2) / math.sqrt(2 * math.pi)  # noqa: E731
    for alpha in (0.025, 0.05, 0.005):
        ref = optimize.brentq(lambda c: integrate.quad(pdf, c, np.inf, epsabs=1e-15)[0] - alpha,
                              0, 10, xtol=1e-13)
        assert normal_upper(alpha) == pytest.approx(ref, abs=1e-9)
    assert normal_two_sided_p(normal_upper(0.025)) == pytest.approx(0.05, abs=1e-12)


def test_bad_alpha():
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            chi2_upper(bad, 3)
        with pytest.raises(ValueError):
            normal_upper(bad)
