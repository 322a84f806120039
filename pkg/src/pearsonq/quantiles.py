"""Reference-distribution quantiles and tail probabilities.

Thin wrappers over :mod:`scipy.special`; the two-degree-of-freedom
chi-square quantile has the closed form ``-2 ln(alpha)``.
"""

import numpy as np
from scipy import special


def chi2_upper(alpha, df):
    """Upper-``alpha`` point of chi-square with ``df`` degrees of freedom."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    if df == 2:
        return -2.0 * np.log(alpha)
    # chdtri inverts the regularized upper incomplete gamma function.
    return float(special.chdtri(df, alpha))


def chi2_sf(x, df):
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, special.chdtrc(df, np.maximum(x, 0.0)), 1.0)
    return out[()] if out.ndim == 0 else out


def normal_upper(alpha):
    """Upper-``alpha`` point of the standard normal distribution."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    return float(-special.ndtri(alpha))


def normal_two_sided_p(z):
    return 2.0 * special.ndtr(-np.abs(z))
