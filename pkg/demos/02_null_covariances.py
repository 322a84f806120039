"""Where the test statistics come from.

The delta method turns the covariance of the first four sample moments
into the asymptotic covariance of (mean, delta, beta, gamma).  At the
normal law the (delta, beta) block is diag(2/3, 3 sigma^2/2), which
gives the chi-square(2) normality statistic.  For the Poisson law the
block for (delta, beta, variance - mean) has determinant 2 lambda^3; we
check that numerically and show how the alternative matrix with the
constant 9/(6 lambda) missing from the (beta, beta) entry becomes
indefinite for small lambda.
"""

import numpy as np

from pearsonq import Case, FamilySpec, asymptotic_cov, population_moments
from pearsonq.asymptotics import null_cov_normality, null_cov_poisson, poisson_tau_cov

ms = population_moments(FamilySpec.parse("normal:mu=0,sigma2=2"), 8)
print("normal(0, 2): composed (delta, beta) block")
print(asymptotic_cov(ms, Case.CONTINUOUS).d[1:3, 1:3].round(12))
print("closed form:\n", null_cov_normality(2.0))

print("\nPoisson: composed vs closed form, and determinants")
print(f"{'lambda':>7}{'max|diff|':>12}{'det':>12}{'2 lam^3':>10}{'alt det':>10}{'alt min eig':>13}")
for lam in (0.5, 1.0, 1.5, 2.0, 5.0):
    d = poisson_tau_cov(population_moments(FamilySpec.parse(f"poisson:lambda={lam}"), 8))
    c = null_cov_poisson(lam)
    alt = null_cov_poisson(lam, printed=True)
    print(f"{lam:7.2f}{np.abs(d - c).max():12.1e}{np.linalg.det(c):12.4f}{2 * lam ** 3:10.4f}"
          f"{np.linalg.det(alt):10.4f}{np.linalg.eigvalsh(alt).min():13.4f}")
