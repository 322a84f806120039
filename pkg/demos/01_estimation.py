"""Estimating the quadratic q(x) from data.

For gamma(a=3, theta=1) the quadratic is linear: delta = 0,
beta = theta = 1 and gamma = a * theta^2 = 3.  We draw a
sample, estimate, attach delta-method standard errors, and compare with
the truth.  Then the same for a Poisson sample using the discrete
estimator, whose target is delta = beta = 0, gamma = lambda.
"""

import numpy as np

from pearsonq import (Case, FamilySpec, Sample, asymptotic_cov, central_moments, estimate,
                      substream, true_q_params)
from pearsonq.distributions import draw

for text, n in (("gamma:a=3", 2000), ("poisson:lambda=6", 2000)):
    spec = FamilySpec.parse(text)
    x = draw(spec, substream(1, "demo-estimation", 0).generator(), n)
    s = Sample(np.asarray(x, dtype=float), spec.case)
    ms = central_moments(s, 8)
    qp = estimate(ms, spec.case)
    se = asymptotic_cov(ms, spec.case).standard_errors(n)
    truth = true_q_params(spec)
    print(f"\n{spec}  (n={n}, {spec.case.value} estimator)")
    print(f"{'':8}{'estimate':>10}{'se':>9}{'true':>9}")
    for name, est, err, true in zip(("delta", "beta", "gamma"), qp.as_tuple(), se[1:],
                                    truth.as_tuple()):
        print(f"{name:8}{est:10.4f}{err:9.4f}{true:9.4f}")

# The smallest case with a nondegenerate q: three equally likely points.
qp = estimate(central_moments(Sample(np.array([-1.0, 0.0, 1.0]), Case.DISCRETE), 4), Case.DISCRETE)
print(f"\n[-1, 0, 1] discrete: delta={qp.delta:g} beta={qp.beta:g} gamma={qp.gamma:g}")
