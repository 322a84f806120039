"""Competitor normality tests and their calibration.

With parameters estimated from the sample, the usual e.d.f. critical
values are wrong (the Lilliefors situation), so critical values are
simulated under the normal null.  Here we calibrate at n = 50, then
compare power against gamma(a=5) data with the proposed test.
"""

from pearsonq import FamilySpec
from pearsonq.competitors import calibrate_critical_values
from pearsonq.simharness import ExperimentConfig, run_size_power

cvs = calibrate_critical_values("ks", [20, 50, 200], [0.05], reps=10_000, seed=4, threads=4)
print("KS (estimated parameters), 5% critical values")
for cv in cvs:
    print(f"  n={cv.n:<4} {cv.value:.4f}")

tests = ("normality", "ks", "bs", "d", "ad", "cvm", "za", "zc", "cm")
for family in ("normal", "gamma:a=5"):
    cfg = ExperimentConfig(FamilySpec.parse(family), (50,), 4000, 4, tests=tests,
                           outputs=("size_power",))
    res = run_size_power(cfg, threads=4)
    print(f"\nrejection rates at n=50 under {family}")
    for t in tests:
        r = res.rate(50, t)
        print(f"  {t:10} {r['rate']:.3f} +- {r['se']:.3f}")
