"""Simulating the small-sample percentiles of the normality statistic.

The statistic converges to chi-square(2) slowly; at small n its upper
tail is far heavier.  Compare a fresh simulation with the shipped table.
"""

from pearsonq.simharness import run_percentiles
from pearsonq.testing import shipped_table

sizes = [10, 20, 50, 100]
fresh = run_percentiles("normality", sizes, 20_000, seed=6, threads=4)
shipped = shipped_table()
print(f"{'n':>5}  {'simulated P0.90..P0.99':>34}   {'shipped':>30}")
for n in sizes:
    sim = " ".join(f"{v:7.2f}" for v in fresh.rows[n])
    tab = " ".join(f"{v:7.2f}" for v in shipped.rows[n])
    print(f"{n:5}  {sim}   {tab}")
print(f"{'inf':>5}  " + " ".join(f"{v:7.2f}" for v in fresh.asymptotic))
