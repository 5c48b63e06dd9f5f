"""
Seeded ensembles and scaling exponents
======================================

A small ensemble, kept short enough to run in about a minute.  The desk-scale
version is ``qwmix ensemble`` with the default config.  Slopes come from
least squares on (log n, log median).
"""

from qwmix import experiment
from qwmix.config import RunConfig

cfg = RunConfig(per_decade=64)
report = experiment.run_ensemble([32, 64, 128, 256], 0.5, 10, 0.1, cfg)

for fit in report.fits:
    verdict = "within" if fit.passed else "outside"
    print(f"{fit.quantity:16s} slope {fit.slope:6.3f} (r^2 {fit.r_squared:.3f}), "
          f"{verdict} {fit.predicted_slope} +/- {fit.tolerance}")

###############################################################################
# Bound-satisfaction fractions
# ----------------------------
# Checks that depend on the absolute constant C only get easier as C grows.

for C in (5, 10, 20):
    fr = experiment.bound_fractions(report.trials, C)
    print(f"C={C:2d}: second eigenvalue {fr['second_eigenvalue']:.2f}, "
          f"centered norm {fr['centered_norm']:.2f}, rigidity {fr['rigidity']:.2f}")

###############################################################################
# Every trial can be rebuilt from (n, p, seed)

t = report.trials[7]
assert experiment.run_trial(t.n, t.p, t.seed, 0.1, cfg) == t
print("trial", (t.n, t.p, t.seed), "reproduced exactly")
