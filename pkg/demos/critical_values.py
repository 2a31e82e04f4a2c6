"""Tabulate simulated critical values and check them against theory.

For a single sample the limit laws have classical closed forms: the
squared bridge statistic follows the Kolmogorov law squared (95% point
1.358^2) and the known-target statistic the reflection law (95% point
2.2414^2).  The table below reproduces both and then extends to several
samples, where only simulation is available.
"""

from covcusum import limits
from covcusum.limits import CritValRequest

print("single sample, closed-form anchors:")
print(f"  bridge 95% point   (theory 1.844): "
      f"{limits.critical_value(CritValRequest(kind='q-breve', K=1, level=0.95, seed=5)):.4f}")
print(f"  known-target 95%   (theory 5.024): "
      f"{limits.critical_value(CritValRequest(kind='q', K=1, level=0.95, seed=5)):.4f}")

print("\nsum-of-squares bridge statistic, level 0.95:")
rows = limits.critical_value_table(
    [CritValRequest(kind="q-breve", K=k, level=0.95, seed=5)
     for k in (1, 2, 4, 6)])
for kind, K, level, value, *_ in rows:
    print(f"  K={K}: {value:.4f}")

print("\npooled bridge statistic with unequal scales, level 0.95:")
req = CritValRequest(kind="v-breve", K=4, level=0.95,
                     alpha_weights=(1.0, 1.5, 0.7, 1.0),
                     kappa=(100 / 380, 120 / 380, 70 / 380, 90 / 380),
                     seed=5)
print(f"  K=4: {limits.critical_value(req):.4f}")
