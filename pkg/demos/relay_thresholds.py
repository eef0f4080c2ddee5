"""Detection thresholds on the two-hop molecular link.

Sweeps the destination threshold, then picks both thresholds per hop and
shows how far the error can fall as the number of released molecules grows.
Run: python demos/relay_thresholds.py
"""

from dataclasses import replace
import math

from scipy.special import erf

from hybridber import best_thresholds, load_preset, molecular_ber, molecular_ber_chain

link = load_preset("fig4_gy54").molecular

print("threshold_dest  p_mol")
for tau in range(30, 61, 5):
    print(f"{tau:14d}  {molecular_ber(replace(link, threshold_dest=tau)):.6f}")

# both evaluation paths give the same number at equal priors
print("closed form vs chain rule:", molecular_ber(link), molecular_ber_chain(link))

print("\nmolecules  tau_R  tau_D  best p_mol")
for q in (100, 1000, 10_000, 100_000):
    tr, td, ber = best_thresholds(replace(link, molecules_a=q, molecules_b=q))
    print(f"{q:9d}  {tr:5.0f}  {td:5.0f}  {ber:.4f}")

# The count variance carries a 0.25 Q^2 q^2 term, so its spread is at least half
# the signal.  Each hop then separates bit 0 from bit 1 by at most one standard
# deviation and the error cannot drop below this floor:
print(f"\nfloor: {0.5 - 0.5 * erf(1 / math.sqrt(2)) ** 2:.4f}")
