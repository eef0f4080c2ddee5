"""Checking the analytic molecular model against particles.

Runs the same three checkpoints as ``hybridber validate`` at a modest size
and then shows the same relay simulation at an informative operating point.
Run: python demos/oracle_check.py
"""

from dataclasses import replace

from hybridber import best_thresholds, load_preset, molecular_ber, simulate_relay_ber, with_overrides
from hybridber.validation import validate

for c in validate(load_preset("default"), n_particles=200_000, n_bits=5_000, seed=42):
    print(f"{c.name:10s} analytic {c.analytic:.4e}  empirical {c.empirical:.4e}  "
          f"tolerance {c.tolerance:.1e}  {'pass' if c.passed else 'FAIL'}")

# At 4 ms both sides sit near 0.5, so the BER checkpoint passes easily.  With a
# longer symbol the model predicts a usable link, and the particles disagree.
link = with_overrides(load_preset("default"), {"slot.t_dmc_ms": 8}).molecular
tr, td, _ = best_thresholds(link)
link = replace(link, threshold_relay=tr, threshold_dest=td)
est = simulate_relay_ber(link, 5_000, seed=7)
print(f"\nt_dmc 8 ms, thresholds {tr:.0f}/{td:.0f}: model {molecular_ber(link):.3f}, "
      f"particles {est.p:.3f} +- {est.se:.3f}")
