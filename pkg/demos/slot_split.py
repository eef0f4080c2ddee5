"""Splitting one slot between the molecular hop pair and the radio links.

A longer molecular symbol helps the diffusion link and starves the radio
links.  The optimiser bisects on the end-to-end error level and reports the
best split.  Run: python demos/slot_split.py
"""

import numpy as np

from hybridber import ber_profile, load_preset, optimize_split
from hybridber.optimize import grid_search, local_minima

for name in ("default", "fig8_wx10", "fig8_wx70"):
    sc = load_preset(name)
    res = optimize_split(sc)
    bd = res.breakdown_opt
    print(f"{name}: t_dmc = {res.t_dmc_opt * 1e3:.3f} ms after {res.iterations} steps, "
          f"p_e2e = {res.p_e2e_opt:.4f}")
    print(f"    links: mol {bd.p_mol:.4f}  in2on {bd.p_in2on:.2e}  on {bd.p_on:.2e}  off {bd.p_off:.2e}")

    ts, vals = grid_search(sc, 2000)
    print(f"    grid minimum {vals.min():.4f} at {ts[vals.argmin()] * 1e3:.3f} ms, "
          f"{len(local_minima(vals))} local minimum")

sc = load_preset("default")
print("\nt_dmc ms  p_mol    p_e2e")
for t in np.linspace(1, 8.5, 6):
    bd = ber_profile(t * 1e-3, sc)
    print(f"{t:8.2f}  {bd.p_mol:.4f}  {bd.p_e2e:.4f}")
