"""How likely is a released molecule to be inside the relay's sphere?

Three answers for the baseline geometry at several hop times: the Simpson
surrogate the BER model runs on, the exact in-sphere probability, and a
Brownian particle count.  Run: python demos/hit_probability.py
"""

from hybridber import (Hop, SimSpec, hit_probability, hit_probability_exact, load_preset,
                       simulate_hits)
from hybridber.channel import hop_query

scenario = load_preset("default")

print(f"{'hop ms':>7} {'surrogate':>11} {'exact':>11} {'particles':>11} {'+-':>9}")
for t_dmc_ms in (2, 3, 4, 6, 8):
    link = scenario.with_t_dmc(t_dmc_ms * 1e-3).molecular
    q = hop_query(link, Hop.TR)
    est = simulate_hits(SimSpec.from_query(q, 200_000, seed=1))
    print(f"{q.time * 1e3:7.1f} {hit_probability(q):11.3e} {hit_probability_exact(q):11.3e} "
          f"{est.p:11.3e} {est.se:9.1e}")

# The particle column tracks the exact one.  The surrogate integrates the
# density over the disc through the sphere's centre and stretches it by 4/3 of
# the radius, so it is low while the cloud is still arriving and high once the
# cloud is centred and tight around the receiver.
