"""The three radio links against symbol duration.

The in2on-body and on-body links average BPSK over log-normal shadowing by
Gauss-Hermite quadrature; the off-body link is Rayleigh.  The closed form
built from the Frustration function reproduces the quadrature once erfc is
swapped for its three-exponential fit.  Run: python demos/em_links.py
"""

from hybridber import (in2on_aber, in2on_snr_params, load_preset, lognormal_aber_frustration,
                       lognormal_aber_prony, offbody_ber, onbody_aber)

sc = load_preset("default")

print(f"{'t_sym ms':>8} {'in2on':>10} {'on-body':>10} {'off-body':>10}")
for t_ms in (0.5, 1.0, 1.5, 2.0, 3.0):
    t = t_ms * 1e-3
    print(f"{t_ms:8.1f} {in2on_aber(sc.in2on, t):10.3e} {onbody_aber(sc.onbody, t):10.3e} "
          f"{offbody_ber(sc.offbody, t):10.3e}")

snr = in2on_snr_params(sc.in2on, 1.5e-3)
print(f"\nin2on at 1.5 ms: mu_gamma = {snr.mu_gamma:.3f}, sigma_gamma = {snr.sigma_gamma:.3f}")
print(f"  exact erfc          {in2on_aber(sc.in2on, 1.5e-3):.6e}")
print(f"  exponential fit     {lognormal_aber_prony(snr):.6e}")
print(f"  Frustration closed  {lognormal_aber_frustration(snr):.6e}")
