"""Link budget for a hybrid molecular / electromagnetic end-to-end channel.

A relay-assisted diffusion link (T -> R -> D) is followed by three BPSK
radio links (in2on-body, on-body, off-body).  The package computes each
link's bit error rate, combines them into the end-to-end BER, picks the
molecular/radio split of a fixed slot that minimises it, and checks the
molecular model against a Brownian particle simulation.
"""

from .channel import (ClampWarning, HitQuery, Hop, hit_pdf, hit_probability, hit_probability_exact,
                      hit_probability_raw, hit_probability_with_flag, hop_hit_probability)
from .combine import BerBreakdown, combine, combine_parity, combine_sums
from .config import (ConfigError, In2onConfig, MolecularLinkConfig, OffBodyConfig, OnBodyConfig,
                     Scenario, SlotBudget, Vector3, dump_scenario, load_preset, load_scenario,
                     parse_scenario, preset_names, with_overrides)
from .em import (LogNormalSnr, QuadratureError, erfc_prony, frustration, in2on_aber, in2on_snr_params,
                 lognormal_aber, lognormal_aber_frustration, lognormal_aber_prony, offbody_ber,
                 onbody_aber, onbody_snr_params)
from .molecular import (DegenerateVarianceError, DetectionStats, best_thresholds, cond_detect_one,
                        detection_stats, molecular_ber, molecular_ber_chain)
from .montecarlo import Estimate, SimSpec, simulate_hits, simulate_relay_ber
from .optimize import (IterationCapError, OptimizationResult, ber_profile, e2e_ber, optimize_split,
                       sublevel_feasible)

__all__ = [
    "ClampWarning", "HitQuery", "Hop", "hit_pdf", "hit_probability", "hit_probability_exact",
    "hit_probability_raw", "hit_probability_with_flag", "hop_hit_probability",
    "BerBreakdown", "combine", "combine_parity", "combine_sums", "ConfigError",
    "In2onConfig", "MolecularLinkConfig", "OffBodyConfig", "OnBodyConfig", "Scenario", "SlotBudget",
    "Vector3", "dump_scenario", "load_preset", "load_scenario", "parse_scenario", "preset_names",
    "with_overrides", "LogNormalSnr", "QuadratureError", "erfc_prony", "frustration", "in2on_aber",
    "in2on_snr_params", "lognormal_aber", "lognormal_aber_frustration", "lognormal_aber_prony",
    "offbody_ber", "onbody_aber", "onbody_snr_params", "DegenerateVarianceError", "DetectionStats",
    "best_thresholds", "cond_detect_one", "detection_stats", "molecular_ber", "molecular_ber_chain",
    "Estimate", "SimSpec", "simulate_hits", "simulate_relay_ber",
    "IterationCapError", "OptimizationResult", "ber_profile", "e2e_ber", "optimize_split",
    "sublevel_feasible",
]

__version__ = "0.1.0"
