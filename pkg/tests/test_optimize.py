import math
from dataclasses import replace

import numpy as np
import pytest

from hybridber import ber_profile, e2e_ber, load_preset, optimize_split, sublevel_feasible
from hybridber.optimize import (GOLDEN_RTOL, MAX_ITERATIONS, golden_section, grid_search, local_minima,
                                search_bracket)


@pytest.mark.parametrize("eps", [0.5, 0.1, 1e-4, 1e-6])
def test_iteration_count(default_scenario, eps):
    assert optimize_split(default_scenario, eps).iterations == math.ceil(math.log2(1 / eps))


def test_deterministic(default_scenario):
    assert optimize_split(default_scenario) == optimize_split(default_scenario)


@pytest.mark.parametrize("name", ["default", "fig4_gy54", "fig8_wx70"])
def test_beats_coarse_grid(name):
    sc = load_preset(name)
    res = optimize_split(sc)
    ts, vals = grid_search(sc, 1500)
    assert res.p_e2e_opt <= vals.min() + res.epsilon
    assert res.converged and not res.flat
    assert 0 < res.t_dmc_opt < sc.slot.t_total
    assert res.iterations <= MAX_ITERATIONS
    assert abs(res.t_dmc_opt - ts[vals.argmin()]) <= ts[1] - ts[0]


def test_result_consistent(default_scenario):
    res = optimize_split(default_scenario)
    assert res.breakdown_opt == ber_profile(res.t_dmc_opt, default_scenario)
    assert res.p_e2e_opt <= res.level


@pytest.mark.parametrize("name", ["default", "fig5_t3ms", "fig8_wx10"])
def test_unimodal_profile(name):
    _, vals = grid_search(load_preset(name), 2000)
    assert len(local_minima(vals)) == 1


def test_local_minima_helper():
    assert local_minima(np.array([3, 2, 1, 2, 3.0])) == [2]
    assert local_minima(np.array([3, 1, 2, 1, 3.0])) == [1, 3]
    assert local_minima(np.array([2, 1, 1, 1, 2.0])) == [1]


def test_sublevel_bounds(default_scenario):
    assert sublevel_feasible(0.0, default_scenario) is None
    t = sublevel_feasible(1.0, default_scenario)
    assert t is not None and e2e_ber(t, default_scenario) <= 1.0
    with pytest.raises(ValueError):
        sublevel_feasible(1.5, default_scenario)


def test_flat_objective(default_scenario):
    m = replace(default_scenario.molecular, threshold_relay=-math.inf)
    sc = replace(default_scenario, molecular=m)
    res = optimize_split(sc)
    assert res.flat and res.converged
    assert res.t_dmc_opt == sc.slot.t_total / 2
    assert res.p_e2e_opt == pytest.approx(0.5, abs=1e-12)


def test_golden_section_quadratic():
    res = golden_section(lambda x: (x - 0.3) ** 2, 0.0, 1.0, 1e-9)
    assert res.hi - res.lo <= 1e-9
    assert res.x == pytest.approx(0.3, abs=1e-8)
    early = golden_section(lambda x: (x - 0.3) ** 2, 0.0, 1.0, 1e-9, level=0.01)
    assert early.hit_level and early.fx <= 0.01 and early.evaluations < res.evaluations


def test_bracket_margins(default_scenario):
    lo, hi = search_bracket(default_scenario)
    assert lo == 1e-6 and hi == pytest.approx(default_scenario.slot.t_total - 1e-6)
    assert GOLDEN_RTOL * default_scenario.slot.t_total == pytest.approx(9e-9)


def test_profile_rejects_outside_slot(default_scenario):
    with pytest.raises(ValueError):
        ber_profile(0.0, default_scenario)


def test_bad_epsilon(default_scenario):
    with pytest.raises(ValueError):
        optimize_split(default_scenario, 0.0)
