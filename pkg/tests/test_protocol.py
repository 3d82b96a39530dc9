import math
from dataclasses import replace

import numpy as np
import pytest

from thermorecycle import protocol as P
from thermorecycle import qstate as q
from thermorecycle.bath import INFEASIBLE
from thermorecycle.errors import DomainError
from thermorecycle.hhl import HhlParams

from oracles import binary_entropy

GRID17 = np.linspace(0, math.pi / 4, 17)
GRID5 = [i * math.pi / 16 for i in range(5)]
SIMPLE = HhlParams(angle_mode="simplified")
EXACT = HhlParams(angle_mode="exact")
NOISY = P.NoiseModel(enabled=True)


def cfg(**kw):
    return P.ProtocolConfig(**kw)


def test_config_validation():
    with pytest.raises(DomainError):
        cfg(p_x=0.7)
    with pytest.raises(DomainError):
        cfg(theta_b=1.0)


def test_reference_equality_and_ratio():
    c = cfg(p_x=0.4)
    r = P.run_reference(c)
    p_th = c.bath.thermal.populations[1]
    assert r.delta_Q == pytest.approx(0.4 - p_th, rel=1e-12)
    assert r.delta_Q == pytest.approx(r.q_tight, rel=1e-9)
    assert r.q_tight / r.q_landauer == pytest.approx(3.41, abs=0.01)
    assert r.delta_Q == pytest.approx(0.39624, abs=1e-5)
    assert r.gain == pytest.approx(0, abs=1e-12)


def test_reference_edge_cases():
    c = cfg()
    p_th = c.bath.thermal.populations[1]
    r = P.run_reference(replace(c, p_x=p_th))
    assert r.delta_S == pytest.approx(0, abs=1e-12)
    assert r.delta_Q == pytest.approx(0, abs=1e-12)
    r0 = P.run_reference(replace(c, p_x=0.0))
    assert r0.erasure_failed and r0.delta_S < 0


@pytest.mark.parametrize("hhl", [SIMPLE, EXACT, HhlParams(C=0.5)])
def test_noiseless_recycling_equality(hhl):
    for th in GRID17:
        r = P.run_recycling(cfg(theta_b=th, hhl=hhl))
        if r.degenerate_branch:
            continue
        assert abs(r.equality_gap) <= 1e-9


def test_simplified_degenerate_endpoint():
    r = P.run_recycling(cfg(theta_b=math.pi / 4, hhl=SIMPLE))
    assert r.degenerate_branch
    assert r.delta_Q is None and r.bounds is None
    assert r.p_fail < 1e-12


def test_simplified_failure_state_is_fixed():
    # under the default labels only the lambda = 3 component can fail at theta_1 = pi
    for th in GRID5[:-1]:
        r = P.run_recycling(cfg(theta_b=th, hhl=SIMPLE))
        assert r.rho_ath[1, 1].real == pytest.approx(0.5, abs=1e-9)
        assert r.delta_Q == pytest.approx(-0.1, abs=1e-9)
        assert r.delta_S == pytest.approx(float(binary_entropy(0.4)), abs=1e-9)
        assert r.q_tight is INFEASIBLE and "tight_infeasible" in r.flags


def test_swapped_labels_endpoint():
    r = P.run_recycling(cfg(theta_b=math.pi / 4, hhl=HhlParams(angle_mode="simplified", success_outcome=0)))
    np.testing.assert_allclose(r.rho_ath, np.full((2, 2), 0.5), atol=1e-9)
    assert r.delta_S == pytest.approx(0.6730, abs=1e-4)
    assert r.delta_Q == pytest.approx(-0.1, abs=1e-9)
    assert r.delta_Q < 0 < r.q_landauer


@pytest.mark.parametrize("hhl", [HhlParams(C=0.5), HhlParams(angle_mode="simplified", success_outcome=0)])
def test_heat_decreases_along_sweep(hhl):
    dq = [P.run_recycling(cfg(theta_b=th, hhl=hhl)).delta_Q for th in GRID5]
    assert all(a > b for a, b in zip(dq, dq[1:]))


def test_heat_follows_failure_populations():
    for th in GRID5[:-1]:
        c = cfg(theta_b=th, hhl=HhlParams(C=0.5))
        r = P.run_recycling(c)
        assert r.delta_Q == pytest.approx(0.4 - r.rho_ath[1, 1].real, abs=1e-12)


@pytest.mark.parametrize("hhl", [SIMPLE, HhlParams(C=0.5)])
@pytest.mark.parametrize("p_x", [0.2, 0.4, 0.5])
def test_noisy_bound_compliance_and_bookkeeping(hhl, p_x):
    for th in GRID5:
        r = P.run_recycling(cfg(theta_b=th, p_x=p_x, hhl=hhl, noise=NOISY))
        if r.bounds is None:
            continue
        assert r.delta_Q >= r.q_ath - 1e-8
        assert r.bath_entropy_final - r.bath_entropy_initial >= r.delta_S - 1e-8


def test_noisy_run_has_finite_tight_bound():
    r = P.run_recycling(cfg(theta_b=0.3, noise=NOISY))
    assert r.q_tight is not INFEASIBLE
    assert r.delta_Q < r.q_tight


def test_noisy_fidelity_band():
    fids = [P.run_recycling(cfg(theta_b=th, noise=NOISY)).fidelity_success for th in GRID5]
    assert all(0.9 < f < 0.99 for f in fids)


def test_latency_degrades_gain():
    for hhl in (SIMPLE, HhlParams(C=0.5)):
        gains = []
        for lat in (1e-6, 1.0, 3.3, 10.0, 50.0, 200.0):
            nm = P.NoiseModel(enabled=True, p1=0, p2=0, duration_algo=1e-9, latency_ff=lat, comp_init_excitation=0.0)
            r = P.run_recycling(cfg(theta_b=0.5, p_x=0.3, hhl=hhl, noise=nm))
            gains.append(r.q_tight - r.delta_Q)
        assert all(a >= b - 1e-12 for a, b in zip(gains, gains[1:]))


def test_comp_excitation_knob():
    assert cfg().comp_excitation == 0.0
    c = cfg(noise=NOISY)
    assert c.comp_excitation == pytest.approx(c.bath.thermal.populations[1])
    assert cfg(noise=replace(NOISY, comp_init_excitation=0.01)).comp_excitation == 0.01


def test_determinism_with_tomography():
    c = cfg(theta_b=0.2, noise=NOISY, seed=9)
    a, b = P.run_recycling(c, trial=2), P.run_recycling(c, trial=2)
    assert a.delta_Q == b.delta_Q and a.delta_S == b.delta_S and a.fidelity_success == b.fidelity_success
    other = P.run_recycling(c, trial=3)
    assert other.delta_Q != a.delta_Q


def test_zero_shots_is_exact():
    c = cfg(theta_b=0.2, noise=NOISY, shots_per_basis=0)
    assert P.run_recycling(c, trial=1).delta_Q == P.run_recycling(c).delta_Q


def test_sweep_counting():
    t = P.sweep(cfg(trials=5, shots_per_basis=500), "theta_b", [0.1])
    assert len(t.rows) == 5 and len(t.medians) == 1
    t = P.sweep(cfg(trials=5, shots_per_basis=500), "theta_b", GRID5)
    assert len(t.rows) == 25 and len(t.medians) == 5
    with pytest.raises(DomainError):
        P.sweep(cfg(), "theta_b", [])


def test_sweep_parallel_matches_serial():
    template = cfg(trials=2, shots_per_basis=400, noise=NOISY)
    a = P.sweep(template, "p_x", [0.2, 0.4], workers=1)
    b = P.sweep(template, "p_x", [0.2, 0.4], workers=2)
    assert [r.result.delta_Q for r in a.rows] == [r.result.delta_Q for r in b.rows]
    assert [m.metrics for m in a.medians] == [m.metrics for m in b.medians]


def test_sweep_medians_skip_failed_erasures():
    t = P.sweep(cfg(trials=3, shots_per_basis=0), "p_x", [0.0, 0.4], runner=P.run_reference)
    assert all(r.result.erasure_failed for r in t.rows if r.value_index == 0)
    assert t.medians[0].metrics["delta_Q"] is None
    assert t.medians[0].metrics["p_fail"] is not None
    assert t.medians[1].metrics["delta_Q"] == pytest.approx(t.rows[-1].result.delta_Q)


def test_bath_frequency_sweep():
    t = P.sweep(cfg(theta_b=0.3, trials=1, shots_per_basis=0, noise=NOISY), "bath_freq_ghz", [3, 5, 7])
    T0s = [P.default_bath(f).T0 for f in (3, 5, 7)]
    assert T0s[0] > T0s[1] > T0s[2]
    for row in t.rows:
        r = row.result
        assert r.delta_Q >= r.q_ath - 1e-8
        assert r.delta_Q < r.q_landauer
