"""Static-split solver tests: transform values, fixed-tau solves, full search.

Frozen constants come from tests/oracles/scalar_refs.py (instances D and G);
rerun that script to regenerate.
"""

import cmath
import math

import numpy as np
import pytest

from relaysec import model, oracle
from relaysec.model import ChannelSet
from relaysec.sps import SpsData, solve_h1, solve_p1, sps_transform, tau_min_1

from conftest import mk_params, mk_scenario

REL = 1e-12

# instance D: single-relay transform at alpha_bar = 0.55
D_H_SD = 2.8978894135151306e-06 - 1.2252079926873064e-06j
D_DHAT_SD = 1.10232169207824e-14
D_H_SE = -2.3360739359587337e-06 + 3.3299926393684e-07j
D_DHAT_SE = 6.200559517940099e-15
D_W0 = 2.4750000000000002e-05
# instance G: H1 values on the same instance with no eavesdropper present
G_H1 = {0.3: 0.002966699333899203,
        0.6: 0.005933398667798406,
        0.9: 0.008900098001697608}


def instance_a_channels(k=1):
    h_sr = np.array([3e-3 * cmath.exp(0.7j)])
    h_rd = np.array([2e-3 * cmath.exp(-1.1j)])
    if k == 0:
        h_re = np.zeros((1, 0), dtype=complex)
    else:
        h_re = np.array([[1.5e-3 * cmath.exp(2.3j)]])
    return ChannelSet(h_sr=h_sr, h_rd=h_rd, h_re=h_re)


# -- transform

def test_transform_frozen_single_relay():
    params = mk_params(1, 1)
    data = sps_transform(params, instance_a_channels(), 0.55)
    assert data.h_tilde_sd[0] == pytest.approx(D_H_SD, rel=REL)
    assert data.D_hat_sd[0] == pytest.approx(D_DHAT_SD, rel=REL)
    assert data.h_tilde_se[0, 0] == pytest.approx(D_H_SE, rel=REL)
    assert data.D_hat_se[0, 0] == pytest.approx(D_DHAT_SE, rel=REL)
    assert data.W0[0] == pytest.approx(D_W0, rel=REL)
    np.testing.assert_array_equal(data.alpha_bar, [0.55])


def test_transform_alpha_zero_kills_link():
    params = mk_params(1, 1)
    data = sps_transform(params, instance_a_channels(), 0.0)
    assert data.h_tilde_sd[0] == 0.0
    assert data.D_hat_sd[0] == 0.0
    assert data.W0[0] == 0.0


def test_transform_alpha_one_forwards_nothing():
    params = mk_params(1, 1)
    ch = instance_a_channels()
    data = sps_transform(params, ch, 1.0)
    assert data.h_tilde_sd[0] == 0.0
    # full-time harvest: ceiling is eta * Ps * |h_sr|^2
    assert data.W0[0] == pytest.approx(
        params.eta * params.ps_w * abs(ch.h_sr[0]) ** 2, rel=REL)


def test_transform_symmetric_relays_match():
    params = mk_params(2, 1)
    ch1 = instance_a_channels()
    ch = ChannelSet(h_sr=np.repeat(ch1.h_sr, 2), h_rd=np.repeat(ch1.h_rd, 2),
                    h_re=np.repeat(ch1.h_re, 2, axis=0))
    data = sps_transform(params, ch, 0.55)
    assert data.h_tilde_sd[0] == data.h_tilde_sd[1] == pytest.approx(D_H_SD, rel=REL)
    assert data.D_hat_sd[0] == data.D_hat_sd[1]
    assert data.W0[0] == data.W0[1]


def test_transform_scalar_alpha_broadcasts():
    params, channels = mk_scenario(3, 2, seed=11)
    a = sps_transform(params, channels, 0.4)
    b = sps_transform(params, channels, np.full(3, 0.4))
    np.testing.assert_array_equal(a.h_tilde_sd, b.h_tilde_sd)
    np.testing.assert_array_equal(a.D_hat_se, b.D_hat_se)


def test_transform_alpha_validation():
    params, channels = mk_scenario(2, 1, seed=3)
    with pytest.raises(ValueError):
        sps_transform(params, channels, -0.1)
    with pytest.raises(ValueError):
        sps_transform(params, channels, 1.1)
    with pytest.raises(ValueError):
        sps_transform(params, channels, np.array([0.5, 0.5, 0.5]))


# -- tau lower endpoint

def _data_with_h(h_vec):
    h = np.asarray(h_vec, dtype=complex)
    n = h.size
    return SpsData(h_tilde_sd=h, h_tilde_se=np.zeros((n, 1), dtype=complex),
                   D_hat_sd=np.zeros(n), D_hat_se=np.zeros((n, 1)),
                   W0=np.ones(n), alpha_bar=np.full(n, 0.5))


def test_tau_min_dead_channel_is_one():
    assert tau_min_1(mk_params(2, 1), _data_with_h([0.0, 0.0])) == 1.0


def test_tau_min_pinned_ratio():
    # N * Ps * ||h||^2 / sigma_nd2 = 99 by construction => tau_min = 0.01
    params = mk_params(1, 1)
    h2 = 99.0 * params.sigma_nd2 / params.ps_w
    assert tau_min_1(params, _data_with_h([math.sqrt(h2)])) == pytest.approx(0.01, rel=1e-12)


# -- fixed-tau solves

def test_h1_no_eve_frozen_values():
    params = mk_params(1, 0)
    channels = instance_a_channels(k=0)
    data = sps_transform(params, channels, 0.55)
    for tau, want in G_H1.items():
        res = solve_h1(params, channels, data, tau)
        assert res.h1 == pytest.approx(want, rel=1e-6)
        assert res.rank_ratio_x1 <= 1e-6


def test_h1_deaf_eve_matches_no_eve():
    params = mk_params(1, 1)
    ch = instance_a_channels()
    channels = ChannelSet(h_sr=ch.h_sr, h_rd=ch.h_rd,
                          h_re=np.zeros((1, 1), dtype=complex))
    data = sps_transform(params, channels, 0.55)
    res = solve_h1(params, channels, data, 0.6)
    assert res.h1 == pytest.approx(G_H1[0.6], rel=1e-6)


def test_h1_dead_second_hop_is_zero():
    params = mk_params(1, 1)
    ch = instance_a_channels()
    channels = ChannelSet(h_sr=ch.h_sr, h_rd=np.zeros(1, dtype=complex),
                          h_re=ch.h_re)
    data = sps_transform(params, channels, 0.55)
    res = solve_h1(params, channels, data, 0.5)
    assert abs(res.h1) <= 1e-8


def test_h1_rank_one_on_sampled_instances():
    for seed in (0, 1):
        params, channels = mk_scenario(3, 2, seed=seed)
        data = sps_transform(params, channels, 0.5)
        res = solve_h1(params, channels, data, 0.7)
        assert res.rank_ratio_x1 <= 1e-6
        assert res.xi > 0.0


def test_h1_concave_in_tau():
    params, channels = mk_scenario(2, 1, seed=7)
    data = sps_transform(params, channels, 0.5)

    def h(tau):
        return solve_h1(params, channels, data, tau).h1

    lo = tau_min_1(params, data) + 1e-9
    worst = oracle.concavity_probe(h, lo, 1.0 - 1e-6, n_points=12)
    hmax = max(abs(h(lo)), abs(h(1.0 - 1e-6)))
    assert worst <= 1e-6 * (1.0 + hmax)


# -- full search at fixed alpha_bar

def test_p1_no_eve_closed_form():
    # single relay, no eavesdropper: optimum is rho=0, co-phasing, S=0
    params = mk_params(1, 0)
    channels = instance_a_channels(k=0)
    sol = solve_p1(params, channels, 0.55)
    sinr = params.ps_w * abs(D_H_SD) ** 2 / (D_DHAT_SD + params.sigma_nd2)
    want = 0.5 * math.log2(1.0 + sinr)
    assert sol.status == "optimal"
    assert sol.rate.r_sec == pytest.approx(want, abs=1e-5)
    assert sol.tau_star == pytest.approx(1.0, abs=1e-9)
    assert sol.policy.rho[0] <= 1e-4
    assert float(np.abs(sol.S.S).max()) <= 1e-6 * D_W0


def test_p1_deaf_eve_closed_form():
    params = mk_params(1, 1)
    ch = instance_a_channels()
    channels = ChannelSet(h_sr=ch.h_sr, h_rd=ch.h_rd,
                          h_re=np.zeros((1, 1), dtype=complex))
    sol = solve_p1(params, channels, 0.55)
    sinr = params.ps_w * abs(D_H_SD) ** 2 / (D_DHAT_SD + params.sigma_nd2)
    assert sol.rate.r_sec == pytest.approx(0.5 * math.log2(1.0 + sinr), abs=1e-5)
    assert float(np.abs(sol.S.S).max()) <= 1e-6 * D_W0


@pytest.mark.parametrize("seed", [2, 5, 9])
def test_p1_no_cj_matches_grid_oracle(seed):
    params, channels = mk_scenario(2, 1, seed=seed)
    sol = solve_p1(params, channels, 0.5, no_cj=True)
    _, _, ref = oracle.grid_search_secrecy(params, channels, 0.5, cj_mode="none")
    assert sol.rate.r_sec >= ref.r_sec - 2e-2
    assert abs(sol.rate.r_sec - ref.r_sec) <= 2e-2


def test_p1_solution_invariants():
    for seed in (4, 12):
        params, channels = mk_scenario(3, 2, seed=seed)
        sol = solve_p1(params, channels, 0.5)
        assert sol.status in ("optimal", "zero-rate")
        if sol.status != "optimal":
            continue
        np.testing.assert_array_equal(sol.policy.alpha, np.full(3, 0.5))
        assert float(np.abs(sol.w1).max()) <= 1.0 + 1e-9
        slack = model.jamming_budget_slack(params, channels, sol.policy, sol.S)
        assert float(slack.min()) >= -1e-7 * float(sol.alpha_bar.max() * params.ps_w)
        # bound and model evaluation tell the same story
        assert sol.rate.r_sec == pytest.approx(sol.rate_bound, abs=1e-5)
        data = sps_transform(params, channels, 0.5)
        assert tau_min_1(params, data) - 1e-12 <= sol.tau_star <= 1.0
        # reported principal vector uses the largest-entry phase convention
        j = int(np.argmax(np.abs(sol.w1)))
        assert abs(sol.w1[j].imag) <= 1e-9 * max(abs(sol.w1[j]), 1e-30)
        assert sol.w1[j].real >= 0.0


def test_p1_jamming_never_hurts():
    for seed in (4, 8, 15):
        params, channels = mk_scenario(2, 1, seed=seed)
        cj = solve_p1(params, channels, 0.5)
        nocj = solve_p1(params, channels, 0.5, no_cj=True)
        assert cj.rate.r_sec >= nocj.rate.r_sec - 1e-5


def test_p1_zero_rate_fallback():
    # eavesdropper sits on top of the relay; destination link is feeble
    params = mk_params(1, 1)
    channels = ChannelSet(h_sr=np.array([3e-3 + 0j]),
                          h_rd=np.array([1e-6 + 0j]),
                          h_re=np.array([[5e-3 + 0j]]))
    sol = solve_p1(params, channels, 0.5)
    assert sol.status == "zero-rate"
    assert sol.rate.r_sec == 0.0
    np.testing.assert_array_equal(sol.policy.rho, [1.0])
    assert float(np.abs(sol.S.S).max()) == 0.0
