"""Local-CSI heuristic tests: closed-form splits, co-phasing, diagonal AN."""

import math

import numpy as np
import pytest

from relaysec import model
from relaysec.distributed import (DistributedConfig, alpha_star_dps, cophase_angles,
                                  hypothetical_sinr, rho_heuristic, run_distributed)
from relaysec.model import ChannelSet
from relaysec.oracle import golden_section_alpha

from conftest import mk_params, mk_scenario


def test_config_delta_validation():
    DistributedConfig(delta=0.5)
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            DistributedConfig(delta=bad)
    with pytest.raises(ValueError):
        rho_heuristic(mk_scenario(2, 1, seed=0)[1], 1.0)


def test_rho_pinned_arithmetic():
    # |h_rd|^2 / worst-eve = 1/4, delta = 0.5 -> rho = 0.5 * 0.75
    channels = ChannelSet(h_sr=np.array([1e-3 + 0j]),
                          h_rd=np.array([1.0 + 0j]),
                          h_re=np.array([[2.0 + 0j]]))
    assert rho_heuristic(channels, 0.5)[0] == pytest.approx(0.375, rel=1e-15)


def test_rho_zero_when_destination_wins():
    channels = ChannelSet(h_sr=np.array([1e-3 + 0j, 1e-3 + 0j]),
                          h_rd=np.array([2.0 + 0j, 1.0 + 0j]),
                          h_re=np.array([[2.0 + 0j], [1.0 + 0j]]))
    rho = rho_heuristic(channels, 0.7)
    assert rho[0] == 0.0      # destination strictly louder
    assert rho[1] == 0.0      # tie goes to forwarding


def test_rho_zero_without_eavesdroppers():
    channels = ChannelSet(h_sr=np.ones(2, dtype=complex),
                          h_rd=np.ones(2, dtype=complex),
                          h_re=np.zeros((2, 0), dtype=complex))
    np.testing.assert_array_equal(rho_heuristic(channels, 0.5), [0.0, 0.0])


def test_rho_capped_by_delta():
    # dead second hop, loud eve: the full cap delta is diverted
    channels = ChannelSet(h_sr=np.array([1e-3 + 0j]),
                          h_rd=np.array([0.0 + 0j]),
                          h_re=np.array([[1.0 + 0j]]))
    assert rho_heuristic(channels, 0.3)[0] == pytest.approx(0.3, rel=1e-15)


def test_cophase_cancels_channel_phases():
    params, channels = mk_scenario(4, 1, seed=5)
    theta = cophase_angles(channels)
    total = np.angle(channels.h_sr) + np.angle(channels.h_rd) + theta
    np.testing.assert_allclose(np.exp(1j * total), np.ones(4), atol=1e-12)
    assert np.all((theta >= 0.0) & (theta < 2 * math.pi))


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_alpha_closed_form_matches_golden_section(seed):
    params, channels = mk_scenario(1, 1, seed=seed)
    closed = alpha_star_dps(params, channels)[0]
    searched = golden_section_alpha(params, channels, 0)
    assert abs(closed - searched) <= 1e-6


def test_alpha_dead_hop_inactive():
    params = mk_params(2, 1)
    channels = ChannelSet(h_sr=np.array([0.0 + 0j, 1e-3 + 0j]),
                          h_rd=np.array([1e-3 + 0j, 0.0 + 0j]),
                          h_re=np.zeros((2, 1), dtype=complex))
    alpha = alpha_star_dps(params, channels)
    np.testing.assert_array_equal(alpha, [0.0, 0.0])


def test_hypothetical_sinr_endpoints_and_peak():
    params, channels = mk_scenario(1, 1, seed=7)
    assert hypothetical_sinr(params, channels, 0, 0.0, 0.0) == 0.0
    assert hypothetical_sinr(params, channels, 0, 1.0, 0.0) == 0.0
    a_star = alpha_star_dps(params, channels)[0]
    eps = 0.5 * min(a_star, 1.0 - a_star)
    peak = hypothetical_sinr(params, channels, 0, a_star, 0.0)
    assert peak > hypothetical_sinr(params, channels, 0, a_star - eps, 0.0)
    assert peak > hypothetical_sinr(params, channels, 0, a_star + eps, 0.0)


def test_hypothetical_sinr_monotone_in_rho():
    params, channels = mk_scenario(1, 1, seed=8)
    vals = [hypothetical_sinr(params, channels, 0, 0.5, r) for r in (0.0, 0.3, 0.8)]
    assert vals[0] > vals[1] > vals[2]


def test_hypothetical_sinr_validates_inputs():
    params, channels = mk_scenario(1, 1, seed=0)
    with pytest.raises(ValueError):
        hypothetical_sinr(params, channels, 0, -0.1, 0.0)
    with pytest.raises(ValueError):
        hypothetical_sinr(params, channels, 0, 0.5, 1.2)


def test_run_distributed_structure():
    params, channels = mk_scenario(3, 2, seed=9)
    for mode in ("sps", "dps"):
        policy, S, rate = run_distributed(params, channels, mode)
        # every relay burns its whole jamming budget; the slack is identically 0
        slack = model.jamming_budget_slack(params, channels, policy, S)
        np.testing.assert_array_equal(slack, np.zeros(3))
        off = S.S - np.diag(np.diag(S.S))
        assert float(np.abs(off).max()) == 0.0
        assert rate.r_sec >= 0.0
        np.testing.assert_array_equal(policy.theta, cophase_angles(channels))
    sps_policy, _, _ = run_distributed(params, channels, "SPS")
    np.testing.assert_array_equal(sps_policy.alpha, np.full(3, 0.5))


def test_run_distributed_dps_dead_relay_idles():
    params = mk_params(2, 1)
    channels = ChannelSet(h_sr=np.array([1e-3 + 0j, 1e-3 + 0j]),
                          h_rd=np.array([0.0 + 0j, 2e-3 + 0j]),
                          h_re=np.array([[1e-3 + 0j], [1e-4 + 0j]]))
    policy, S, rate = run_distributed(params, channels, "dps")
    assert policy.alpha[0] == 0.0
    assert policy.rho[0] == 0.0          # nothing harvested, nothing to divert
    assert S.S[0, 0] == 0.0
    assert policy.alpha[1] > 0.0


def test_run_distributed_validation():
    params, channels = mk_scenario(2, 1, seed=1)
    with pytest.raises(ValueError):
        run_distributed(params, channels, "centralized")
    with pytest.raises(ValueError):
        run_distributed(params, channels, "sps",
                        DistributedConfig(alpha_bar_sps=1.4))


def test_sps_alpha_vector_config():
    params, channels = mk_scenario(2, 1, seed=2)
    ab = np.array([0.3, 0.7])
    policy, _, _ = run_distributed(params, channels, "sps",
                                   DistributedConfig(alpha_bar_sps=ab))
    np.testing.assert_array_equal(policy.alpha, ab)
