"""Local-CSI relay heuristics: closed-form splits, co-phasing, diagonal AN.

Every decision here is computable by relay i from its own channel entries
(h_sr[i], h_rd[i], h_re[i, :]) alone; nothing aggregates across relays
except the final rate evaluation, which is bookkeeping rather than design.
Each relay spends its whole harvested jamming budget, so the AN covariance
is diagonal with entries eta*rho_i*alpha_i*Ps*|h_sr[i]|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model
from .model import ChannelSet, JammingCovariance, RelayPolicy, SystemParams

__all__ = [
    "DistributedConfig",
    "rho_heuristic",
    "cophase_angles",
    "alpha_star_dps",
    "hypothetical_sinr",
    "run_distributed",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DistributedConfig:
    """Knobs of the local heuristics.

    delta: fraction cap on harvested power diverted to jamming, in (0,1).
    alpha_bar_sps: splitting ratio used by the fixed-split variant; scalar
    or per-relay vector.
    """

    delta: float = 0.5
    alpha_bar_sps: float | np.ndarray = 0.5

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")


# -- per-relay scalar rules (locality is structural: scalars in, scalar out)

def _rho_one(h_rd_i: complex, h_re_row: np.ndarray, delta: float) -> float:
    if h_re_row.size == 0:
        return 0.0
    worst = float(np.max(np.abs(h_re_row) ** 2))
    if worst <= 0.0:
        return 0.0
    return delta * max(0.0, 1.0 - abs(h_rd_i) ** 2 / worst)


def _theta_one(h_sr_i: complex, h_rd_i: complex) -> float:
    return float(np.mod(-np.angle(h_rd_i) - np.angle(h_sr_i), TWO_PI))


def _alpha_one(params: SystemParams, h_sr_i: complex, h_rd_i: complex) -> float:
    g = params.ps_w * abs(h_sr_i) ** 2
    gd = g * abs(h_rd_i) ** 2
    if gd <= 0.0:
        return 0.0
    gamma = params.sigma_nd2 / gd
    ratio = ((params.eta + gamma) * params.sigma_nc2
             / (gamma * (g + params.sigma_na2 + params.sigma_nc2)))
    return 1.0 / (1.0 + math.sqrt(ratio))


def rho_heuristic(channels: ChannelSet, delta: float) -> np.ndarray:
    """Jamming split: divert up to delta of the budget when some
    eavesdropper outhears the destination on this relay's second hop."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return np.array([_rho_one(channels.h_rd[i], channels.h_re[i, :], delta)
                     for i in range(channels.h_rd.shape[0])])


def cophase_angles(channels: ChannelSet) -> np.ndarray:
    """Phases that align every two-hop path at the destination."""
    return np.array([_theta_one(channels.h_sr[i], channels.h_rd[i])
                     for i in range(channels.h_sr.shape[0])])


def alpha_star_dps(params: SystemParams, channels: ChannelSet) -> np.ndarray:
    """Closed-form splitting ratio maximizing each relay's own forwarded
    SNR proxy; relays with a dead hop come back as 0 (inactive)."""
    return np.array([_alpha_one(params, channels.h_sr[i], channels.h_rd[i])
                     for i in range(channels.h_sr.shape[0])])


def hypothetical_sinr(params: SystemParams, channels: ChannelSet, i: int,
                      alpha_i: float, rho_i: float) -> float:
    """Single-relay forwarded SINR as seen by relay i in isolation.

    The closed-form split is the maximizer of this quantity over alpha;
    it diverges to 0 at both alpha endpoints.
    """
    if not (0.0 <= alpha_i <= 1.0 and 0.0 <= rho_i <= 1.0):
        raise ValueError("alpha_i and rho_i must lie in [0, 1]")
    g = params.ps_w * abs(channels.h_sr[i]) ** 2
    gd = g * abs(channels.h_rd[i]) ** 2
    if gd <= 0.0:
        return 0.0
    gamma = params.sigma_nd2 / gd
    num = params.eta * (1.0 - rho_i) * g
    if alpha_i <= 0.0 or alpha_i >= 1.0:
        return 0.0
    den = (params.eta * params.sigma_na2
           + params.eta * params.sigma_nc2 / (1.0 - alpha_i)
           + gamma * (g + params.sigma_na2) / alpha_i
           + gamma * params.sigma_nc2 / (alpha_i * (1.0 - alpha_i))
           + params.eta * rho_i * g)
    return num / den


def run_distributed(params: SystemParams, channels: ChannelSet, mode: str,
                    cfg: DistributedConfig = DistributedConfig()):
    """Assemble the full local design and evaluate it.

    mode "sps" uses the fixed split cfg.alpha_bar_sps; mode "dps" uses the
    per-relay closed form.  Returns (policy, S, rate) with S the diagonal
    full-budget AN covariance.
    """
    channels.check_dims(params)
    n = params.n_relays
    kind = mode.lower()
    if kind not in ("sps", "dps"):
        raise ValueError(f"mode must be 'sps' or 'dps', got {mode!r}")

    rho = rho_heuristic(channels, cfg.delta)
    theta = cophase_angles(channels)
    if kind == "sps":
        alpha = np.broadcast_to(np.asarray(cfg.alpha_bar_sps, dtype=float), (n,)).copy()
        if np.any(alpha < 0.0) or np.any(alpha > 1.0):
            raise ValueError("alpha_bar_sps must lie in [0, 1]")
    else:
        alpha = alpha_star_dps(params, channels)
        dead = alpha <= 0.0
        rho = np.where(dead, 0.0, rho)

    policy = RelayPolicy(alpha=alpha, rho=rho, theta=theta)
    sigma = model.jamming_budget(params, channels, policy)
    S = JammingCovariance(np.diag(sigma).astype(complex))
    rate = model.secrecy_rate(params, channels, policy, S)
    return policy, S, rate
