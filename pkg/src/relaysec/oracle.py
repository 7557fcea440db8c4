"""Brute-force references used to validate the conic pipeline on tiny cases.

Nothing here touches the solver modules; every candidate is scored through
model.secrecy_rate, so agreement between a solver and one of these searches
is evidence about the solver, not a shared-code tautology.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import model
from .model import ChannelSet, JammingCovariance, RelayPolicy, SystemParams

__all__ = [
    "GridSpec",
    "grid_search_secrecy",
    "golden_section_alpha",
    "concavity_probe",
]


@dataclass(frozen=True)
class GridSpec:
    """Axis ranges and steps for the exhaustive policy search.

    rho / theta axes apply per relay; the AN axes parameterize a rank-one
    jamming direction (polar magnitude angles, relative phases) and the
    fraction axis scales its power from 0 up to the per-relay budget cap.
    theta and an_phase are half-open (360 excluded); the rest are closed.
    """

    rho_lo: float = 0.0
    rho_hi: float = 1.0
    rho_step: float = 0.05
    theta_lo_deg: float = 0.0
    theta_hi_deg: float = 360.0
    theta_step_deg: float = 15.0
    an_polar_lo_deg: float = 0.0
    an_polar_hi_deg: float = 90.0
    an_polar_step_deg: float = 15.0
    an_phase_lo_deg: float = 0.0
    an_phase_hi_deg: float = 360.0
    an_phase_step_deg: float = 30.0
    frac_lo: float = 0.0
    frac_hi: float = 1.0
    frac_step: float = 0.2
    max_points: float = 1e8

    def __post_init__(self):
        for name in ("rho_step", "theta_step_deg", "an_polar_step_deg",
                     "an_phase_step_deg", "frac_step"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")

    def axis_closed(self, lo: float, hi: float, step: float) -> np.ndarray:
        n = int(math.floor((hi - lo) / step + 1e-9))
        return lo + step * np.arange(n + 1)

    def axis_halfopen(self, lo: float, hi: float, step: float) -> np.ndarray:
        n = int(math.ceil((hi - lo) / step - 1e-9))
        return lo + step * np.arange(max(n, 1))


def _an_direction(polars: tuple, phases: tuple, n: int) -> np.ndarray:
    """Unit vector from n-1 polar magnitude angles and n-1 relative phases."""
    v = np.ones(n, dtype=complex)
    for j, ph in enumerate(polars):
        v[j] *= math.cos(ph)
        v[j + 1:] *= math.sin(ph)
    for j, psi in enumerate(phases):
        v[j + 1] *= np.exp(1j * psi)
    return v


def grid_search_secrecy(params: SystemParams, channels: ChannelSet, alpha_bar,
                        grid: GridSpec = GridSpec(), cj_mode: str = "none"):
    """Exhaustive secrecy-rate search over (rho, theta) and optional jamming.

    Relay 0's phase is pinned to its co-phase value: the rate is exactly
    invariant under a common rotation of all relay phases, so searching the
    remaining phases loses nothing and cuts one axis.  cj_mode "rank-one"
    additionally sweeps S = sigma*v*v^H with v on the angle grid and sigma a
    fraction of the tightest per-relay budget.  Ties resolve to the earliest
    candidate in lexicographic axis order.  Returns (policy, S, rate).
    """
    channels.check_dims(params)
    n, k = params.n_relays, params.k_eves
    if n > 3 or k > 2:
        raise ValueError("grid oracle is limited to n_relays <= 3, k_eves <= 2")
    if cj_mode not in ("none", "rank-one"):
        raise ValueError(f"cj_mode must be 'none' or 'rank-one', got {cj_mode!r}")

    alpha = np.broadcast_to(np.asarray(alpha_bar, dtype=float), (n,)).copy()
    rho_ax = grid.axis_closed(grid.rho_lo, grid.rho_hi, grid.rho_step)
    th_ax = np.deg2rad(grid.axis_halfopen(grid.theta_lo_deg, grid.theta_hi_deg,
                                          grid.theta_step_deg))
    theta0 = float(np.mod(-np.angle(channels.h_rd[0]) - np.angle(channels.h_sr[0]),
                          2.0 * math.pi))

    n_pol = len(rho_ax) ** n * len(th_ax) ** (n - 1)
    if cj_mode == "rank-one":
        pol_ax = np.deg2rad(grid.axis_closed(grid.an_polar_lo_deg, grid.an_polar_hi_deg,
                                             grid.an_polar_step_deg))
        ph_ax = np.deg2rad(grid.axis_halfopen(grid.an_phase_lo_deg, grid.an_phase_hi_deg,
                                              grid.an_phase_step_deg))
        fr_ax = grid.axis_closed(grid.frac_lo, grid.frac_hi, grid.frac_step)
        n_jam = len(pol_ax) ** (n - 1) * len(ph_ax) ** (n - 1) * len(fr_ax)
        dirs = [_an_direction(pp, qq, n)
                for pp in itertools.product(pol_ax, repeat=n - 1)
                for qq in itertools.product(ph_ax, repeat=n - 1)]
    else:
        fr_ax = np.zeros(1)
        n_jam = 1
        dirs = [None]
    if n_pol * n_jam > grid.max_points:
        raise ValueError(
            f"grid has {n_pol * n_jam:.3g} points, above the cap {grid.max_points:.3g}")

    s_zero = JammingCovariance.zeros(n)
    best = None
    for rho_t in itertools.product(rho_ax, repeat=n):
        rho = np.asarray(rho_t)
        for th_t in itertools.product(th_ax, repeat=n - 1):
            theta = np.concatenate(([theta0], np.asarray(th_t)))
            policy = RelayPolicy(alpha=alpha, rho=rho, theta=theta)
            if cj_mode == "none":
                rate = model.secrecy_rate(params, channels, policy, s_zero)
                if best is None or rate.r_sec > best[3].r_sec:
                    best = (policy, s_zero, 0.0, rate)
                continue
            budget = model.jamming_budget(params, channels, policy)
            for v in dirs:
                mag2 = np.abs(v) ** 2
                with np.errstate(divide="ignore"):
                    caps = np.where(mag2 > 1e-12, budget / np.maximum(mag2, 1e-300), np.inf)
                sig_max = float(caps.min())
                if not math.isfinite(sig_max):
                    sig_max = 0.0
                for f in fr_ax:
                    sig = f * sig_max
                    S = s_zero if sig <= 0.0 else JammingCovariance(sig * np.outer(v, np.conj(v)))
                    rate = model.secrecy_rate(params, channels, policy, S)
                    if best is None or rate.r_sec > best[3].r_sec:
                        best = (policy, S, sig, rate)

    policy, S, _, rate = best
    return policy, S, rate


def golden_section_alpha(params: SystemParams, channels: ChannelSet, i: int,
                         lo: float = 1e-9, hi: float = 1.0 - 1e-9,
                         width: float = 1e-10) -> float:
    """Golden-section minimizer of relay i's forwarded-noise objective in alpha.

    Minimizes the three-term barrier-like objective whose minimizer is the
    closed-form splitting ratio; written against the raw channel entries so
    it shares no algebra with the closed form it cross-checks.
    """
    g = params.ps_w * abs(channels.h_sr[i]) ** 2
    gd = g * abs(channels.h_rd[i]) ** 2
    if gd <= 0.0:
        return 0.0
    gamma = params.sigma_nd2 / gd

    def f(a: float) -> float:
        return (params.eta * params.sigma_nc2 / (1.0 - a)
                + gamma * (g + params.sigma_na2) / a
                + gamma * params.sigma_nc2 / (a * (1.0 - a)))

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def concavity_probe(h, lo: float, hi: float, n_points: int = 20) -> float:
    """Largest midpoint-concavity violation of h over [lo, hi].

    Evaluates h on the half-step refinement of an n_points uniform grid so
    the midpoint of every coarse pair is itself a sample; returns
    max over pairs of (h(a)+h(b))/2 - h((a+b)/2).  Nonpositive (up to
    solver noise) certifies midpoint concavity at this resolution.
    """
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    ts = np.linspace(lo, hi, 2 * n_points - 1)
    vals = np.array([float(h(t)) for t in ts])
    worst = -math.inf
    for i in range(0, len(ts), 2):
        for j in range(i + 2, len(ts), 2):
            mid = (i + j) // 2
            worst = max(worst, 0.5 * (vals[i] + vals[j]) - vals[mid])
    return worst
