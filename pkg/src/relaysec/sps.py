"""Centralized secrecy-rate optimum under a fixed power-splitting profile.

With the splitting ratios alpha fixed at alpha_bar, the joint design over
harvest shares rho, forwarding phases theta and the jamming covariance S is
equivalent, after a change of variables, to a family of semidefinite
programs indexed by an epigraph scalar tau in (0, 1]:

    H1(tau) = max  Ps * tr(X h_sd~* h_sd~^T)
         s.t.  tr(S^ A_rd) + tr(X D_sd) + xi*sigma_nd2 = tau
               (1/tau - 1) * (tr(S^ A_re_k) + tr(X D_se_k) + xi*sigma_ne_k2)
                   >= Ps * tr(X h_se_k~* h_se_k~^T)          for each k
               tr((S^ + W0_ii X) E_i) <= xi * W0_ii          for each i
               X >= 0, S^ >= 0, xi >= 0

where X is the homogenized outer product of the per-relay weights
w1_i = sqrt(1 - rho_i) e^{j theta_i}.  The secrecy rate at tau is
0.5*log2(tau + H1(tau)), concave in tau, so a scalar search closes the
problem.  The relaxation is tight: an optimal X is rank one.

Internally every power is rescaled by 1/sigma_nd2 to compress the dynamic
range seen by the interior-point backend; tau, H1 and all recovered
parameters are invariant under that rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import conic, model, tausearch
from .model import ChannelSet, JammingCovariance, RateReport, RelayPolicy, SystemParams
from .tausearch import SolveOpts, rate_bound


@dataclass
class SpsData:
    """Effective channel quantities for a fixed splitting profile alpha_bar.

    h_tilde_sd / h_tilde_se: effective two-hop channels (N and N x K)
    D_hat_sd / D_hat_se: relayed-noise diagonals (N and N x K, watts)
    W0: per-relay harvested power ceilings eta*alpha_bar*Ps*|h_sr|^2 (watts)
    """

    h_tilde_sd: np.ndarray
    h_tilde_se: np.ndarray
    D_hat_sd: np.ndarray
    D_hat_se: np.ndarray
    W0: np.ndarray
    alpha_bar: np.ndarray


def _broadcast_alpha(alpha_bar, n: int) -> np.ndarray:
    a = np.asarray(alpha_bar, dtype=float).reshape(-1)
    if a.size == 1:
        a = np.full(n, float(a[0]))
    if a.size != n:
        raise ValueError("alpha_bar must be scalar or length n_relays")
    if np.any(a < 0.0) or np.any(a > 1.0):
        raise ValueError("alpha_bar entries must lie in [0, 1]")
    return a


def sps_transform(params: SystemParams, channels: ChannelSet, alpha_bar) -> SpsData:
    """Fold the amplify-and-forward chain into effective channel quantities."""
    channels.check_dims(params)
    n = params.n_relays
    ab = _broadcast_alpha(alpha_bar, n)
    g = params.ps_w * np.abs(channels.h_sr) ** 2
    den = (1.0 - ab) * (g + params.sigma_na2) + params.sigma_nc2
    amp2 = params.eta * ab * g / den                      # |beta|^2 at rho=0
    h_tilde_sd = channels.h_sr * channels.h_rd * np.sqrt((1.0 - ab) * amp2)
    noise_fwd = (1.0 - ab) * params.sigma_na2 + params.sigma_nc2
    d_common = params.eta * ab * params.ps_w * np.abs(channels.h_sr) ** 2 * noise_fwd / den
    D_hat_sd = d_common * np.abs(channels.h_rd) ** 2
    h_tilde_se = channels.h_sr[:, None] * channels.h_re * np.sqrt((1.0 - ab) * amp2)[:, None]
    D_hat_se = d_common[:, None] * np.abs(channels.h_re) ** 2
    W0 = params.eta * ab * params.ps_w * np.abs(channels.h_sr) ** 2
    return SpsData(h_tilde_sd=h_tilde_sd, h_tilde_se=h_tilde_se,
                   D_hat_sd=D_hat_sd, D_hat_se=D_hat_se, W0=W0, alpha_bar=ab)


def tau_min_1(params: SystemParams, data: SpsData) -> float:
    """Lower endpoint of the tau search: 1/(1 + N*Ps*||h_sd~||^2/sigma_nd2)."""
    n = data.h_tilde_sd.size
    cap = n * params.ps_w * float(np.linalg.norm(data.h_tilde_sd) ** 2) / params.sigma_nd2
    return 1.0 / (1.0 + cap)


def _diag_svec_indices(m: int) -> np.ndarray:
    j = np.arange(m)
    return (j + 1) * (j + 2) // 2 - 1


def _svec_herm(a: np.ndarray) -> np.ndarray:
    return conic.svec(conic.embed_coeff(a))


@dataclass
class _H1Bundle:
    sol: conic.ConeSolution
    s_idx: int | None
    tau: float


class _H1Builder:
    """Precomputes coefficient vectors once; emits one conic program per tau."""

    def __init__(self, params: SystemParams, channels: ChannelSet, data: SpsData,
                 no_cj: bool, tol: float):
        u = params.sigma_nd2
        self.u = u
        self.n = params.n_relays
        self.k = params.k_eves
        self.no_cj = bool(no_cj)
        self.tol = float(tol)
        self.m = 2 * self.n
        self.ps = params.ps_w / u
        self.s_ne = params.sigma_ne2 / u
        self.w0 = data.W0 / u
        # the jamming block is optimized in per-relay harvested-power units:
        # S^ = D Sigma D with D = diag(sqrt(W0')), a cone-preserving congruence
        # that turns every live budget row into Sigma_ii + X_ii <= xi and keeps
        # both PSD blocks near unit scale for the interior-point backend
        self.d_jam = np.where(self.w0 > 0.0, np.sqrt(self.w0), 1.0)
        dj = np.outer(self.d_jam, self.d_jam)
        dim = conic.svec_dim(self.m)
        didx = _diag_svec_indices(self.m)

        def diag_svec(d):
            v = np.zeros(dim)
            v[didx] = 0.5 * np.concatenate([d, d])
            return v

        self.a_sd = _svec_herm(np.outer(np.conj(data.h_tilde_sd), data.h_tilde_sd))
        self.a_rd = _svec_herm(np.outer(np.conj(channels.h_rd), channels.h_rd) * dj)
        self.a_se = [_svec_herm(np.outer(np.conj(data.h_tilde_se[:, j]), data.h_tilde_se[:, j]))
                     for j in range(self.k)]
        self.a_re = [_svec_herm(np.outer(np.conj(channels.h_re[:, j]), channels.h_re[:, j]) * dj)
                     for j in range(self.k)]
        self.dsd_svec = diag_svec(data.D_hat_sd / u)
        self.dse_svec = [diag_svec(data.D_hat_se[:, j] / u) for j in range(self.k)]
        self.e_svec = []
        for i in range(self.n):
            v = np.zeros(dim)
            v[didx[i]] = 0.5
            v[didx[self.n + i]] = 0.5
            self.e_svec.append(v)
        self.id_svec = diag_svec(np.ones(self.n))
        self.extra_solves = 0

    def solve(self, tau: float):
        tau = float(tau)
        if not 0.0 < tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        return self._solve_inner(tau, 0.0)

    def _solve_inner(self, tau: float, reg: float, tol: float | None = None):
        p = conic.ConeProgram()
        X = p.psd_block(self.m)
        S = None if self.no_cj else p.psd_block(self.m)
        xi = p.scalar(nonneg=True)

        obj = self.ps * self.a_sd
        if reg > 0.0:
            obj = obj - reg * self.id_svec
        term = conic.LinTerm().add_psd_svec(X, obj)
        if reg > 0.0 and S is not None:
            term.add_psd_svec(S, -reg * self.id_svec)
        p.maximize(term)

        eq = conic.LinTerm().add_psd_svec(X, self.dsd_svec).add_scalar(xi, 1.0)
        if S is not None:
            eq.add_psd_svec(S, self.a_rd)
        p.add_eq(eq, tau)

        cap = 1.0 / tau - 1.0
        for j in range(self.k):
            t = conic.LinTerm()
            t.add_psd_svec(X, self.ps * self.a_se[j] - cap * self.dse_svec[j])
            t.add_scalar(xi, -cap * self.s_ne[j])
            if S is not None:
                t.add_psd_svec(S, -cap * self.a_re[j])
            p.add_le(t, 0.0)

        for i in range(self.n):
            if self.w0[i] > 0.0:
                t = conic.LinTerm().add_psd_svec(X, self.e_svec[i]).add_scalar(xi, -1.0)
                if S is not None:
                    t.add_psd_svec(S, self.e_svec[i])
                p.add_le(t, 0.0)
            else:
                # dead relay: no harvested power; pin its jamming power and
                # keep the homogenized diagonal bounded by hand
                if S is not None:
                    p.add_le(conic.LinTerm().add_psd_svec(S, self.e_svec[i]), 0.0)
                p.add_le(conic.LinTerm().add_psd_svec(X, self.e_svec[i]).add_scalar(xi, -1.0), 0.0)

        sol = conic.solve(p, tol=self.tol if tol is None else tol)
        if sol.status != "optimal":
            raise conic.SolverFailure(
                f"H1 solve failed at tau={tau:.12g}: {sol.status} ({sol.solver_status})")
        bundle = _H1Bundle(sol=sol, s_idx=None if self.no_cj else 1, tau=tau)
        return max(float(sol.objective), 0.0), bundle

    def vertex(self, bundle: _H1Bundle) -> _H1Bundle:
        """Re-solve at the bundle's tau with a tiny trace penalty on X and S.

        When several eavesdropper caps bind at once the optimal face can
        have positive dimension and the interior-point landing spot mixes
        the rank-one vertex with face directions; the same smearing puts
        budget-free jamming power into directions no receiver sees.
        Minimizing the traces among (near-)optimal points recovers the
        vertex; the penalty is sized so the objective sacrifice stays
        below 1e-9 of the reported value.  The re-solve runs at a
        tightened tolerance: near tau = 1 the landing-spot noise at
        workaday tolerances sits right at the rank-gate scale.  The
        returned bundle only supplies recovery variables; H1 itself stays
        from the plain solve.
        """
        tr = float(np.trace(bundle.sol.psd_values[0]))
        if bundle.s_idx is not None:
            tr += float(np.trace(bundle.sol.psd_values[bundle.s_idx]))
        h1 = float(bundle.sol.objective)
        reg = 1e-9 * max(h1, 1.0) / max(tr, 1e-300)
        self.extra_solves += 1
        h1v, vb = self._solve_inner(bundle.tau, reg, tol=min(self.tol, 1e-10))
        return vb

    # -- recovery back to physical parameters (watts)
    def extract(self, bundle: _H1Bundle):
        sol = bundle.sol
        xhat = conic.extract_hermitian(sol.psd_values[0]) / self.u
        xi = float(sol.scalar_values[0]) / self.u
        if bundle.s_idx is None:
            shat = np.zeros((self.n, self.n), dtype=complex)
        else:
            sigma = conic.extract_hermitian(sol.psd_values[bundle.s_idx])
            shat = sigma * np.outer(self.d_jam, self.d_jam)
        return xhat, shat, xi


def _rank_ratio(mat: np.ndarray) -> float:
    w = np.linalg.eigvalsh(mat)
    if w.size < 2 or w[-1] <= 0.0:
        return 0.0
    return float(max(w[-2], 0.0) / w[-1])


def _num_rank(mat: np.ndarray, rel_tol: float = 1e-6) -> int:
    w = np.linalg.eigvalsh(mat)
    if w.size == 0 or w[-1] <= 0.0:
        return 0
    return int(np.sum(w > rel_tol * w[-1]))


def _principal_vector(mat: np.ndarray) -> np.ndarray:
    """Scaled leading eigenvector, global phase fixed so the largest entry is real."""
    w, v = np.linalg.eigh(mat)
    lam = float(w[-1])
    if lam <= 0.0:
        return np.zeros(mat.shape[0], dtype=complex)
    vec = np.sqrt(lam) * v[:, -1]
    j = int(np.argmax(np.abs(vec)))
    ph = np.angle(vec[j])
    return vec * np.exp(-1j * ph)


def _clean_shat(builder: _H1Builder, shat: np.ndarray, xi: float) -> np.ndarray:
    """Zero out jamming dust.

    Interior-point noise leaves femtowatt-scale residue in S even when the
    optimal design uses none; below 1e-7 of the total harvested ceiling it
    cannot move any rate by more than ~1e-7 bits, while its eigenstructure
    is meaningless, so it is snapped to exactly zero.
    """
    if builder.no_cj or xi <= 0.0:
        return shat
    w0_total = float(np.sum(builder.w0)) * builder.u
    if float(np.trace(shat).real) <= 1e-7 * xi * w0_total:
        return np.zeros_like(shat)
    return shat


def _extract_clean(builder: _H1Builder, bundle: _H1Bundle):
    """Extraction plus rank hygiene.

    Cleans jamming dust; when the landing spot is not a vertex (X not
    rank-one, or S spilling past the min(K, N)-dimensional subspace a
    vertex solution occupies) the trace-penalty re-solve is tried first.
    """
    xhat, shat, xi = builder.extract(bundle)
    shat = _clean_shat(builder, shat, xi)
    need = _rank_ratio(xhat) > 1e-7
    if not need and not builder.no_cj:
        need = _num_rank(shat) > min(builder.k, builder.n)
    if need:
        try:
            xhat, shat, xi = builder.extract(builder.vertex(bundle))
            shat = _clean_shat(builder, shat, xi)
        except conic.SolverFailure:
            pass
    return xhat, shat, xi


@dataclass
class H1Result:
    """Single-tau solve of the homogenized relaxation (physical units).

    duals belong to the internally rescaled program; use them for sign and
    activity checks, not for unit-bearing sensitivities.
    """

    h1: float
    xhat1: np.ndarray
    shat: np.ndarray
    xi: float
    duals: list
    rel_gap: float
    rank_ratio_x1: float


def solve_h1(params: SystemParams, channels: ChannelSet, data: SpsData, tau: float,
             no_cj: bool = False, tol: float = 1e-8) -> H1Result:
    """Solve the fixed-tau relaxation once and return homogenized variables."""
    builder = _H1Builder(params, channels, data, no_cj=no_cj, tol=tol)
    h1, bundle = builder.solve(tau)
    xhat, shat, xi = _extract_clean(builder, bundle)
    return H1Result(h1=h1, xhat1=xhat, shat=shat, xi=xi, duals=bundle.sol.duals,
                    rel_gap=bundle.sol.rel_gap, rank_ratio_x1=_rank_ratio(xhat))


@dataclass
class SpsSolution:
    """Optimized rho/theta/S at fixed alpha_bar, plus search diagnostics.

    rate holds the model evaluation of the recovered parameters; status is
    "optimal" or "zero-rate" (secrecy impossible, all-harvest fallback).
    """

    tau_star: float
    H1_star: float
    w1: np.ndarray
    S: JammingCovariance
    policy: RelayPolicy
    rate: RateReport
    status: str
    rate_bound: float
    rank_ratio_x1: float
    rank_s: int
    duality_gap: float
    bisection_iterations: int
    solve_count: int
    alpha_bar: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _zero_rate_solution(params: SystemParams, channels: ChannelSet, alpha_bar: np.ndarray,
                        iters: int, solves: int) -> SpsSolution:
    n = params.n_relays
    policy = RelayPolicy(alpha=alpha_bar, rho=np.ones(n), theta=np.zeros(n))
    S = JammingCovariance.zeros(n)
    rate = model.secrecy_rate(params, channels, policy, S)
    return SpsSolution(tau_star=1.0, H1_star=0.0, w1=np.zeros(n, dtype=complex), S=S,
                       policy=policy, rate=rate, status="zero-rate", rate_bound=0.0,
                       rank_ratio_x1=0.0, rank_s=0, duality_gap=0.0,
                       bisection_iterations=iters, solve_count=solves,
                       alpha_bar=alpha_bar)


def _recover(params: SystemParams, channels: ChannelSet, alpha_bar: np.ndarray,
             builder: _H1Builder, bundle: _H1Bundle):
    xhat, shat, xi = _extract_clean(builder, bundle)
    if xi <= 0.0:
        return None
    w1 = _principal_vector(xhat / xi)
    mag = np.abs(w1)
    over = mag > 1.0
    if np.any(over):
        w1 = np.where(over, w1 / np.maximum(mag, 1.0), w1)
    rho = np.clip(1.0 - np.abs(w1) ** 2, 0.0, 1.0)
    theta = np.mod(np.angle(w1), 2.0 * np.pi)
    policy = RelayPolicy(alpha=alpha_bar, rho=rho, theta=theta)
    S = JammingCovariance(shat / xi)
    rate = model.secrecy_rate(params, channels, policy, S)
    diag = dict(rank_ratio_x1=_rank_ratio(xhat), rank_s=_num_rank(S.S),
                duality_gap=bundle.sol.rel_gap)
    return w1, policy, S, rate, diag


def solve_p1(params: SystemParams, channels: ChannelSet, alpha_bar,
             opts: SolveOpts = SolveOpts(), no_cj: bool = False,
             tau_hint: float | None = None) -> SpsSolution:
    """Maximize the secrecy rate over rho, theta and S at fixed alpha_bar.

    Runs the comparison bisection over tau, then polishes at the kink
    tau = 1/(1 + max_k SINR_e) implied by the recovered parameters so the
    reported bound and the model evaluation agree.  tau_hint warm-starts
    the search bracket (see tausearch.maximize_rate).
    """
    channels.check_dims(params)
    data = sps_transform(params, channels, alpha_bar)
    ab = data.alpha_bar
    tau_lo = tau_min_1(params, data)
    builder = _H1Builder(params, channels, data, no_cj=no_cj, tol=opts.solver_tol)
    res = tausearch.maximize_rate(builder.solve, tau_lo, opts, hint=tau_hint)

    best_tau, best_h, best_bundle, best_rate = res.tau, res.value, res.bundle, res.rate
    rec = _recover(params, channels, ab, builder, best_bundle)
    if rec is not None:
        for _ in range(opts.polish_rounds):
            report = rec[3]
            sinr_e_max = float(report.sinr_e.max()) if report.sinr_e.size else 0.0
            tau_t = min(1.0, max(tau_lo, 1.0 / (1.0 + sinr_e_max)))
            if abs(tau_t - best_tau) <= 1e-12:
                break
            h_t, b_t = res.eval_cached(builder.solve, tau_t)
            if rate_bound(tau_t, h_t) < best_rate - 1e-9:
                break
            best_tau, best_h, best_bundle = tau_t, h_t, b_t
            best_rate = rate_bound(tau_t, h_t)
            nxt = _recover(params, channels, ab, builder, best_bundle)
            if nxt is None:
                break
            rec = nxt

    if rec is None or best_rate <= 0.0:
        return _zero_rate_solution(params, channels, ab, res.iterations, res.evaluations)

    w1, policy, S, rate, diag = rec
    return SpsSolution(tau_star=best_tau, H1_star=best_h, w1=w1, S=S, policy=policy,
                       rate=rate, status="optimal", rate_bound=best_rate,
                       rank_ratio_x1=diag["rank_ratio_x1"], rank_s=diag["rank_s"],
                       duality_gap=diag["duality_gap"],
                       bisection_iterations=res.iterations,
                       solve_count=res.evaluations + builder.extra_solves,
                       alpha_bar=ab)
