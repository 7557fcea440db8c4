"""Physical system model for a wireless-powered AF relay network.

Ground-truth evaluator used by every solver and benchmark in this package:
amplifying coefficients, destination/eavesdropper SINRs, the achievable
secrecy rate, per-relay jamming power budgets, and the eigen-decomposition
of the artificial-noise covariance. All quantities are linear watts; dB/dBm
conversions live at the channel-simulation and config boundaries.
"""

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass
class SystemParams:
    """Scalar constants of one network instance.

    ps_w: source transmit power (watts)
    eta: energy-harvesting efficiency in [0, 1)
    sigma_na2: relay antenna noise variance (watts)
    sigma_nc2: relay conversion noise variance (watts)
    sigma_nd2: destination noise variance (watts)
    sigma_ne2: per-eavesdropper noise variances, length K (watts)
    n_relays / k_eves: node counts N and K
    """

    ps_w: float
    eta: float
    sigma_na2: float
    sigma_nc2: float
    sigma_nd2: float
    sigma_ne2: np.ndarray
    n_relays: int
    k_eves: int

    def __post_init__(self):
        self.sigma_ne2 = _readonly(np.asarray(self.sigma_ne2, dtype=float).reshape(-1))
        if not (self.ps_w > 0 and self.sigma_na2 > 0 and self.sigma_nc2 > 0 and self.sigma_nd2 > 0):
            raise ValueError("powers and noise variances must be strictly positive")
        if not (0.0 <= self.eta < 1.0):
            raise ValueError("eta must lie in [0, 1)")
        if self.n_relays < 1 or self.k_eves < 0:
            raise ValueError("need n_relays >= 1 and k_eves >= 0")
        if self.sigma_ne2.shape != (self.k_eves,):
            raise ValueError("sigma_ne2 must have length k_eves")
        if self.k_eves and not np.all(self.sigma_ne2 > 0):
            raise ValueError("sigma_ne2 entries must be strictly positive")

    def scaled(self, power_scale: float) -> "SystemParams":
        """Same instance with every power multiplied by power_scale (unit change)."""
        return SystemParams(
            ps_w=self.ps_w * power_scale,
            eta=self.eta,
            sigma_na2=self.sigma_na2 * power_scale,
            sigma_nc2=self.sigma_nc2 * power_scale,
            sigma_nd2=self.sigma_nd2 * power_scale,
            sigma_ne2=self.sigma_ne2 * power_scale,
            n_relays=self.n_relays,
            k_eves=self.k_eves,
        )


@dataclass
class ChannelSet:
    """One realization of the complex channels.

    h_sr: source->relay, length N
    h_rd: relay->destination, length N
    h_re: relay->eavesdropper, N x K (column k = channels toward eavesdropper k)
    """

    h_sr: np.ndarray
    h_rd: np.ndarray
    h_re: np.ndarray

    def __post_init__(self):
        self.h_sr = _readonly(np.asarray(self.h_sr, dtype=complex).reshape(-1))
        self.h_rd = _readonly(np.asarray(self.h_rd, dtype=complex).reshape(-1))
        n = self.h_sr.shape[0]
        self.h_re = _readonly(np.asarray(self.h_re, dtype=complex).reshape(n, -1))
        if self.h_rd.shape != (n,):
            raise ValueError("h_sr and h_rd length mismatch")
        for a in (self.h_sr, self.h_rd, self.h_re):
            if not np.all(np.isfinite(a.view(float))):
                raise ValueError("channel entries must be finite")

    @property
    def n_relays(self) -> int:
        return self.h_sr.shape[0]

    @property
    def k_eves(self) -> int:
        return self.h_re.shape[1]

    def check_dims(self, params: SystemParams):
        if self.n_relays != params.n_relays or self.k_eves != params.k_eves:
            raise ValueError("channel dimensions do not match SystemParams")


@dataclass
class RelayPolicy:
    """Per-relay decisions: EH split alpha, AN split rho, AF phase theta.

    alpha/rho are clamped to [0,1] and theta wrapped to [0, 2*pi) at
    construction, so downstream code may rely on exact bounds.
    """

    alpha: np.ndarray
    rho: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        self.alpha = _readonly(np.clip(np.asarray(self.alpha, dtype=float).reshape(-1), 0.0, 1.0))
        self.rho = _readonly(np.clip(np.asarray(self.rho, dtype=float).reshape(-1), 0.0, 1.0))
        self.theta = _readonly(np.mod(np.asarray(self.theta, dtype=float).reshape(-1), TWO_PI))
        n = self.alpha.shape[0]
        if self.rho.shape != (n,) or self.theta.shape != (n,):
            raise ValueError("alpha, rho, theta must share length")


# relative tolerances fixed for solver-output dust
HERMITIAN_RTOL = 1e-12
PSD_RTOL = 1e-9


@dataclass
class JammingCovariance:
    """Hermitian PSD artificial-noise covariance S (watts).

    Hermitian deviation beyond 1e-12 relative or eigenvalues below
    -1e-9*(trace+1) raise; smaller negative eigenvalues are clipped to zero.
    """

    S: np.ndarray

    def __post_init__(self):
        S = np.asarray(self.S, dtype=complex)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise ValueError("S must be square")
        scale = max(np.abs(S).max(initial=0.0), 1.0)
        if np.abs(S - S.conj().T).max(initial=0.0) > HERMITIAN_RTOL * scale:
            raise ValueError("S is not Hermitian within tolerance")
        S = 0.5 * (S + S.conj().T)
        w, V = np.linalg.eigh(S)
        tr = float(np.trace(S).real)
        if w.min(initial=0.0) < -PSD_RTOL * (tr + 1.0):
            raise ValueError("S is not PSD within tolerance")
        if w.size and w[0] < 0.0:
            S = (V * np.maximum(w, 0.0)) @ V.conj().T
            S = 0.5 * (S + S.conj().T)
        self.S = _readonly(S)

    @classmethod
    def zeros(cls, n: int) -> "JammingCovariance":
        return cls(np.zeros((n, n), dtype=complex))

    @property
    def n(self) -> int:
        return self.S.shape[0]


@dataclass
class RateReport:
    """Rates in bits per channel use (the 1/2 two-slot factor included)."""

    r_sd: float
    r_se: np.ndarray = field(default_factory=lambda: np.zeros(0))
    r_sec: float = 0.0
    sinr_d: float = 0.0
    sinr_e: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.r_se = _readonly(np.asarray(self.r_se, dtype=float).reshape(-1))
        self.sinr_e = _readonly(np.asarray(self.sinr_e, dtype=float).reshape(-1))

    @property
    def max_r_se(self) -> float:
        return float(self.r_se.max(initial=0.0))


def amplification_coefficient(params: SystemParams, h_sri: complex, alpha_i: float,
                              rho_i: float, theta_i: float) -> complex:
    """AF coefficient beta_i of one relay for given splits and phase."""
    if not (0.0 <= alpha_i <= 1.0 and 0.0 <= rho_i <= 1.0):
        raise ValueError("alpha_i and rho_i must lie in [0, 1]")
    g = abs(h_sri) ** 2 * params.ps_w
    num = params.eta * (1.0 - rho_i) * alpha_i * g
    den = (1.0 - alpha_i) * (g + params.sigma_na2) + params.sigma_nc2
    return np.sqrt(num / den) * np.exp(1j * theta_i)


def _beta_vector(params: SystemParams, channels: ChannelSet, policy: RelayPolicy) -> np.ndarray:
    g = np.abs(channels.h_sr) ** 2 * params.ps_w
    num = params.eta * (1.0 - policy.rho) * policy.alpha * g
    den = (1.0 - policy.alpha) * (g + params.sigma_na2) + params.sigma_nc2
    return np.sqrt(num / den) * np.exp(1j * policy.theta)


def _quad_form(S: np.ndarray, h: np.ndarray) -> float:
    # trace(S h* h^T) = h^T S h*, real and >= 0 for PSD S
    v = h.conj()
    return float(np.real(v.conj() @ (S @ v)))


def _sinr_for_link(params: SystemParams, channels: ChannelSet, policy: RelayPolicy,
                   S: np.ndarray, h_out: np.ndarray, noise_out: float,
                   beta: np.ndarray | None = None) -> float:
    if beta is None:
        beta = _beta_vector(params, channels, policy)
    w_sig = h_out * beta * np.sqrt(1.0 - policy.alpha)   # h_out^T D_beta_alpha
    w_all = h_out * beta                                 # h_out^T D_beta
    num = params.ps_w * abs(np.sum(w_sig * channels.h_sr)) ** 2
    den = (_quad_form(S, h_out)
           + params.sigma_na2 * float(np.sum(np.abs(w_sig) ** 2))
           + params.sigma_nc2 * float(np.sum(np.abs(w_all) ** 2))
           + noise_out)
    return num / den


def sinr(params: SystemParams, channels: ChannelSet, policy: RelayPolicy,
         S: JammingCovariance, target) -> float:
    """SINR at the destination (target='destination') or eavesdropper k (target=k)."""
    channels.check_dims(params)
    if target == "destination":
        return _sinr_for_link(params, channels, policy, S.S, channels.h_rd, params.sigma_nd2)
    k = int(target)
    if not 0 <= k < params.k_eves:
        raise ValueError("eavesdropper index out of range")
    return _sinr_for_link(params, channels, policy, S.S, channels.h_re[:, k],
                          float(params.sigma_ne2[k]))


def secrecy_rate(params: SystemParams, channels: ChannelSet, policy: RelayPolicy,
                 S: JammingCovariance) -> RateReport:
    """Achievable secrecy rate (r_sd - max_k r_se,k)^+ with per-link reports."""
    channels.check_dims(params)
    beta = _beta_vector(params, channels, policy)
    sinr_d = _sinr_for_link(params, channels, policy, S.S, channels.h_rd,
                            params.sigma_nd2, beta=beta)
    sinr_e = np.array([
        _sinr_for_link(params, channels, policy, S.S, channels.h_re[:, k],
                       float(params.sigma_ne2[k]), beta=beta)
        for k in range(params.k_eves)
    ])
    r_sd = 0.5 * np.log2(1.0 + sinr_d)
    r_se = 0.5 * np.log2(1.0 + sinr_e) if sinr_e.size else np.zeros(0)
    r_sec = max(0.0, r_sd - (r_se.max() if r_se.size else 0.0))
    return RateReport(r_sd=float(r_sd), r_se=r_se, r_sec=float(r_sec),
                      sinr_d=float(sinr_d), sinr_e=sinr_e)


def jamming_budget(params: SystemParams, channels: ChannelSet, policy: RelayPolicy) -> np.ndarray:
    """Per-relay AN power budget eta*rho_i*alpha_i*Ps*|h_sri|^2 (signal term only)."""
    return params.eta * policy.rho * policy.alpha * params.ps_w * np.abs(channels.h_sr) ** 2


def jamming_budget_slack(params: SystemParams, channels: ChannelSet, policy: RelayPolicy,
                         S: JammingCovariance) -> np.ndarray:
    """budget_i - trace(S E_i); the pair (policy, S) is feasible iff all >= -tol."""
    channels.check_dims(params)
    return jamming_budget(params, channels, policy) - np.real(np.diag(S.S))


def jamming_beams(S: JammingCovariance, tol: float = 1e-9):
    """Truncated EVD of S: list of (power sigma_j, unit direction v_j), descending.

    Keeps eigenvalues above tol*lambda_max; the kept pairs reconstruct S up to
    the discarded dust.
    """
    w, V = np.linalg.eigh(S.S)
    if w.size == 0 or w[-1] <= 0.0:
        return []
    keep = w > tol * w[-1]
    order = np.argsort(w[keep])[::-1]
    sigmas = w[keep][order]
    vecs = V[:, keep][:, order]
    return [(float(sigmas[j]), vecs[:, j].copy()) for j in range(sigmas.size)]
