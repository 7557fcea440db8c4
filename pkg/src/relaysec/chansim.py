"""Random topologies and Rayleigh channels with reproducible seeded streams.

Nodes are dropped in a disc of radius R centered at the origin: radius drawn
Uniform[0, R] (deliberately not area-uniform) and angle Uniform[0, 2*pi).
Each channel entry is circularly symmetric complex Gaussian with variance
equal to the path loss of the corresponding link. Randomness is a pure
function of RngSpec via the counter-based philox4x64 generator, so any
(master_seed, stream_id) pair reproduces bit-identical draws on any host.
"""

from dataclasses import dataclass

import numpy as np

from .model import ChannelSet, SystemParams


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** (x_dbm / 10.0) * 1e-3


def watts_to_dbm(x_w: float) -> float:
    if x_w <= 0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * np.log10(x_w / 1e-3)


@dataclass(frozen=True)
class PathLossModel:
    A0: float = 1e-3
    d0: float = 1.0
    exponent: float = 2.5


def path_loss(d: float, A0: float = 1e-3, d0: float = 1.0, exponent: float = 2.5) -> float:
    """A0 * (d/d0)^(-exponent); used as the variance of the channel entry."""
    if np.any(np.asarray(d) <= 0):
        raise ValueError("distance must be positive")
    return A0 * (np.asarray(d, dtype=float) / d0) ** (-exponent)


@dataclass(frozen=True)
class RngSpec:
    """Named deterministic stream: philox4x64 keyed by (master_seed, stream_id)."""

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed & 0xFFFFFFFFFFFFFFFF,
                        self.stream_id & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class PlacementRule:
    """Source/destination coordinates; None = default (-R, 0) / (+R, 0)."""

    source: tuple | None = None
    dest: tuple | None = None

    def positions(self, R: float):
        src = np.array(self.source if self.source is not None else (-R, 0.0), dtype=float)
        dst = np.array(self.dest if self.dest is not None else (R, 0.0), dtype=float)
        return src, dst


@dataclass
class Topology:
    source_pos: np.ndarray
    dest_pos: np.ndarray
    relay_pos: np.ndarray  # N x 2
    eve_pos: np.ndarray    # K x 2
    R: float

    def __post_init__(self):
        self.source_pos = np.asarray(self.source_pos, dtype=float).reshape(2)
        self.dest_pos = np.asarray(self.dest_pos, dtype=float).reshape(2)
        self.relay_pos = np.asarray(self.relay_pos, dtype=float).reshape(-1, 2)
        self.eve_pos = np.asarray(self.eve_pos, dtype=float).reshape(-1, 2)
        for p in (self.relay_pos, self.eve_pos):
            if p.size and np.linalg.norm(p, axis=1).max() > self.R * (1 + 1e-12):
                raise ValueError("relay/eavesdropper outside the deployment disc")


def _draw_points(rng: np.random.Generator, count: int, R: float) -> np.ndarray:
    radius = rng.uniform(0.0, R, size=count)
    angle = rng.uniform(0.0, 2.0 * np.pi, size=count)
    return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])


def _rayleigh(rng: np.random.Generator, variance: np.ndarray) -> np.ndarray:
    shape = np.asarray(variance).shape
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return np.sqrt(np.asarray(variance) / 2.0) * (re + 1j * im)


def sample_scenario(params: SystemParams, R: float, rng_spec: RngSpec,
                    placement: PlacementRule = PlacementRule(),
                    pathloss: PathLossModel = PathLossModel()):
    """Draw one (Topology, ChannelSet) for the given stream.

    Draw order is fixed (relay points, eve points, h_sr, h_rd, h_re) so the
    stream is part of the reproducibility contract.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    rng = rng_spec.generator()
    src, dst = placement.positions(R)
    relay_pos = _draw_points(rng, params.n_relays, R)
    eve_pos = _draw_points(rng, params.k_eves, R)
    topo = Topology(source_pos=src, dest_pos=dst, relay_pos=relay_pos, eve_pos=eve_pos, R=R)

    d_sr = np.linalg.norm(relay_pos - src, axis=1)
    d_rd = np.linalg.norm(relay_pos - dst, axis=1)
    # N x K matrix of relay->eve distances
    if params.k_eves:
        d_re = np.linalg.norm(relay_pos[:, None, :] - eve_pos[None, :, :], axis=2)
    else:
        d_re = np.zeros((params.n_relays, 0))

    pl = lambda d: path_loss(d, pathloss.A0, pathloss.d0, pathloss.exponent)
    h_sr = _rayleigh(rng, pl(d_sr))
    h_rd = _rayleigh(rng, pl(d_rd))
    h_re = _rayleigh(rng, pl(d_re)) if params.k_eves else np.zeros((params.n_relays, 0), dtype=complex)
    return topo, ChannelSet(h_sr=h_sr, h_rd=h_rd, h_re=h_re)
