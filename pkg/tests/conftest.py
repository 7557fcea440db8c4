import numpy as np
import pytest

from relaysec.chansim import RngSpec, sample_scenario
from relaysec.model import SystemParams


def mk_params(n: int, k: int, **over) -> SystemParams:
    """Section-default constants: 40 dBm source, -50/-80 dBm noise floors."""
    base = dict(ps_w=10.0, eta=0.5, sigma_na2=1e-8, sigma_nc2=1e-11,
                sigma_nd2=1e-8 + 1e-11, sigma_ne2=np.full(k, 1e-8 + 1e-11),
                n_relays=n, k_eves=k)
    base.update(over)
    return SystemParams(**base)


def mk_scenario(n: int, k: int, seed: int, R: float = 5.0):
    params = mk_params(n, k)
    topo, channels = sample_scenario(params, R, rng_spec=RngSpec(1234, seed))
    return params, channels


@pytest.fixture
def params2x1():
    return mk_params(2, 1)
