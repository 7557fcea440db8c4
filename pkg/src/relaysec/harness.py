"""Experiment configuration, scheme dispatch, Monte Carlo sweeps, persistence.

Determinism contract: the record list is a pure function of the config.
Channel draws use philox streams keyed by (master_seed, stream_id) with
stream_id = fnv1a64("axis=value;realization=id"), so any (sweep value,
realization) pair can be reproduced in isolation; the random-policy scheme
XORs a salt into the stream id so its draws never perturb the shared
channel stream.  solve_time_ms records the number of conic solver
invocations (a deterministic work proxy, not wall-clock), which keeps
repeated runs byte-identical.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields as dc_fields, replace

import numpy as np

from . import chansim, distributed, dps, model, sps
from .chansim import PathLossModel, PlacementRule, RngSpec, dbm_to_watts
from .distributed import DistributedConfig
from .model import JammingCovariance, RelayPolicy, SystemParams
from .tausearch import SolveOpts

__all__ = [
    "SCHEMES",
    "CSV_HEADER",
    "TRACE_HEADER",
    "ExperimentConfig",
    "ResultRecord",
    "fnv1a64",
    "stream_id_for",
    "run_experiment",
    "run_convergence",
    "write_results",
    "read_results",
    "write_trace",
    "all_succeeded",
]

SCHEMES = ("CJ-SPS", "CJ-DPS", "NoCJ-SPS", "NoCJ-DPS",
           "Distributed-SPS", "Distributed-DPS", "RandomPS")

CSV_HEADER = ("scheme,sweep_axis,sweep_value,realization_id,seed,secrecy_rate_bits,"
              "r_sd,max_r_se,outer_iterations,bisection_iterations,solve_time_ms,"
              "status,rank_ratio_x1,rank_s,max_budget_violation,duality_gap")
TRACE_HEADER = "realization_id,seed,iteration,secrecy_rate_bits"

SWEEP_AXES = ("N", "K", "Ps_dBm", "none")

# keeps the policy stream of the random baseline disjoint from the channel
# stream that shares the same realization id
RANDOM_PS_SALT = 0x9E3779B97F4A7C15

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(text: str) -> int:
    """FNV-1a 64-bit hash of the UTF-8 bytes (stable across runs/platforms)."""
    h = _FNV_OFFSET
    for b in text.encode("utf-8"):
        h = ((h ^ b) * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def _canon_value(axis: str, value):
    if axis == "none":
        return "none"
    if axis in ("N", "K"):
        return repr(int(value))
    return repr(float(value))


def stream_id_for(axis: str, value, realization_id: int) -> int:
    return fnv1a64(f"{axis}={_canon_value(axis, value)};realization={int(realization_id)}")


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation campaign; every field has a physically-sensible default.

    Powers are configured in dBm and converted once; destination noise is
    sigma_na2 + sigma_nc2 in watts and every eavesdropper gets the same
    floor.  The sweep axis overrides N, K, or the source power per sweep
    value; "none" runs the base point alone.
    """

    ps_dbm: float = 40.0
    sigma_na_dbm: float = -50.0
    sigma_nc_dbm: float = -80.0
    eta: float = 0.5
    R: float = 5.0
    pathloss: PathLossModel = PathLossModel()
    N: int = 4
    K: int = 2
    realizations: int = 500
    master_seed: int = 2024
    schemes: tuple = SCHEMES
    sweep_axis: str = "none"
    sweep_values: tuple = ()
    opts: SolveOpts = SolveOpts()
    delta: float = 0.5
    sps_alpha_bar: float = 0.5
    placement: PlacementRule = PlacementRule()

    def __post_init__(self):
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"sweep axis must be one of {SWEEP_AXES}, got {self.sweep_axis!r}")
        if self.sweep_axis != "none" and not self.sweep_values:
            raise ValueError("sweep values must be nonempty for a sweeping axis")
        bad = [s for s in self.schemes if s not in SCHEMES]
        if bad:
            raise ValueError(f"unknown scheme names {bad}; valid: {list(SCHEMES)}")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        kw = {}
        for key in ("ps_dbm", "sigma_na_dbm", "sigma_nc_dbm", "eta", "R", "delta",
                    "sps_alpha_bar"):
            if key in d:
                kw[key] = float(d.pop(key))
        for key in ("N", "K", "realizations", "master_seed"):
            if key in d:
                kw[key] = int(d.pop(key))
        if "schemes" in d:
            kw["schemes"] = tuple(str(s) for s in d.pop("schemes"))
        if "pathloss" in d:
            kw["pathloss"] = _parse_strict(d.pop("pathloss"), PathLossModel, "pathloss")
        if "sweep" in d:
            sw = dict(d.pop("sweep"))
            axis = str(sw.pop("axis", "none"))
            values = tuple(sw.pop("values", ()))
            if sw:
                raise ValueError(f"unknown keys in sweep: {sorted(sw)}")
            kw["sweep_axis"] = axis
            kw["sweep_values"] = values
        if "tolerances" in d:
            kw["opts"] = _parse_strict(d.pop("tolerances"), SolveOpts, "tolerances")
        if "placement" in d:
            pl = dict(d.pop("placement"))
            src = pl.pop("source", None)
            dst = pl.pop("dest", None)
            if pl:
                raise ValueError(f"unknown keys in placement: {sorted(pl)}")
            kw["placement"] = PlacementRule(
                source=None if src is None else tuple(src),
                dest=None if dst is None else tuple(dst))
        if d:
            raise ValueError(f"unknown config keys: {sorted(d)}")
        return cls(**kw)

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {path!r}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ValueError(f"config {path!r} must hold a single JSON object")
        return cls.from_dict(doc)

    def sweep_points(self):
        if self.sweep_axis == "none":
            return [None]
        return list(self.sweep_values)

    def system_params(self, sweep_value=None) -> SystemParams:
        n, k, ps_dbm = self.N, self.K, self.ps_dbm
        if self.sweep_axis == "N" and sweep_value is not None:
            n = int(sweep_value)
        elif self.sweep_axis == "K" and sweep_value is not None:
            k = int(sweep_value)
        elif self.sweep_axis == "Ps_dBm" and sweep_value is not None:
            ps_dbm = float(sweep_value)
        na = dbm_to_watts(self.sigma_na_dbm)
        nc = dbm_to_watts(self.sigma_nc_dbm)
        nd = na + nc
        return SystemParams(ps_w=dbm_to_watts(ps_dbm), eta=self.eta, sigma_na2=na,
                            sigma_nc2=nc, sigma_nd2=nd, sigma_ne2=np.full(k, nd),
                            n_relays=n, k_eves=k)


def _parse_strict(d: dict, cls, label: str):
    d = dict(d)
    names = {f.name for f in dc_fields(cls)}
    bad = sorted(set(d) - names)
    if bad:
        raise ValueError(f"unknown keys in {label}: {bad}")
    return cls(**d)


@dataclass(frozen=True)
class ResultRecord:
    """One scheme on one realization; fields mirror the CSV columns."""

    scheme: str
    sweep_axis: str
    sweep_value: float | None
    realization_id: int
    seed: int
    secrecy_rate_bits: float
    r_sd: float
    max_r_se: float
    outer_iterations: int
    bisection_iterations: int
    solve_time_ms: int
    status: str
    rank_ratio_x1: float
    rank_s: int
    max_budget_violation: float
    duality_gap: float


def _num_rank(S: np.ndarray, rel_tol: float = 1e-6) -> int:
    w = np.linalg.eigvalsh(S)
    if w.size == 0 or w[-1] <= 0.0:
        return 0
    return int(np.sum(w > rel_tol * w[-1]))


def _violation(params, channels, policy, S) -> float:
    slack = model.jamming_budget_slack(params, channels, policy, S)
    return max(0.0, -float(np.min(slack)))


def _failed(scheme, axis, value, rid, sid, exc) -> ResultRecord:
    nan = float("nan")
    return ResultRecord(scheme=scheme, sweep_axis=axis, sweep_value=value,
                        realization_id=rid, seed=sid, secrecy_rate_bits=nan,
                        r_sd=nan, max_r_se=nan, outer_iterations=0,
                        bisection_iterations=0, solve_time_ms=0,
                        status=f"failed:{type(exc).__name__}", rank_ratio_x1=nan,
                        rank_s=0, max_budget_violation=nan, duality_gap=nan)


def _run_realization(config: ExperimentConfig, sweep_value, rid: int):
    axis = config.sweep_axis
    value = None if sweep_value is None else float(sweep_value)
    sid = stream_id_for(axis, sweep_value, rid)
    wanted = [s for s in SCHEMES if s in config.schemes]
    try:
        params = config.system_params(sweep_value)
        topo, channels = chansim.sample_scenario(
            params, config.R, RngSpec(config.master_seed, sid),
            placement=config.placement, pathloss=config.pathloss)
    except Exception as exc:
        return [_failed(s, axis, value, rid, sid, exc) for s in wanted]

    opts = config.opts
    dcfg = DistributedConfig(delta=config.delta, alpha_bar_sps=config.sps_alpha_bar)

    def base(scheme, rate, status, **kw):
        row = dict(scheme=scheme, sweep_axis=axis, sweep_value=value,
                   realization_id=rid, seed=sid,
                   secrecy_rate_bits=rate.r_sec, r_sd=rate.r_sd,
                   max_r_se=rate.max_r_se, outer_iterations=0,
                   bisection_iterations=0, solve_time_ms=0, status=status,
                   rank_ratio_x1=0.0, rank_s=0, max_budget_violation=0.0,
                   duality_gap=0.0)
        row.update(kw)
        return ResultRecord(**row)

    nocj_dps = None
    if "NoCJ-DPS" in wanted or "CJ-DPS" in wanted:
        try:
            nocj_dps = dps.solve_p2_prime(params, channels,
                                          JammingCovariance.zeros(params.n_relays), opts)
        except Exception:
            nocj_dps = None

    records = []
    for scheme in wanted:
        try:
            if scheme == "CJ-SPS" or scheme == "NoCJ-SPS":
                sol = sps.solve_p1(params, channels, config.sps_alpha_bar, opts,
                                   no_cj=(scheme == "NoCJ-SPS"))
                rec = base(scheme, sol.rate, sol.status,
                           bisection_iterations=sol.bisection_iterations,
                           solve_time_ms=sol.solve_count,
                           rank_ratio_x1=sol.rank_ratio_x1, rank_s=sol.rank_s,
                           max_budget_violation=_violation(params, channels, sol.policy, sol.S),
                           duality_gap=sol.duality_gap)
            elif scheme == "NoCJ-DPS":
                sol = nocj_dps
                if sol is None:
                    sol = dps.solve_p2_prime(params, channels,
                                             JammingCovariance.zeros(params.n_relays), opts)
                rec = base(scheme, sol.rate, sol.status,
                           bisection_iterations=sol.bisection_iterations,
                           solve_time_ms=sol.solve_count,
                           rank_ratio_x1=sol.rank_ratio_u1,
                           max_budget_violation=_violation(params, channels, sol.policy, sol.S_bar),
                           duality_gap=sol.duality_gap)
            elif scheme == "CJ-DPS":
                sol = dps.alternate(params, channels, opts, nocj=nocj_dps)
                diag = sol.diagnostics
                rec = base(scheme, sol.rate, sol.status,
                           outer_iterations=sol.outer_iterations,
                           bisection_iterations=diag["bisection_iterations"],
                           solve_time_ms=sol.solve_count,
                           rank_ratio_x1=max(diag["rank_ratio_x1"], diag["rank_ratio_u1"]),
                           rank_s=diag["rank_s"],
                           max_budget_violation=_violation(params, channels, sol.policy, sol.S),
                           duality_gap=diag["duality_gap"])
            elif scheme in ("Distributed-SPS", "Distributed-DPS"):
                mode = "sps" if scheme.endswith("SPS") else "dps"
                pol, S, rate = distributed.run_distributed(params, channels, mode, dcfg)
                rec = base(scheme, rate, "optimal", rank_s=_num_rank(S.S),
                           max_budget_violation=_violation(params, channels, pol, S))
            else:  # RandomPS
                rng = RngSpec(config.master_seed, sid ^ RANDOM_PS_SALT).generator()
                alpha = rng.uniform(0.0, 1.0, params.n_relays)
                rho = rng.uniform(0.0, 1.0, params.n_relays)
                theta = distributed.cophase_angles(channels)
                pol = RelayPolicy(alpha=alpha, rho=rho, theta=theta)
                S = JammingCovariance.zeros(params.n_relays)
                rate = model.secrecy_rate(params, channels, pol, S)
                rec = base(scheme, rate, "optimal")
            records.append(rec)
        except Exception as exc:
            records.append(_failed(scheme, axis, value, rid, sid, exc))
    return records


def run_experiment(config: ExperimentConfig, threads: int = 1):
    """All (sweep value x realization x scheme) records, in stable order.

    Order: sweep values as configured, realizations ascending, schemes in
    canonical SCHEMES order.  The same list comes back for any thread
    count; failures are carried in the status column, never raised.
    """
    points = config.sweep_points()
    tasks = [(vi, rid) for vi in range(len(points)) for rid in range(config.realizations)]
    out = {}
    if threads <= 1:
        for vi, rid in tasks:
            out[(vi, rid)] = _run_realization(config, points[vi], rid)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = {pool.submit(_run_realization, config, points[vi], rid): (vi, rid)
                    for vi, rid in tasks}
            for fut, key in futs.items():
                out[key] = fut.result()
    records = []
    for vi, rid in tasks:
        records.extend(out[(vi, rid)])
    return records


def run_convergence(config: ExperimentConfig, threads: int = 1):
    """Per-outer-iteration incumbent rate of the alternating scheme.

    Returns (realization_id, seed, iteration, rate) rows; iteration 0 is
    the fixed-split initialization.  Sweeping is ignored: traces are drawn
    at the base configuration point.
    """
    base_cfg = replace(config, sweep_axis="none", sweep_values=())

    def one(rid: int):
        sid = stream_id_for("none", None, rid)
        params = base_cfg.system_params()
        topo, channels = chansim.sample_scenario(
            params, base_cfg.R, RngSpec(base_cfg.master_seed, sid),
            placement=base_cfg.placement, pathloss=base_cfg.pathloss)
        sol = dps.alternate(params, channels, base_cfg.opts)
        return [(rid, sid, it, float(r)) for it, r in enumerate(sol.trace)]

    rows = {}
    if threads <= 1:
        for rid in range(base_cfg.realizations):
            rows[rid] = one(rid)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = {pool.submit(one, rid): rid for rid in range(base_cfg.realizations)}
            for fut, rid in futs.items():
                rows[rid] = fut.result()
    flat = []
    for rid in range(base_cfg.realizations):
        flat.extend(rows[rid])
    return flat


# -- persistence

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.17e}"
    return str(x)


_RECORD_FIELDS = [f.name for f in dc_fields(ResultRecord)]


def write_results(records, path: str, format: str = "csv") -> None:
    """Emit records as CSV (exact pinned header) or JSON lines."""
    if format not in ("csv", "json-lines"):
        raise ValueError(f"format must be 'csv' or 'json-lines', got {format!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if format == "csv":
                fh.write(CSV_HEADER + "\n")
                for r in records:
                    fh.write(",".join(_fmt(getattr(r, name)) for name in _RECORD_FIELDS) + "\n")
            else:
                for r in records:
                    row = {name: getattr(r, name) for name in _RECORD_FIELDS}
                    fh.write(json.dumps(row, allow_nan=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path!r}: {exc}") from exc


def write_trace(rows, path: str) -> None:
    """Emit convergence rows realization_id,seed,iteration,secrecy_rate_bits."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(TRACE_HEADER + "\n")
            for rid, sid, it, rate in rows:
                fh.write(f"{rid},{sid},{it},{rate:.17e}\n")
    except OSError as exc:
        raise OSError(f"cannot write trace to {path!r}: {exc}") from exc


def read_results(path: str):
    """Inverse of write_results(format='csv'); returns ResultRecord list."""
    ints = {"realization_id", "seed", "outer_iterations", "bisection_iterations",
            "solve_time_ms", "rank_s"}
    strs = {"scheme", "sweep_axis", "status"}
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != CSV_HEADER.split(","):
                raise ValueError(f"unexpected header in {path!r}")
            out = []
            for row in reader:
                kw = {}
                for name, cell in zip(_RECORD_FIELDS, row):
                    if name in strs:
                        kw[name] = cell
                    elif name in ints:
                        kw[name] = int(cell)
                    elif cell == "":
                        kw[name] = None
                    else:
                        kw[name] = float(cell)
                out.append(ResultRecord(**kw))
            return out
    except OSError as exc:
        raise OSError(f"cannot read results from {path!r}: {exc}") from exc


def all_succeeded(records) -> bool:
    """True when every record ended optimal or in the documented zero-rate state."""
    return all(r.status in ("optimal", "zero-rate") for r in records)
