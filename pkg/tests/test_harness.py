"""Harness tests: config parsing, stream ids, persistence, scheme dispatch."""

import json
import math
from dataclasses import replace

import numpy as np
import pytest

from relaysec import cli, harness
from relaysec.harness import (CSV_HEADER, SCHEMES, TRACE_HEADER, ExperimentConfig,
                              ResultRecord, all_succeeded, fnv1a64, read_results,
                              run_experiment, stream_id_for, write_results,
                              write_trace)

CHEAP = ("Distributed-SPS", "Distributed-DPS", "RandomPS")


def cheap_config(**over):
    base = dict(N=2, K=1, realizations=2, master_seed=11, schemes=CHEAP)
    base.update(over)
    return ExperimentConfig(**base)


def test_fnv1a64_published_vectors():
    assert fnv1a64("") == 0xCBF29CE484222325
    assert fnv1a64("a") == 0xAF63DC4C8601EC8C
    assert fnv1a64("foobar") == 0x85944171F73967E8


def test_stream_ids_distinct_and_canonical():
    ids = {stream_id_for("N", 4, r) for r in range(50)}
    assert len(ids) == 50
    assert stream_id_for("N", 4, 0) != stream_id_for("K", 4, 0)
    assert stream_id_for("N", 4, 0) != stream_id_for("N", 6, 0)
    # numeric spellings of the same sweep value share a stream
    assert stream_id_for("Ps_dBm", 10, 0) == stream_id_for("Ps_dBm", 10.0, 0)
    assert stream_id_for("N", 4.0, 0) == stream_id_for("N", 4, 0)
    # the base point ignores whatever rides in the value slot
    assert stream_id_for("none", None, 3) == stream_id_for("none", "x", 3)


def test_system_params_derivation():
    cfg = ExperimentConfig()
    p = cfg.system_params()
    assert p.ps_w == pytest.approx(10.0, rel=1e-12)
    assert p.sigma_nd2 == p.sigma_na2 + p.sigma_nc2
    np.testing.assert_array_equal(p.sigma_ne2, np.full(cfg.K, p.sigma_nd2))
    assert (p.n_relays, p.k_eves) == (cfg.N, cfg.K)

    swept = replace(cfg, sweep_axis="N", sweep_values=(6,))
    assert swept.system_params(6).n_relays == 6
    assert swept.system_params(6).k_eves == cfg.K
    swept = replace(cfg, sweep_axis="K", sweep_values=(5,))
    assert swept.system_params(5).k_eves == 5
    swept = replace(cfg, sweep_axis="Ps_dBm", sweep_values=(10.0,))
    assert swept.system_params(10.0).ps_w == pytest.approx(0.01, rel=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(sweep_axis="M")
    with pytest.raises(ValueError):
        ExperimentConfig(sweep_axis="N")          # no values
    with pytest.raises(ValueError):
        ExperimentConfig(schemes=("CJ-SPS", "Mystery"))
    with pytest.raises(ValueError):
        ExperimentConfig(realizations=0)


def test_from_dict_rejects_unknown_keys():
    assert ExperimentConfig.from_dict({}) == ExperimentConfig()
    with pytest.raises(ValueError, match="unknown config keys"):
        ExperimentConfig.from_dict({"pss_dbm": 30.0})
    with pytest.raises(ValueError, match="sweep"):
        ExperimentConfig.from_dict({"sweep": {"axis": "N", "values": [2], "step": 1}})
    with pytest.raises(ValueError, match="tolerances"):
        ExperimentConfig.from_dict({"tolerances": {"solver_tolerance": 1e-8}})
    with pytest.raises(ValueError, match="placement"):
        ExperimentConfig.from_dict({"placement": {"source": [0, 0], "middle": [1, 1]}})
    with pytest.raises(ValueError, match="pathloss"):
        ExperimentConfig.from_dict({"pathloss": {"A0": 1e-3, "slope": 2.0}})


def test_from_dict_nested_sections():
    cfg = ExperimentConfig.from_dict({
        "ps_dbm": 30, "N": 3, "K": 1, "realizations": 4,
        "schemes": ["CJ-SPS"],
        "sweep": {"axis": "Ps_dBm", "values": [10, 20]},
        "tolerances": {"solver_tol": 1e-7, "outer_max_iter": 5},
        "placement": {"source": [-2, 0], "dest": [2, 0]},
        "pathloss": {"exponent": 3.0},
    })
    assert cfg.ps_dbm == 30.0 and cfg.N == 3
    assert cfg.sweep_axis == "Ps_dBm" and cfg.sweep_values == (10, 20)
    assert cfg.opts.solver_tol == 1e-7 and cfg.opts.outer_max_iter == 5
    assert cfg.placement.source == (-2, 0) and cfg.placement.dest == (2, 0)
    assert cfg.pathloss.exponent == 3.0


def test_from_json_errors(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(OSError, match="nope.json"):
        ExperimentConfig.from_json(str(missing))
    bad = tmp_path / "list.json"
    bad.write_text("[1, 2]")
    with pytest.raises(ValueError, match="single JSON object"):
        ExperimentConfig.from_json(str(bad))
    good = tmp_path / "ok.json"
    good.write_text(json.dumps({"N": 2, "K": 1}))
    assert ExperimentConfig.from_json(str(good)).N == 2


def _synthetic_records():
    return [
        ResultRecord(scheme="CJ-SPS", sweep_axis="none", sweep_value=None,
                     realization_id=0, seed=123, secrecy_rate_bits=0.12345678901234567,
                     r_sd=1.5, max_r_se=0.25, outer_iterations=0,
                     bisection_iterations=7, solve_time_ms=42, status="optimal",
                     rank_ratio_x1=1e-9, rank_s=1, max_budget_violation=0.0,
                     duality_gap=1e-10),
        ResultRecord(scheme="CJ-DPS", sweep_axis="Ps_dBm", sweep_value=20.0,
                     realization_id=1, seed=456, secrecy_rate_bits=float("nan"),
                     r_sd=float("nan"), max_r_se=float("nan"), outer_iterations=0,
                     bisection_iterations=0, solve_time_ms=0,
                     status="failed:RuntimeError", rank_ratio_x1=float("nan"),
                     rank_s=0, max_budget_violation=float("nan"),
                     duality_gap=float("nan")),
    ]


def test_csv_round_trip_exact(tmp_path):
    path = str(tmp_path / "r.csv")
    recs = _synthetic_records()
    write_results(recs, path)
    back = read_results(path)
    assert len(back) == 2
    for a, b in zip(recs, back):
        for name in harness._RECORD_FIELDS:
            va, vb = getattr(a, name), getattr(b, name)
            if isinstance(va, float) and math.isnan(va):
                assert math.isnan(vb)
            else:
                assert va == vb, name


def test_csv_empty_and_header(tmp_path):
    path = str(tmp_path / "empty.csv")
    write_results([], path)
    assert (tmp_path / "empty.csv").read_text() == CSV_HEADER + "\n"
    assert read_results(path) == []
    (tmp_path / "other.csv").write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="unexpected header"):
        read_results(str(tmp_path / "other.csv"))


def test_json_lines_format(tmp_path):
    path = str(tmp_path / "r.jsonl")
    write_results(_synthetic_records(), path, format="json-lines")
    lines = (tmp_path / "r.jsonl").read_text().splitlines()
    assert len(lines) == 2
    doc = json.loads(lines[0])
    assert doc["scheme"] == "CJ-SPS" and doc["solve_time_ms"] == 42
    assert math.isnan(json.loads(lines[1])["secrecy_rate_bits"])
    with pytest.raises(ValueError):
        write_results([], path, format="parquet")


def test_write_errors_name_the_path(tmp_path):
    target = str(tmp_path / "no_such_dir" / "r.csv")
    with pytest.raises(OSError, match="no_such_dir"):
        write_results([], target)
    with pytest.raises(OSError, match="no_such_dir"):
        write_trace([], target)
    with pytest.raises(OSError, match="no_such_dir"):
        read_results(target)


def test_trace_file_round_trip(tmp_path):
    rows = [(0, 99, 0, 0.125), (0, 99, 1, 0.25)]
    path = tmp_path / "t.csv"
    write_trace(rows, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == TRACE_HEADER
    got = [ln.split(",") for ln in lines[1:]]
    assert [int(g[2]) for g in got] == [0, 1]
    assert float(got[1][3]) == 0.25


def test_all_succeeded_and_failure_isolation(monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("deliberate")
    monkeypatch.setattr("relaysec.distributed.run_distributed", boom)
    records = run_experiment(cheap_config(realizations=1))
    by_scheme = {r.scheme: r for r in records}
    assert by_scheme["Distributed-SPS"].status == "failed:RuntimeError"
    assert by_scheme["Distributed-DPS"].status == "failed:RuntimeError"
    assert by_scheme["RandomPS"].status == "optimal"
    assert math.isnan(by_scheme["Distributed-SPS"].secrecy_rate_bits)
    assert not all_succeeded(records)
    assert all_succeeded([by_scheme["RandomPS"]])


def test_thread_count_does_not_change_records():
    cfg = cheap_config(realizations=4)
    serial = run_experiment(cfg, threads=1)
    threaded = run_experiment(cfg, threads=3)
    assert serial == threaded
    # canonical ordering: realizations ascending, schemes in SCHEMES order
    order = [(r.realization_id, r.scheme) for r in serial]
    assert order == [(rid, s) for rid in range(4) for s in CHEAP]


def test_scheme_subset_does_not_perturb_shared_draws():
    both = run_experiment(cheap_config(schemes=("Distributed-SPS", "RandomPS")))
    alone = run_experiment(cheap_config(schemes=("Distributed-SPS",)))
    with_r = [r for r in both if r.scheme == "Distributed-SPS"]
    assert with_r == alone


def test_scheme_order_canonicalized():
    recs = run_experiment(cheap_config(realizations=1,
                                       schemes=("RandomPS", "Distributed-SPS")))
    assert [r.scheme for r in recs] == ["Distributed-SPS", "RandomPS"]


@pytest.fixture(scope="module")
def full_records():
    cfg = ExperimentConfig(N=2, K=1, realizations=1, master_seed=77,
                           schemes=SCHEMES)
    return run_experiment(cfg)


def test_all_schemes_complete(full_records):
    assert [r.scheme for r in full_records] == list(SCHEMES)
    assert all_succeeded(full_records)
    for r in full_records:
        assert r.sweep_axis == "none" and r.sweep_value is None
        assert not math.isnan(r.secrecy_rate_bits)
        assert r.secrecy_rate_bits >= 0.0
        assert r.max_budget_violation <= 1e-7


def test_solve_time_counts_conic_calls(full_records):
    by_scheme = {r.scheme: r for r in full_records}
    for s in ("CJ-SPS", "NoCJ-SPS", "CJ-DPS", "NoCJ-DPS"):
        assert by_scheme[s].solve_time_ms > 0, s
    for s in ("Distributed-SPS", "Distributed-DPS", "RandomPS"):
        assert by_scheme[s].solve_time_ms == 0, s
    assert by_scheme["CJ-DPS"].outer_iterations >= 1


def test_real_records_survive_csv(tmp_path, full_records):
    path = str(tmp_path / "full.csv")
    write_results(full_records, path)
    assert read_results(path) == full_records


def cli_config(tmp_path, **over):
    doc = dict(N=2, K=1, realizations=1, master_seed=5,
               schemes=list(CHEAP))
    doc.update(over)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    return str(p)


def test_cli_run_success(tmp_path, capsys):
    cfg = cli_config(tmp_path)
    out = str(tmp_path / "out.csv")
    assert cli.main(["run", "--config", cfg, "--out", out]) == 0
    assert "wrote 3 records" in capsys.readouterr().err
    assert [r.scheme for r in read_results(out)] == list(CHEAP)


def test_cli_exit_code_2_on_config_error(tmp_path, capsys):
    out = str(tmp_path / "out.csv")
    rc = cli.main(["run", "--config", str(tmp_path / "absent.json"), "--out", out])
    assert rc == 2
    assert "config error" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"N": 2, "bogus": 1}))
    assert cli.main(["run", "--config", str(bad), "--out", out]) == 2


def test_cli_exit_code_1_on_failures(tmp_path, monkeypatch, capsys):
    def boom(*a, **k):
        raise RuntimeError("deliberate")
    monkeypatch.setattr("relaysec.distributed.run_distributed", boom)
    cfg = cli_config(tmp_path, schemes=["Distributed-SPS"])
    out = str(tmp_path / "out.csv")
    assert cli.main(["run", "--config", cfg, "--out", out]) == 1
    assert "first failure" in capsys.readouterr().err
    assert read_results(out)[0].status == "failed:RuntimeError"


def test_cli_sweep_override(tmp_path):
    cfg = cli_config(tmp_path, schemes=["RandomPS"])
    out = str(tmp_path / "sweep.csv")
    rc = cli.main(["sweep", "--config", cfg, "--out", out,
                   "--axis", "Ps", "--values", "10,20"])
    assert rc == 0
    recs = read_results(out)
    assert [r.sweep_value for r in recs] == [10.0, 20.0]
    assert all(r.sweep_axis == "Ps_dBm" for r in recs)
    rc = cli.main(["sweep", "--config", cfg, "--out", out,
                   "--axis", "N", "--values", "2, 3"])
    assert rc == 0
    assert [r.sweep_value for r in read_results(out)] == [2.0, 3.0]


def test_cli_seed_override_changes_results(tmp_path):
    cfg = cli_config(tmp_path, schemes=["RandomPS"])
    outs = []
    for seed in (None, None, 99):
        out = tmp_path / f"o{len(outs)}.csv"
        args = ["run", "--config", cfg, "--out", str(out)]
        if seed is not None:
            args += ["--seed", str(seed)]
        assert cli.main(args) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]          # repeat runs byte-identical
    assert outs[0] != outs[2]          # master seed actually threads through


def test_cli_convergence_to_stdout(tmp_path, capsys):
    cfg = cli_config(tmp_path, schemes=["CJ-DPS"])
    assert cli.main(["convergence", "--config", cfg]) == 0
    got = capsys.readouterr().out.splitlines()
    assert got[0] == TRACE_HEADER
    rates = [float(ln.split(",")[3]) for ln in got[1:]]
    iters = [int(ln.split(",")[2]) for ln in got[1:]]
    assert iters == list(range(len(rates)))
    assert all(b >= a - 1e-9 for a, b in zip(rates, rates[1:]))
