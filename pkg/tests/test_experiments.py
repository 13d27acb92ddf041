import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from donsa.assignment import UNMATCHED, AssignmentResult, Direct, Quota
from donsa.config import Config, ConfigError, config_from_dict, config_to_dict, load_config
from donsa.errors import InsufficientSamples, InvalidArgument
from donsa.experiments import (DETERMINISTIC_FILES, PRESETS, ScenarioSpec, compute_adr,
                               confidence_interval, eligible_rf_count, emit_results, metric_csv,
                               preset, read_metric_csv, run_scenario, run_seed)
from donsa.rf import ChannelModel, default_catalog

CAT = default_catalog()


def tiny(**kw):
    base = dict(n_sources=12, n_relays=8, runs=3)
    base.update(kw)
    return ScenarioSpec("t", "cell_radius", (200.0, 600.0), **base)


# -- statistics ----------------------------------------------------------------

def test_ci_two_points():
    mean, pct = confidence_interval([0.0, 2.0])
    # t_{0.975, 1} = tan(0.475 pi); sem = sqrt(2) / sqrt(2) = 1
    assert mean == 1.0
    assert pct == pytest.approx(100 * math.tan(0.475 * math.pi), rel=1e-9)
    assert pct == pytest.approx(1270.62, abs=0.01)


def test_ci_constant_and_too_few():
    assert confidence_interval([5.0] * 7) == (5.0, 0.0)
    with pytest.raises(InsufficientSamples):
        confidence_interval([1.0])


@given(st.lists(st.floats(1.0, 1e7), min_size=2, max_size=30))
def test_ci_mean_is_sample_mean(xs):
    mean, pct = confidence_interval(xs)
    assert mean == pytest.approx(sum(xs) / len(xs), rel=1e-12)
    assert pct >= 0


def test_adr_counts_unmatched_as_zero():
    res = AssignmentResult([Direct(0, "lte"), UNMATCHED, Direct(0, "lte"), UNMATCHED],
                           [3e6, 0.0, 1e6, 0.0], Quota({"lte": 2}, 2, 2), 2)
    assert compute_adr(res, 4) == 1e6
    with pytest.raises(InvalidArgument):
        compute_adr(res, 0)


def test_eligible_counts():
    assert eligible_rf_count(CAT, 200e3) == (3, 3)
    assert eligible_rf_count(CAT, 1e6) == (2, 2)
    assert eligible_rf_count(CAT, 20e6) == (1, 1)
    assert eligible_rf_count(CAT, 30e6) == (0, 0)


# -- scenario definitions ------------------------------------------------------

def test_presets():
    assert PRESETS["s1"].sweep_variable == "n_sources"
    assert PRESETS["s1"].point_params(90) == {"n_sources": 90, "n_relays": 210,
                                              "cell_radius": 500.0, "requested_bw": 200e3}
    assert PRESETS["s2"].sweep_points[0] == 100.0 and PRESETS["s2"].sweep_points[-1] == 1000.0
    assert PRESETS["s3"].sweep_points[0] == 20e3 and PRESETS["s3"].sweep_points[-1] == 20e6
    assert preset("S2", runs=4).runs == 4
    with pytest.raises(InvalidArgument):
        preset("s9")


@pytest.mark.parametrize("points", [(), (1.0, 1.0), (1.0, 3.0, 2.0)])
def test_bad_sweep_points(points):
    with pytest.raises(InvalidArgument):
        ScenarioSpec("x", "cell_radius", points)


def test_seed_streams_independent_of_sweep_length():
    a = np.random.default_rng(run_seed(0, 3, 5)).random(4)
    b = np.random.default_rng(run_seed(0, 3, 5)).random(4)
    c = np.random.default_rng(run_seed(0, 3, 6)).random(4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


# -- running and output --------------------------------------------------------

def test_run_scenario_shapes_and_pairing():
    rep = run_scenario(tiny(), CAT, ChannelModel())
    assert rep.algorithms == list(tiny().algorithms)
    for a in rep.algorithms:
        assert rep.adr_runs[a].shape == (2, 3)
    assert np.all(rep.adr_runs["donsa_wbz_lmn"] >= rep.adr_runs["dorsa_wbz_l"])
    assert rep.capacity["donsa_wbz_lmn"] == [10 + 12 + 12] * 2  # quotas truncated to N_s
    assert rep.capacity["ditosa_l"] == [12, 12]
    assert rep.eligible_rfs == [(3, 3), (3, 3)]


def test_single_run_has_empty_ci_cells(tmp_path):
    rep = run_scenario(tiny(runs=1), CAT, ChannelModel())
    emit_results(rep, tmp_path)
    cols = read_metric_csv(tmp_path / "adr.csv")
    assert cols["donsa_wbz_lmn_ci_pct"] == [None, None]
    assert cols["sweep_value_cell_radius_m"] == [200.0, 600.0]


def test_csv_round_trip_and_header(tmp_path):
    rep = run_scenario(tiny(), CAT, ChannelModel())
    emit_results(rep, tmp_path)
    text = (tmp_path / "nus.csv").read_text()
    assert text.splitlines()[0].startswith("sweep_value_cell_radius_m,donsa_wbz_lmn_count")
    cols = read_metric_csv(tmp_path / "adr.csv")
    assert cols["donsa_wbz_lmn_bits_per_s"] == rep.adr("donsa_wbz_lmn")
    assert (tmp_path / "adr_nus.svg").exists() and (tmp_path / "plot_results.py").exists()


def test_manifest_is_a_config(tmp_path):
    spec = tiny()
    rep = run_scenario(spec, CAT, ChannelModel())
    emit_results(rep, tmp_path, config_to_dict(Config(scenario=spec)))
    cfg = load_config(tmp_path / "manifest.json")
    assert cfg.scenario == spec
    assert cfg.rf_catalog == CAT


def test_reruns_identical(tmp_path):
    for name in ("a", "b"):
        emit_results(run_scenario(tiny(), CAT, ChannelModel()), tmp_path / name)
    for f in DETERMINISTIC_FILES + ("adr_nus.svg",):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_jobs_do_not_change_results():
    one = run_scenario(tiny(), CAT, ChannelModel(), jobs=1)
    two = run_scenario(tiny(), CAT, ChannelModel(), jobs=2)
    assert metric_csv(one, "adr") == metric_csv(two, "adr")


# -- configuration -------------------------------------------------------------

def test_config_round_trip():
    doc = config_to_dict(config_from_dict({}))
    again = config_to_dict(config_from_dict(doc))
    assert doc == again
    assert next(r for r in doc["rf_catalog"] if r["id"] == "zwave")["class"] == "M2M"


@pytest.mark.parametrize("doc", [
    {"bogus": 1},
    {"rf_catalog": [{"id": "x", "class": "m2m"}]},
    {"rf_catalog": [{"id": "x", "class": "nope", "channel_bw": 1.0}]},
    {"channel_model": {"shadowing": 3}},
    {"scenario": {"id": "s2", "runs": 0}},
    {"repair_conflicts": "yes"},
])
def test_config_errors(doc):
    with pytest.raises(ConfigError):
        config_from_dict(doc)


def test_config_json_error_has_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"scenario": {\n  "id": "s1",\n}')
    with pytest.raises(ConfigError, match="line"):
        load_config(p)
