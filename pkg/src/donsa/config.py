"""JSON configuration document: RF catalog, channel model, scenario, flags.

A sweep manifest is itself a valid configuration; its ``manifest`` section
is ignored on load.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .assignment import SolverOptions
from .errors import ConfigError, DonsaError
from .experiments import PRESETS, ScenarioSpec, preset
from .rf import ChannelModel, RfInterface, default_catalog

TOP_LEVEL_KEYS = {"rf_catalog", "channel_model", "scenario", "output_dir",
                  "repair_conflicts", "truncate_channels_to_sources", "manifest"}
RF_KEYS = {"id", "class", "channel_bw", "max_rate", "num_channels", "bs_total_bw",
           "bs_conn_cap", "carrier_freq", "tx_power"}


@dataclass
class Config:
    rf_catalog: list[RfInterface] = field(default_factory=default_catalog)
    channel_model: ChannelModel = field(default_factory=ChannelModel)
    scenario: ScenarioSpec = field(default_factory=lambda: PRESETS["s1"])
    output_dir: str = "results"
    repair_conflicts: bool = False
    truncate_channels_to_sources: bool = True

    @property
    def solver_options(self) -> SolverOptions:
        return SolverOptions(self.truncate_channels_to_sources, self.repair_conflicts)


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")


def _rf_from_dict(d, where) -> RfInterface:
    _check_keys(d, RF_KEYS, where)
    if "id" not in d or "class" not in d or "channel_bw" not in d:
        raise ConfigError(f"{where}: 'id', 'class' and 'channel_bw' are required")
    kw = {k: v for k, v in d.items() if k != "class"}
    if kw.get("max_rate", 0) is None:
        kw["max_rate"] = math.inf
    try:
        return RfInterface(rf_class=d["class"], **kw)
    except (DonsaError, ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _rf_to_dict(rf: RfInterface) -> dict:
    d = asdict(rf)
    d["class"] = d.pop("rf_class").value
    if math.isinf(d["max_rate"]):
        d["max_rate"] = None
    return d


def _scenario_from_dict(d) -> ScenarioSpec:
    names = {f.name for f in fields(ScenarioSpec)}
    _check_keys(d, names, "scenario")
    sid = str(d.get("id", "custom")).lower()
    kw = dict(d)
    for key in ("sweep_points", "algorithms"):
        if key in kw:
            kw[key] = tuple(kw[key])
    try:
        if sid in PRESETS:
            kw.pop("id", None)
            return preset(sid, **kw)
        return ScenarioSpec(**kw)
    except (DonsaError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"scenario: {exc}") from exc


def config_from_dict(doc: dict) -> Config:
    _check_keys(doc, TOP_LEVEL_KEYS, "config")
    cfg = Config()
    if "rf_catalog" in doc:
        if not isinstance(doc["rf_catalog"], list):
            raise ConfigError("rf_catalog: expected a list")
        cfg.rf_catalog = [_rf_from_dict(x, f"rf_catalog[{i}]") for i, x in enumerate(doc["rf_catalog"])]
        ids = [rf.id for rf in cfg.rf_catalog]
        if len(set(ids)) != len(ids):
            raise ConfigError("rf_catalog: duplicate RF ids")
    if "channel_model" in doc:
        _check_keys(doc["channel_model"], {f.name for f in fields(ChannelModel)}, "channel_model")
        try:
            cfg.channel_model = ChannelModel(**doc["channel_model"])
        except (DonsaError, ValueError, TypeError) as exc:
            raise ConfigError(f"channel_model: {exc}") from exc
    if "scenario" in doc:
        cfg.scenario = _scenario_from_dict(doc["scenario"])
    for key in ("output_dir", "repair_conflicts", "truncate_channels_to_sources"):
        if key in doc:
            setattr(cfg, key, doc[key])
    for key in ("repair_conflicts", "truncate_channels_to_sources"):
        if not isinstance(getattr(cfg, key), bool):
            raise ConfigError(f"{key}: expected true or false")
    return cfg


def config_to_dict(cfg: Config) -> dict:
    sc = asdict(cfg.scenario)
    sc["sweep_points"] = list(sc["sweep_points"])
    sc["algorithms"] = list(sc["algorithms"])
    return {
        "rf_catalog": [_rf_to_dict(rf) for rf in cfg.rf_catalog],
        "channel_model": asdict(cfg.channel_model),
        "scenario": sc,
        "output_dir": cfg.output_dir,
        "repair_conflicts": cfg.repair_conflicts,
        "truncate_channels_to_sources": cfg.truncate_channels_to_sources,
    }


def load_config(path) -> Config:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return config_from_dict(doc)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def with_scenario(cfg: Config, **overrides) -> Config:
    try:
        return replace(cfg, scenario=replace(cfg.scenario, **overrides))
    except (DonsaError, ValueError, TypeError) as exc:
        raise ConfigError(f"scenario: {exc}") from exc
