"""Comparison algorithms defined as restrictions of the full selector.

Each baseline narrows the RF sets and/or disables relaying or direct links,
then runs the same padded-assignment pipeline. Restricting the feasible set
this way means the full selector dominates every baseline on any instance.
"""

from __future__ import annotations

from dataclasses import dataclass

from .assignment import AssignmentResult, SolverOptions, solve_assignment
from .errors import UnknownRf
from .rf import RfClass


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    allowed_m2m_rfs: tuple[str, ...] | None = None  # None: whole catalog
    allowed_m2b_rfs: tuple[str, ...] | None = None
    relays_enabled: bool = True
    direct_enabled: bool = True

    def __post_init__(self):
        if self.name.startswith("ditosa") and self.relays_enabled:
            raise ValueError("direct-transmission baseline cannot use relays")
        if self.name.startswith("sorsa") and (
            self.allowed_m2m_rfs is None or len(self.allowed_m2m_rfs) != 1
            or self.allowed_m2b_rfs is None or len(self.allowed_m2b_rfs) != 1
        ):
            raise ValueError("static-RF baseline needs exactly one RF per class")


DONSA_WBZ_LMN = AlgorithmSpec("donsa_wbz_lmn")
DORSA_WBZ_L = AlgorithmSpec("dorsa_wbz_l", ("wifi", "bluetooth", "zwave"), ("lte",))
SORSA_W_L = AlgorithmSpec("sorsa_w_l", ("wifi",), ("lte",), direct_enabled=False)
DITOSA_L = AlgorithmSpec("ditosa_l", (), ("lte",), relays_enabled=False)

ALGORITHMS = {a.name: a for a in (DONSA_WBZ_LMN, DORSA_WBZ_L, SORSA_W_L, DITOSA_L)}


def get_algorithm(name: str) -> AlgorithmSpec:
    try:
        return ALGORITHMS[name]
    except KeyError:
        raise KeyError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None


def restrict_catalog(spec: AlgorithmSpec, catalog) -> list:
    ids = {rf.id for rf in catalog}
    for allowed in (spec.allowed_m2m_rfs, spec.allowed_m2b_rfs):
        missing = set(allowed or ()) - ids
        if missing:
            raise UnknownRf(f"{spec.name}: RF {sorted(missing)} not in catalog")
    out = []
    for rf in catalog:
        allowed = spec.allowed_m2m_rfs if rf.rf_class is RfClass.M2M else spec.allowed_m2b_rfs
        if allowed is None or rf.id in allowed:
            out.append(rf)
    return out


def run_algorithm(spec: AlgorithmSpec, topology, rate_table, catalog,
                  config: SolverOptions | None = None) -> AssignmentResult:
    """Run the pipeline over the algorithm's RF subset; quota uses allowed M2B RFs only."""
    base = config or SolverOptions()
    opts = SolverOptions(base.truncate_channels_to_sources, base.repair_conflicts,
                         relays_enabled=spec.relays_enabled, direct_enabled=spec.direct_enabled)
    restricted = restrict_catalog(spec, catalog)
    return solve_assignment(topology, rate_table, restricted, opts)
