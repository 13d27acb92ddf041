"""Random tiny instances and the brute-force equivalence check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assignment import brute_force_solve, compute_quota, donsa
from .rf import ChannelModel, RfClass, RfInterface
from .topology import build_rate_table, generate_cell, split_catalog

_M2M_POOL = [("zwave", 200e3, 100e3), ("bluetooth", 1e6, 2e6)]
_M2B_POOL = [("nbiot", 200e3, 250e3), ("lte", 20e6, 100e6)]


@dataclass
class TinyInstance:
    topology: object
    rate_table: object
    catalog: list


def random_tiny_instance(rng: np.random.Generator, max_sources: int = 4, max_relays: int = 2,
                         max_bs: int = 2, max_quota: int = 3, zero_prob: float = 0.2) -> TinyInstance:
    """N_s <= 4, N_r <= 2, at most 2 RFs per class and Q_BS <= 3.

    A fraction of rates is zeroed so that both unmatched sources and ties
    show up. The request is 200 kHz, which every pooled RF supports.
    """
    n_m2m = int(rng.integers(1, 3))
    n_m2b = int(rng.integers(1, 3))
    bw_s = 200e3
    # Split a total quota in [0, max_quota] across the M2B RFs.
    total = int(rng.integers(0, max_quota + 1))
    cut = np.sort(rng.integers(0, total + 1, size=n_m2b - 1))
    shares = np.diff(np.concatenate([[0], cut, [total]])).astype(int)
    catalog = [RfInterface(name, RfClass.M2M, channel_bw=bw, max_rate=cap)
               for name, bw, cap in _M2M_POOL[:n_m2m]]
    for (name, bw, cap), q in zip(_M2B_POOL[2 - n_m2b:], shares):
        catalog.append(RfInterface(name, RfClass.M2B, channel_bw=bw, max_rate=cap,
                                   bs_total_bw=max(bw, 20e6), bs_conn_cap=int(q)))
    n_s = int(rng.integers(1, max_sources + 1))
    n_r = int(rng.integers(0, max_relays + 1))
    n_b = int(rng.integers(1, max_bs + 1))
    topo = generate_cell(n_s, n_r, n_b, 300.0, bw_s, rng)
    table = build_rate_table(topo, catalog, ChannelModel(), rng)
    for arr in (table.m2m, table.m2b):
        arr[rng.random(arr.shape) < zero_prob] = 0.0
    return TinyInstance(topo, table, catalog)


def check_instance(inst: TinyInstance) -> tuple[float, float]:
    """Return (pipeline objective, brute-force objective)."""
    _, m2b = split_catalog(inst.catalog)
    topo = inst.topology
    quota = compute_quota(m2b, topo.requested_bw, topo.n_bs, topo.n_sources)
    result = donsa(topo, inst.rate_table, inst.catalog)
    best, _ = brute_force_solve(topo, inst.rate_table, quota, inst.catalog)
    return result.objective_total, best


def run_selftest(n_instances: int = 200, seed: int = 0) -> list[tuple[int, float, float]]:
    """Compare the pipeline with the oracle; returns the failing instances."""
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(n_instances):
        got, want = check_instance(random_tiny_instance(rng))
        if got != want:
            failures.append((i, got, want))
    return failures
