"""Random cell layouts and the per-RF link-rate table."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGeometry, InvalidArgument
from .rf import (ChannelModel, RfClass, RfInterface, capped_link_rate, link_bandwidth,
                 link_sinr, rf_eligible, sample_fading, shannon_rate)

# Machines closer than this to another node are re-drawn.
MIN_SEPARATION_M = 1e-6


class Role(str, enum.Enum):
    SOURCE = "source"
    RELAY = "relay"
    BASE_STATION = "bs"


@dataclass(frozen=True)
class Node:
    id: int
    role: Role
    position: tuple[float, float]


@dataclass
class Topology:
    """Placed nodes. Ids: sources ``0..Ns-1``, relays next, then BSs."""

    nodes: list[Node]
    cell_radius: float
    bs_positions: list[tuple[float, float]]
    requested_bw: float

    def __post_init__(self):
        if self.requested_bw <= 0:
            raise InvalidArgument("requested_bw must be positive")
        if self.cell_radius <= 0:
            raise InvalidArgument("cell_radius must be positive")
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise InvalidArgument("node ids must be unique")
        if self.n_bs != len(self.bs_positions):
            raise InvalidArgument("bs_positions disagree with BaseStation nodes")

    def _positions(self, role: Role) -> np.ndarray:
        pts = [n.position for n in self.nodes if n.role is role]
        return np.asarray(pts, dtype=float).reshape(len(pts), 2)

    @property
    def sources(self) -> np.ndarray:
        return self._positions(Role.SOURCE)

    @property
    def relays(self) -> np.ndarray:
        return self._positions(Role.RELAY)

    @property
    def machines(self) -> np.ndarray:
        return np.vstack([self.sources, self.relays])

    @property
    def base_stations(self) -> np.ndarray:
        return self._positions(Role.BASE_STATION)

    @property
    def n_sources(self) -> int:
        return sum(n.role is Role.SOURCE for n in self.nodes)

    @property
    def n_relays(self) -> int:
        return sum(n.role is Role.RELAY for n in self.nodes)

    @property
    def n_bs(self) -> int:
        return sum(n.role is Role.BASE_STATION for n in self.nodes)

    def to_text(self) -> str:
        lines = [f"# cell_radius {self.cell_radius!r}", f"# requested_bw {self.requested_bw!r}"]
        lines += [f"{n.id} {n.role.value} {n.position[0]!r} {n.position[1]!r}" for n in self.nodes]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Topology":
        header: dict[str, float] = {}
        nodes = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, value = line[1:].split()
                header[key] = float(value)
                continue
            try:
                nid, role, x, y = line.split()
                nodes.append(Node(int(nid), Role(role), (float(x), float(y))))
            except ValueError as exc:
                raise InvalidArgument(f"line {lineno}: cannot parse node record {raw!r}") from exc
        bs = [n.position for n in nodes if n.role is Role.BASE_STATION]
        return cls(nodes, header["cell_radius"], bs, header["requested_bw"])


def bs_grid(n_bs: int, cell_radius: float) -> list[tuple[float, float]]:
    """Place BSs on a square grid with non-overlapping coverage disks."""
    if n_bs == 1:
        return [(0.0, 0.0)]
    cols = math.ceil(math.sqrt(n_bs))
    step = 2.0 * cell_radius
    return [(float((i % cols) * step), float((i // cols) * step)) for i in range(n_bs)]


def generate_cell(n_sources: int, n_relays: int, n_bs: int, cell_radius: float,
                  requested_bw: float, rng: np.random.Generator) -> Topology:
    """Drop machines uniformly inside the coverage disk of a random BS.

    The first ``n_sources`` machines are sources, the rest relays.
    """
    if min(n_sources, n_relays) < 0 or n_bs < 1:
        raise InvalidArgument("counts must be non-negative and n_bs >= 1")
    if cell_radius <= 0:
        raise InvalidArgument("cell_radius must be positive")
    bs = bs_grid(n_bs, cell_radius)
    bs_arr = np.asarray(bs)
    n = n_sources + n_relays

    def draw(m):
        home = rng.integers(0, n_bs, size=m)
        rad = cell_radius * np.sqrt(rng.random(m))
        ang = rng.random(m) * 2.0 * math.pi
        return bs_arr[home] + np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])

    pos = draw(n)
    for _ in range(100):
        bad = _colocated(pos, bs_arr)
        if not bad.any():
            break
        pos[bad] = draw(int(bad.sum()))
    else:
        raise DegenerateGeometry("could not separate co-located machines")

    nodes = [Node(i, Role.SOURCE if i < n_sources else Role.RELAY,
                  (float(pos[i, 0]), float(pos[i, 1]))) for i in range(n)]
    nodes += [Node(n + b, Role.BASE_STATION, p) for b, p in enumerate(bs)]
    return Topology(nodes, float(cell_radius), bs, float(requested_bw))


def _colocated(pos: np.ndarray, bs: np.ndarray) -> np.ndarray:
    bad = np.zeros(len(pos), dtype=bool)
    if len(pos) == 0:
        return bad
    d_bs = np.linalg.norm(pos[:, None, :] - bs[None, :, :], axis=2)
    bad |= (d_bs < MIN_SEPARATION_M).any(axis=1)
    _, first = np.unique(pos, axis=0, return_index=True)
    dup = np.ones(len(pos), dtype=bool)
    dup[first] = False
    return bad | dup


@dataclass
class RateTable:
    """Capped link rates in bits/s.

    ``m2m[s, r, t]``: source ``s`` to relay ``r`` on the ``t``-th M2M RF.
    ``m2b[m, b, t]``: machine ``m`` (sources first, then relays) to BS ``b``
    on the ``t``-th M2B RF.
    """

    m2m: np.ndarray
    m2b: np.ndarray
    m2m_ids: list[str]
    m2b_ids: list[str]
    n_sources: int = field(default=0)

    def __post_init__(self):
        if self.m2m.shape[2:] != (len(self.m2m_ids),) or self.m2b.shape[2:] != (len(self.m2b_ids),):
            raise InvalidArgument("rate table shape does not match RF ids")
        if self.m2m.shape[0] != self.n_sources:
            self.n_sources = self.m2m.shape[0]

    @property
    def n_relays(self) -> int:
        return self.m2m.shape[1]

    @property
    def n_bs(self) -> int:
        return self.m2b.shape[1]

    @property
    def source_m2b(self) -> np.ndarray:
        return self.m2b[: self.n_sources]

    @property
    def relay_m2b(self) -> np.ndarray:
        return self.m2b[self.n_sources:]

    def m2m_rate(self, s: int, r: int, rf_id: str) -> float:
        return float(self.m2m[s, r, self.m2m_ids.index(rf_id)])

    def m2b_rate(self, machine: int, b: int, rf_id: str) -> float:
        return float(self.m2b[machine, b, self.m2b_ids.index(rf_id)])

    def scaled(self, factor: float) -> "RateTable":
        return RateTable(self.m2m * factor, self.m2b * factor, list(self.m2m_ids),
                         list(self.m2b_ids), self.n_sources)


def split_catalog(catalog) -> tuple[list[RfInterface], list[RfInterface]]:
    m2m = [rf for rf in catalog if rf.rf_class is RfClass.M2M]
    m2b = [rf for rf in catalog if rf.rf_class is RfClass.M2B]
    return m2m, m2b


def _pairwise(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)


def _rf_rates(dist, rf, cm, requested_bw, rng):
    # Fading is drawn for every RF, eligible or not, so the random stream
    # does not depend on the requested bandwidth.
    fading = sample_fading(rng, size=dist.shape, cm=cm)
    if not rf_eligible(rf, requested_bw) or dist.size == 0:
        return np.zeros(dist.shape)
    bw = link_bandwidth(rf, requested_bw)
    return capped_link_rate(shannon_rate(bw, link_sinr(dist, rf, cm, fading, bw)), rf)


def build_rate_table(topology: Topology, catalog, cm: ChannelModel,
                     rng: np.random.Generator) -> RateTable:
    """Rates for every (source, relay, M2M RF) and (machine, BS, M2B RF).

    Draw order: M2M RFs in catalog order, then M2B RFs in catalog order.
    """
    m2m, m2b = split_catalog(catalog)
    if not m2m or not m2b:
        raise InvalidArgument("catalog needs at least one M2M and one M2B interface")
    src, rel, bs = topology.sources, topology.relays, topology.base_stations
    bw = topology.requested_bw
    d_sr = _pairwise(src, rel)
    d_mb = _pairwise(np.vstack([src, rel]), bs)
    m2m_rates = np.zeros((len(src), len(rel), len(m2m)))
    m2b_rates = np.zeros((len(src) + len(rel), len(bs), len(m2b)))
    for t, rf in enumerate(m2m):
        m2m_rates[:, :, t] = _rf_rates(d_sr, rf, cm, bw, rng)
    for t, rf in enumerate(m2b):
        m2b_rates[:, :, t] = _rf_rates(d_mb, rf, cm, bw, rng)
    return RateTable(m2m_rates, m2b_rates, [rf.id for rf in m2m], [rf.id for rf in m2b],
                     len(src))
