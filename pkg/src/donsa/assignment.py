"""Joint next-hop and RF selection as a padded maximum-weight assignment.

The selection problem is a k-cardinality assignment: sources on the left,
on the right one column per (relay, M2M RF, BS, M2B RF) quadruple and
``Q^t`` replicated columns per (BS, M2B RF) pair. It is padded to a square
matrix and solved exactly with :func:`donsa.hungarian.hungarian_solve`.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import EmptyProblem, SearchSpaceTooLarge
from .hungarian import hungarian_solve
from .rf import df_two_hop_rate, rf_eligible
from .topology import RateTable, Topology, split_catalog

BRUTE_FORCE_LIMIT = 10**7


@dataclass(frozen=True)
class QuadrupleVertex:
    relay: int
    m2m_rf: str
    bs: int
    m2b_rf: str


@dataclass(frozen=True)
class PairVertex:
    bs: int
    m2b_rf: str
    channel: int


Vertex = Union[QuadrupleVertex, PairVertex]


@dataclass(frozen=True)
class Quota:
    per_rf: dict[str, int]
    total: int
    k: int


@dataclass(frozen=True)
class Unmatched:
    pass


@dataclass(frozen=True)
class Direct:
    bs: int
    m2b_rf: str


@dataclass(frozen=True)
class Relayed:
    relay: int
    m2m_rf: str
    bs: int
    m2b_rf: str


Decision = Union[Unmatched, Direct, Relayed]
UNMATCHED = Unmatched()


@dataclass
class AssignmentResult:
    """Per-source decision and rate. Relay and BS fields are role indices.

    ``selected_edges`` counts sources placed on a real column by the solver,
    including zero-rate columns (those sources are still reported unmatched).
    """

    decisions: list[Decision]
    rates: list[float]
    quota: Quota
    k: int
    selected_edges: int | None = None
    objective_total: float = field(init=False)

    def __post_init__(self):
        self.objective_total = math.fsum(self.rates)

    @property
    def n_sources(self) -> int:
        return len(self.decisions)

    @property
    def matched(self) -> int:
        return sum(not isinstance(d, Unmatched) for d in self.decisions)

    @property
    def unmatched(self) -> int:
        return self.n_sources - self.matched


@dataclass(frozen=True)
class SolverOptions:
    truncate_channels_to_sources: bool = True
    repair_conflicts: bool = False
    relays_enabled: bool = True
    direct_enabled: bool = True


def compute_quota(catalog_m2b, requested_bw: float, n_bs: int, n_sources: int,
                  truncate: bool = True) -> Quota:
    """Per-RF connection quota ``min(floor(BW_BS / BW_s), Cap_BS)``.

    Interfaces whose channel is narrower than the request get quota 0. With
    ``truncate`` each per-RF quota is clipped to ``n_sources``.
    """
    per_rf = {}
    for rf in catalog_m2b:
        q = 0
        if rf_eligible(rf, requested_bw):
            q = min(math.floor(rf.bs_total_bw / requested_bw), rf.bs_conn_cap)
        if truncate:
            q = min(q, n_sources)
        per_rf[rf.id] = max(q, 0)
    total = sum(per_rf.values())
    return Quota(per_rf, total, min(n_sources, n_bs * total))


def enumerate_vertices(topology: Topology, catalog, quota: Quota, *,
                       relays_enabled: bool = True, direct_enabled: bool = True):
    """Right-side columns: quadruples first, then replicated pairs.

    Quadruples use every eligible M2M and M2B interface; pairs use the
    per-RF quota. Both lists come out sorted by their field order.
    """
    m2m, m2b = split_catalog(catalog)
    bw = topology.requested_bw
    m2m_ok = [rf.id for rf in m2m if rf_eligible(rf, bw)]
    m2b_ok = [rf.id for rf in m2b if rf_eligible(rf, bw)]
    n_r = topology.n_relays if relays_enabled else 0
    quads = [QuadrupleVertex(r, tm, b, tb)
             for r, tm, b, tb in itertools.product(range(n_r), m2m_ok, range(topology.n_bs), m2b_ok)]
    pairs = []
    if direct_enabled:
        pairs = [PairVertex(b, rf.id, ch)
                 for b in range(topology.n_bs) for rf in m2b
                 for ch in range(quota.per_rf.get(rf.id, 0))]
    return quads, pairs


def edge_weight(source: int, vertex: Vertex, rate_table: RateTable) -> float:
    if isinstance(vertex, QuadrupleVertex):
        first = rate_table.m2m_rate(source, vertex.relay, vertex.m2m_rf)
        second = rate_table.m2b_rate(rate_table.n_sources + vertex.relay, vertex.bs, vertex.m2b_rf)
        return df_two_hop_rate(first, second)
    return rate_table.m2b_rate(source, vertex.bs, vertex.m2b_rf)


def real_weights(rate_table: RateTable, quads, pairs) -> np.ndarray:
    """``N_s x R`` block of true rates, vectorised form of :func:`edge_weight`."""
    n_s = rate_table.n_sources
    mi = {rf: t for t, rf in enumerate(rate_table.m2m_ids)}
    bi = {rf: t for t, rf in enumerate(rate_table.m2b_ids)}
    out = np.zeros((n_s, len(quads) + len(pairs)))
    if quads:
        rel = np.fromiter((q.relay for q in quads), np.intp, len(quads))
        tm = np.fromiter((mi[q.m2m_rf] for q in quads), np.intp, len(quads))
        bs = np.fromiter((q.bs for q in quads), np.intp, len(quads))
        tb = np.fromiter((bi[q.m2b_rf] for q in quads), np.intp, len(quads))
        first = rate_table.m2m[:, rel, tm]
        second = rate_table.relay_m2b[rel, bs, tb]
        out[:, : len(quads)] = np.minimum(first, second[None, :])
    if pairs:
        bs = np.fromiter((p.bs for p in pairs), np.intp, len(pairs))
        tb = np.fromiter((bi[p.m2b_rf] for p in pairs), np.intp, len(pairs))
        out[:, len(quads):] = rate_table.source_m2b[:, bs, tb]
    return out


@dataclass
class SapInstance:
    """Square padded matrix.

    Rows ``0..n_sources-1`` are sources, the rest dummy rows. Columns
    ``0..len(columns)-1`` are the real vertices (quadruples then pairs), the
    rest dummy columns.
    """

    weights: np.ndarray
    n_sources: int
    columns: list[Vertex]
    a_value: float
    k: int
    quota: Quota

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def n_real_cols(self) -> int:
        return len(self.columns)

    @property
    def n_dummy_rows(self) -> int:
        return self.n - self.n_sources

    @property
    def n_dummy_cols(self) -> int:
        return self.n - self.n_real_cols

    def row_tag(self, i: int):
        return ("source", i) if i < self.n_sources else ("dummy_row",)

    def col_tag(self, j: int):
        if j >= self.n_real_cols:
            return ("dummy_col",)
        v = self.columns[j]
        return ("quadruple", v) if isinstance(v, QuadrupleVertex) else ("pair", v)


def build_sap(topology: Topology, rate_table: RateTable, quota: Quota, vertices) -> SapInstance:
    """Pad the k-AP to a square assignment problem.

    With ``R`` real columns and ``k = min(N_s, N_b*Q_BS, R)``, adds ``R - k``
    dummy rows (weight ``a_value`` to real columns) and ``N_s - k`` dummy
    columns (weight 0), so ``n = N_s + R - k``.
    """
    quads, pairs = vertices
    n_s = rate_table.n_sources
    columns = list(quads) + list(pairs)
    r = len(columns)
    if n_s == 0 or r == 0:
        raise EmptyProblem(f"nothing to assign (sources={n_s}, columns={r})")
    k = min(quota.k, r)
    n = n_s + r - k
    real = real_weights(rate_table, quads, pairs)
    a_value = 1.0 + math.fsum(real.ravel())
    w = np.zeros((n, n))
    w[:n_s, :r] = real
    w[n_s:, :r] = a_value
    return SapInstance(w, n_s, columns, a_value, k, quota)


def extract_assignment(sap: SapInstance, perm) -> AssignmentResult:
    """Read source rows off the permutation.

    A source on a dummy column, or on a real column of zero rate, is
    unmatched.
    """
    decisions: list[Decision] = []
    rates: list[float] = []
    selected = 0
    for i in range(sap.n_sources):
        j = int(perm[i])
        selected += j < sap.n_real_cols
        w = float(sap.weights[i, j]) if j < sap.n_real_cols else 0.0
        if w <= 0.0:
            decisions.append(UNMATCHED)
            rates.append(0.0)
            continue
        v = sap.columns[j]
        if isinstance(v, QuadrupleVertex):
            decisions.append(Relayed(v.relay, v.m2m_rf, v.bs, v.m2b_rf))
        else:
            decisions.append(Direct(v.bs, v.m2b_rf))
        rates.append(w)
    return AssignmentResult(decisions, rates, sap.quota, sap.k, selected)


def all_unmatched(n_sources: int, quota: Quota, k: int = 0) -> AssignmentResult:
    return AssignmentResult([UNMATCHED] * n_sources, [0.0] * n_sources, quota, k, 0)


def solve_assignment(topology: Topology, rate_table: RateTable, catalog,
                     options: SolverOptions = SolverOptions()) -> AssignmentResult:
    """quota -> vertices -> padded matrix -> Hungarian -> decisions."""
    _, m2b = split_catalog(catalog)
    n_s = topology.n_sources
    quota = compute_quota(m2b, topology.requested_bw, topology.n_bs, n_s,
                          truncate=options.truncate_channels_to_sources)
    vertices = enumerate_vertices(topology, catalog, quota,
                                  relays_enabled=options.relays_enabled,
                                  direct_enabled=options.direct_enabled)
    try:
        sap = build_sap(topology, rate_table, quota, vertices)
    except EmptyProblem:
        return all_unmatched(n_s, quota)
    result = extract_assignment(sap, hungarian_solve(sap.weights, maximize=True))
    if options.repair_conflicts:
        result = repair_conflicts(result)
    return result


def donsa(topology: Topology, rate_table: RateTable, catalog,
          config: SolverOptions | None = None) -> AssignmentResult:
    """Optimal joint RF and next-hop selection over the full catalog."""
    opts = config or SolverOptions()
    if not (opts.relays_enabled and opts.direct_enabled):
        opts = SolverOptions(opts.truncate_channels_to_sources, opts.repair_conflicts)
    return solve_assignment(topology, rate_table, catalog, opts)


def brute_force_solve(topology: Topology, rate_table: RateTable, quota: Quota, catalog, *,
                      relays_enabled: bool = True, direct_enabled: bool = True):
    """Exhaustive optimum over all feasible source-to-route mappings.

    Independent of the matrix path: route rates are read straight from the
    rate table, each quadruple is a single-use resource and each (BS, M2B
    RF) pair may be used ``quota.per_rf`` times. At most ``quota.k`` sources
    are matched. Returns ``(objective, decisions)``.
    """
    m2m, m2b = split_catalog(catalog)
    bw = topology.requested_bw
    n_s = rate_table.n_sources
    m2m_ok = [rf.id for rf in m2m if rf.channel_bw >= bw]
    m2b_ok = [rf.id for rf in m2b if rf.channel_bw >= bw]
    options: list[list[tuple]] = []
    for s in range(n_s):
        opts = []
        if relays_enabled:
            for r in range(rate_table.n_relays):
                for tm in m2m_ok:
                    for b in range(rate_table.n_bs):
                        for tb in m2b_ok:
                            c = min(rate_table.m2m_rate(s, r, tm),
                                    rate_table.m2b_rate(n_s + r, b, tb))
                            opts.append((("q", r, tm, b, tb), 1, c, Relayed(r, tm, b, tb)))
        if direct_enabled:
            for b in range(rate_table.n_bs):
                for tb in m2b_ok:
                    cap = quota.per_rf.get(tb, 0)
                    if cap > 0:
                        opts.append((("p", b, tb), cap, rate_table.m2b_rate(s, b, tb), Direct(b, tb)))
        options.append(opts)

    space = math.prod(len(o) + 1 for o in options)
    if space > BRUTE_FORCE_LIMIT:
        raise SearchSpaceTooLarge(f"{space} candidate mappings exceed {BRUTE_FORCE_LIMIT}")

    best = [-1.0, None]
    used: Counter = Counter()
    chosen: list = [None] * n_s

    def rec(s: int, matched: int):
        if s == n_s:
            total = math.fsum(c[2] for c in chosen if c is not None)
            if total > best[0]:
                best[0] = total
                best[1] = list(chosen)
            return
        chosen[s] = None
        rec(s + 1, matched)
        if matched >= quota.k:
            return
        for opt in options[s]:
            key, cap = opt[0], opt[1]
            if used[key] < cap:
                used[key] += 1
                chosen[s] = opt
                rec(s + 1, matched + 1)
                used[key] -= 1
        chosen[s] = None

    rec(0, 0)
    decisions = [UNMATCHED if c is None else c[3] for c in best[1]]
    return best[0], decisions


@dataclass
class ConflictReport:
    relay_reuse: dict[tuple[int, str], int]
    bs_overuse: dict[tuple[int, str], tuple[int, int]]
    per_bs_matched: dict[int, int]

    @property
    def empty(self) -> bool:
        return not self.relay_reuse and not self.bs_overuse

    def lines(self) -> list[str]:
        out = [f"relay {r} {rf}: used by {c} sources" for (r, rf), c in sorted(self.relay_reuse.items())]
        out += [f"bs {b} {rf}: {c} connections exceed quota {q}"
                for (b, rf), (c, q) in sorted(self.bs_overuse.items())]
        return out


def audit_conflicts(result: AssignmentResult, catalog=None, quota: Quota | None = None) -> ConflictReport:
    """Per-resource reuse that the aggregate capacity constraint allows.

    (a) an (relay, M2M RF) carrying more than one source, (b) a (BS, M2B RF)
    whose direct plus relayed connections exceed its per-RF quota.
    """
    quota = quota or result.quota
    relay_use: Counter = Counter()
    bs_use: Counter = Counter()
    per_bs: Counter = Counter()
    for d in result.decisions:
        if isinstance(d, Relayed):
            relay_use[(d.relay, d.m2m_rf)] += 1
        if isinstance(d, (Relayed, Direct)):
            bs_use[(d.bs, d.m2b_rf)] += 1
            per_bs[d.bs] += 1
    reuse = {key: c for key, c in relay_use.items() if c > 1}
    over = {key: (c, quota.per_rf.get(key[1], 0)) for key, c in bs_use.items()
            if c > quota.per_rf.get(key[1], 0)}
    return ConflictReport(reuse, over, dict(per_bs))


def repair_conflicts(result: AssignmentResult) -> AssignmentResult:
    """Greedily unmatch the lowest-rate sources until no conflict remains."""
    decisions = list(result.decisions)
    rates = list(result.rates)
    order = sorted(range(len(decisions)), key=lambda i: (-rates[i], i))
    relay_use: Counter = Counter()
    bs_use: Counter = Counter()
    for i in order:
        d = decisions[i]
        if isinstance(d, Unmatched):
            continue
        bs_key = (d.bs, d.m2b_rf)
        ok = bs_use[bs_key] < result.quota.per_rf.get(d.m2b_rf, 0)
        if isinstance(d, Relayed):
            ok = ok and relay_use[(d.relay, d.m2m_rf)] == 0
        if ok:
            bs_use[bs_key] += 1
            if isinstance(d, Relayed):
                relay_use[(d.relay, d.m2m_rf)] += 1
        else:
            decisions[i] = UNMATCHED
            rates[i] = 0.0
    return AssignmentResult(decisions, rates, result.quota, result.k, result.selected_edges)


def dump_result(result: AssignmentResult) -> str:
    lines = ["# donsa-result v1", f"# k {result.k}", f"# objective {result.objective_total!r}"]
    lines += [f"# quota {rf} {q}" for rf, q in result.quota.per_rf.items()]
    for s, (d, c) in enumerate(zip(result.decisions, result.rates)):
        if isinstance(d, Relayed):
            lines.append(f"{s} relayed {d.relay} {d.m2m_rf} {d.bs} {d.m2b_rf} {c!r}")
        elif isinstance(d, Direct):
            lines.append(f"{s} direct {d.bs} {d.m2b_rf} {c!r}")
        else:
            lines.append(f"{s} unmatched")
    return "\n".join(lines) + "\n"


def load_result(text: str) -> AssignmentResult:
    k = 0
    per_rf: dict[str, int] = {}
    decisions: list[Decision] = []
    rates: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts:
            continue
        try:
            if parts[0] == "#":
                if parts[1] == "k":
                    k = int(parts[2])
                elif parts[1] == "quota":
                    per_rf[parts[2]] = int(parts[3])
                continue
            kind = parts[1]
            if kind == "relayed":
                decisions.append(Relayed(int(parts[2]), parts[3], int(parts[4]), parts[5]))
                rates.append(float(parts[6]))
            elif kind == "direct":
                decisions.append(Direct(int(parts[2]), parts[3]))
                rates.append(float(parts[4]))
            elif kind == "unmatched":
                decisions.append(UNMATCHED)
                rates.append(0.0)
            else:
                raise ValueError(kind)
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: malformed result record {raw!r}") from exc
    total = sum(per_rf.values())
    return AssignmentResult(decisions, rates, Quota(per_rf, total, k), k)


def dump_sap(sap: SapInstance) -> str:
    lines = [f"# n {sap.n}", f"# k {sap.k}", f"# a_value {sap.a_value!r}"]
    for i in range(sap.n):
        tag = sap.row_tag(i)
        lines.append(f"# row {i} {' '.join(map(str, tag))}")
    for j in range(sap.n):
        tag = sap.col_tag(j)
        lines.append(f"# col {j} {tag[0]} {_vertex_str(tag[1]) if len(tag) > 1 else ''}".rstrip())
    lines += [" ".join(repr(float(x)) for x in row) for row in sap.weights]
    return "\n".join(lines) + "\n"


def _vertex_str(v: Vertex) -> str:
    if isinstance(v, QuadrupleVertex):
        return f"{v.relay} {v.m2m_rf} {v.bs} {v.m2b_rf}"
    return f"{v.bs} {v.m2b_rf} {v.channel}"
