import numpy as np
import pytest

from donsa.rf import RfClass, RfInterface
from donsa.topology import RateTable, generate_cell

BW = 200e3

ACCEPTANCE_LINES = []


def m2m_rf(name, cap=1e9):
    return RfInterface(name, RfClass.M2M, channel_bw=BW, max_rate=cap)


def m2b_rf(name, quota, cap=1e9):
    # floor(bs_total_bw / BW) is large, so the quota is set by the connection cap
    return RfInterface(name, RfClass.M2B, channel_bw=BW, max_rate=cap,
                       bs_total_bw=100 * BW, bs_conn_cap=quota)


def make_instance(n_s, n_r, n_b, m2m_ids, m2b_quota, m2m=None, m2b=None, seed=0):
    """Topology plus a hand-set rate table (random uniform rates by default)."""
    rng = np.random.default_rng(seed)
    topo = generate_cell(n_s, n_r, n_b, 500.0, BW, rng)
    catalog = [m2m_rf(t) for t in m2m_ids] + [m2b_rf(t, q) for t, q in m2b_quota.items()]
    if m2m is None:
        m2m = rng.uniform(1e5, 1e6, size=(n_s, n_r, len(m2m_ids)))
    if m2b is None:
        m2b = rng.uniform(1e5, 1e6, size=(n_s + n_r, n_b, len(m2b_quota)))
    table = RateTable(np.asarray(m2m, float), np.asarray(m2b, float),
                      list(m2m_ids), list(m2b_quota), n_s)
    return topo, table, catalog


@pytest.fixture
def instance_factory():
    return make_instance


def record_acceptance(number, passed, detail):
    line = f"[acceptance {number}] {'PASS' if passed else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
