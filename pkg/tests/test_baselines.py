import numpy as np
import pytest

from donsa.assignment import UNMATCHED, Direct, donsa
from donsa.baselines import (ALGORITHMS, DITOSA_L, DONSA_WBZ_LMN, DORSA_WBZ_L, SORSA_W_L,
                             AlgorithmSpec, get_algorithm, restrict_catalog, run_algorithm)
from donsa.errors import UnknownRf
from donsa.rf import ChannelModel, default_catalog
from donsa.topology import build_rate_table, generate_cell

CAT = default_catalog()


def cell(seed, n_s=30, n_r=20, radius=500.0, bw=200e3):
    rng = np.random.default_rng(seed)
    topo = generate_cell(n_s, n_r, 1, radius, bw, rng)
    return topo, build_rate_table(topo, CAT, ChannelModel(), rng)


def test_registry():
    assert set(ALGORITHMS) == {"donsa_wbz_lmn", "dorsa_wbz_l", "sorsa_w_l", "ditosa_l"}
    assert get_algorithm("ditosa_l") is DITOSA_L
    with pytest.raises(KeyError):
        get_algorithm("nope")


def test_spec_invariants():
    with pytest.raises(ValueError):
        AlgorithmSpec("ditosa_x", (), ("lte",), relays_enabled=True)
    with pytest.raises(ValueError):
        AlgorithmSpec("sorsa_x", ("wifi", "bluetooth"), ("lte",))


def test_restrict_catalog():
    ids = [rf.id for rf in restrict_catalog(DORSA_WBZ_L, CAT)]
    assert ids == ["zwave", "bluetooth", "wifi", "lte"]
    assert [rf.id for rf in restrict_catalog(SORSA_W_L, CAT)] == ["wifi", "lte"]
    assert [rf.id for rf in restrict_catalog(DITOSA_L, CAT)] == ["lte"]
    with pytest.raises(UnknownRf):
        restrict_catalog(DORSA_WBZ_L, [rf for rf in CAT if rf.id != "lte"])


def test_ditosa_no_direct_rate_all_unmatched():
    topo, table = cell(0, n_s=5, n_r=5)
    table.m2b[:5] = 0.0
    res = run_algorithm(DITOSA_L, topo, table, CAT)
    assert res.decisions == [UNMATCHED] * 5


def test_ditosa_only_direct_lte():
    topo, table = cell(1)
    res = run_algorithm(DITOSA_L, topo, table, CAT)
    assert res.matched > 0
    for d in res.decisions:
        assert d == UNMATCHED or d == Direct(0, "lte")


def test_sorsa_only_relays_on_wifi_lte():
    topo, table = cell(2)
    res = run_algorithm(SORSA_W_L, topo, table, CAT)
    for d in res.decisions:
        assert d == UNMATCHED or (d.m2m_rf == "wifi" and d.m2b_rf == "lte")


def test_donsa_spec_reproduces_donsa():
    topo, table = cell(3)
    a = run_algorithm(DONSA_WBZ_LMN, topo, table, CAT)
    b = donsa(topo, table, CAT)
    assert a.decisions == b.decisions and a.objective_total == b.objective_total


@pytest.mark.parametrize("seed", range(8))
def test_dominance_nesting(seed):
    topo, table = cell(seed, n_s=40, n_r=30, radius=800.0)
    obj = {name: run_algorithm(spec, topo, table, CAT).objective_total
           for name, spec in ALGORITHMS.items()}
    assert obj["donsa_wbz_lmn"] >= obj["dorsa_wbz_l"] >= obj["sorsa_w_l"]
    assert obj["donsa_wbz_lmn"] >= obj["ditosa_l"]
    assert obj["dorsa_wbz_l"] >= obj["ditosa_l"]


def test_single_m2b_baselines_capped_by_lte_quota():
    topo, table = cell(4, n_s=150, n_r=150)
    for spec in (DORSA_WBZ_L, SORSA_W_L, DITOSA_L):
        res = run_algorithm(spec, topo, table, CAT)
        assert res.k == 100 and res.unmatched >= 50
