import json

import pytest

from circuits.circuit import eval_word
from subgroups.monomial import word_monomial
from subgroups.tables import (BudgetExceeded, SubgroupTables, build_coset_table, enumerate_generated,
                              clear_table_cache, enumerate_subgroup, fiber_partition, is_table_cached,
                              load_tables, save_tables)
from utils.errors import Cs3Error


@pytest.mark.parametrize("group,order", [("W", 6), ("Q", 16), ("C", 24), ("CQ", 384), ("K0", 8), ("K0W", 192)])
def test_small_group_orders(group, order):
    assert enumerate_subgroup(group).order == order


@pytest.mark.parametrize("group,order", [("D", 32768), ("P", 40320)])
def test_large_group_orders(group, order):
    assert enumerate_subgroup(group).order == order


def test_shortest_words_spell_their_elements():
    table = enumerate_subgroup("CQ")
    for key, word in list(table.words.items())[:50]:
        assert word_monomial(word).key() == key


def test_first_element_is_the_identity():
    table = enumerate_subgroup("W")
    assert len(next(iter(table.words.values()))) == 0


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        enumerate_subgroup("P", budget=100)


def test_unlisted_group_is_rejected():
    with pytest.raises(ValueError):
        enumerate_subgroup("PD")


def test_generated_group_detects_non_monomial_generators():
    table = enumerate_generated(("K0", "SWAP01"))
    assert table.order == 8 * 2 * 2


def test_coset_table(tables):
    assert len(tables.coset_words) == 105
    assert len(tables.coset_words[0]) == 0
    partitions = {fiber_partition(op) for op in tables.coset_ops}
    assert len(partitions) == 105


def test_coset_table_is_deterministic(tables):
    assert build_coset_table() == tables.coset_words


def test_c_and_q_lookups(tables):
    assert len(tables.c_by_sigma) == 24
    assert len(tables.q_ops) == 16
    assert len(tables.e_candidates) == 81


def test_cache_round_trip(tables, tmp_path):
    path = save_tables(tables, tmp_path / "cache")
    first = path.read_bytes()
    loaded = load_tables(tmp_path / "cache")
    assert loaded is not None
    assert loaded.coset_words == tables.coset_words
    assert save_tables(loaded, tmp_path / "cache").read_bytes() == first


def test_stale_cache_is_ignored(tables, tmp_path):
    path = save_tables(tables, tmp_path / "cache")
    data = json.loads(path.read_text(encoding="utf-8"))
    data["version"] = -1
    path.write_text(json.dumps(data), encoding="utf-8")
    assert load_tables(tmp_path / "cache") is None


def test_missing_cache_returns_none(tmp_path):
    assert load_tables(tmp_path / "nowhere") is None


def test_payload_round_trip(tables):
    again = SubgroupTables.from_payload(tables.to_payload())
    assert again.c_by_sigma == tables.c_by_sigma
    assert eval_word(again.coset_word(7)) == eval_word(tables.coset_word(7))


def test_payload_carries_the_q_table(tables):
    payload = tables.to_payload()
    assert len(payload["q_table"]) == 16
    again = SubgroupTables.from_payload(payload)
    assert again.q_ops == tables.q_ops
    assert again.c_ops == tables.c_ops


def test_truncated_q_table_is_rejected(tables):
    payload = tables.to_payload()
    payload["q_table"] = payload["q_table"][:-1]
    with pytest.raises(Cs3Error):
        SubgroupTables.from_payload(payload)


def test_payload_without_q_table_is_rejected(tables):
    payload = tables.to_payload()
    del payload["q_table"]
    with pytest.raises(Cs3Error):
        SubgroupTables.from_payload(payload)


def test_clear_table_cache(tables, tmp_path):
    cache = tmp_path / "cache"
    assert not is_table_cached(cache)
    assert not clear_table_cache(cache)
    save_tables(tables, cache)
    assert is_table_cached(cache)
    assert clear_table_cache(cache)
    assert not is_table_cached(cache)
    assert load_tables(cache) is None
