from collections import Counter

import pytest

from circuits.circuit import CircuitWord, cs_count
from circuits.relations import (LEVEL_MODEL, Relation, UnknownRelationSet, amalgam_relations,
                                builtin_relation_sets, core_relations, definition_relations,
                                eval_level_word, extended_monoidal_relations,
                                intro_relations, invert_level_word, invert_relation, level_relations,
                                load_relation_file, monoidal_relations, parse_relation, qubit_reversal,
                                summarize_by_family, updown_relations, verify_relation, verify_relations,
                                worked_relations)
from exact.linalg import ExactMatrix


def _all_hold(relations):
    failed = [str(r.relation) for r in verify_relations(relations) if not r.holds]
    assert failed == []


def test_core_family_counts():
    counts = Counter(r.family for r in core_relations())
    assert len(core_relations()) == 30
    assert counts["C1"] == 1
    assert counts["C2"] + counts["C3"] + counts["C4"] == 9
    assert sum(counts[f"C{n}"] for n in range(5, 12)) == 14
    assert sum(counts[f"C{n}"] for n in range(12, 18)) == 6


def test_monoidal_family_size():
    # 8 commutations with i, 16 disjoint-support pairs
    assert len(monoidal_relations()) == 24


def test_core_relations_hold():
    _all_hold(core_relations())


def test_monoidal_and_extended_relations_hold():
    _all_hold(monoidal_relations() + extended_monoidal_relations())


def test_definitions_hold():
    _all_hold(definition_relations())


def test_upside_down_relations_hold():
    _all_hold(updown_relations())


def test_intro_and_worked_relations_hold():
    _all_hold(intro_relations() + worked_relations())


def test_amalgam_relations_hold():
    _all_hold(amalgam_relations())


def test_intro_relation_lowers_cs_count():
    for r in intro_relations():
        assert cs_count(r.rhs) < cs_count(r.lhs)


def test_failing_relation_reports_witness():
    result = verify_relation(parse_relation("S0 = S1"))
    assert not result.holds
    row, col, lhs, rhs = result.witness
    # S0 and S1 first differ at basis index 2 = |010>
    assert (row, col) == (2, 2)
    assert result.to_dict()["witness"]["row"] == 2


def test_qubit_reversal_round_trip():
    r = core_relations()[-1]
    flipped = qubit_reversal(r)
    assert flipped.family == "UPSIDE-C17"
    assert qubit_reversal(flipped) == r


def test_level_relation_count_for_n2():
    assert len(level_relations(2)) == 11


@pytest.mark.parametrize("n", [2, 3, 4])
def test_level_relations_hold(n):
    _all_hold(level_relations(n))


def test_level_relations_range():
    with pytest.raises(UnknownRelationSet):
        level_relations(1)


def test_level_inverse_words():
    w = CircuitWord(["K[0,2]", "i[1]", "X[1,2]"])
    assert eval_level_word(w, 3) @ eval_level_word(invert_level_word(w), 3) == ExactMatrix.identity(3)


def test_inverted_relation_still_holds():
    for r in core_relations()[:5] + level_relations(3)[:5]:
        assert verify_relation(invert_relation(r)).holds


def test_level_relations_carry_their_dimension():
    r = level_relations(5)[0]
    assert r.model == LEVEL_MODEL and r.dim == 5


def test_summary_by_family():
    results = verify_relations(core_relations())
    summary = summarize_by_family(results)
    assert summary["C2"] == {"passed": 3, "total": 3}


def test_builtin_sets():
    assert len(builtin_relation_sets("c17")) == 30
    assert builtin_relation_sets("u8", 3) == builtin_relation_sets("level", 3)
    with pytest.raises(UnknownRelationSet):
        builtin_relation_sets("nope")


def test_parse_relation_requires_one_equals_sign():
    with pytest.raises(UnknownRelationSet):
        parse_relation("S0 S0")


def test_relation_file(tmp_path):
    path = tmp_path / "rels.txt"
    path.write_text("# squares\nS0^4 = ε\nK0 K0 = i i i  # C2\n\nS0 = S1\n", encoding="utf-8")
    relations = load_relation_file(path)
    assert [r.instance for r in relations] == ["rels.txt:1", "rels.txt:2", "rels.txt:3"]
    assert [verify_relation(r).holds for r in relations] == [True, True, False]
    assert isinstance(relations[0], Relation)
