import pytest

from circuits.circuit import BASE_ALPHABET, CircuitWord, eval_word, parse_word, random_word
from circuits.relations import SYLLABLE_RULES, worked_relations
from rewriting.normalizer import (CosetRep, ESyllable, K0Marker, RawSegment, SyllableWord, Tail,
                                  almost_normalize, alternation_decompose, apply_syllable_rule,
                                  equiv_check, fold, match_syllable_rule, measure, refold,
                                  render_syllables, syllable_rules)
from subgroups.normal_forms import CNormal, DNormal, EBlock, QNormal
from utils.config import RunConfig


def test_decompose_moves_k1_onto_qubit0():
    sw = alternation_decompose("S0 K1")
    assert sw.syllables == [RawSegment(parse_word("S0 SWAP01")), K0Marker(), RawSegment(parse_word("SWAP01"))]


def test_decompose_inserts_empty_segment_between_adjacent_k0():
    sw = alternation_decompose("K0 K0")
    assert sw.syllables == [K0Marker(), RawSegment(CircuitWord()), K0Marker()]


def test_decompose_expands_non_monomial_macros():
    sw = alternation_decompose("CK10")
    markers = [s for s in sw.syllables if isinstance(s, K0Marker)]
    assert len(markers) == 2


def test_fold_of_empty_word(tables):
    sw = fold(alternation_decompose(""), tables)
    assert sw.syllables == [] and sw.is_processed


def test_monomial_word_folds_to_rep_and_tail(tables):
    w = parse_word("CX01 S0 CCZ SWAP12 X2")
    sw = fold(alternation_decompose(w), tables)
    assert len(sw) == 2
    assert isinstance(sw.syllables[0], CosetRep) and isinstance(sw.syllables[1], Tail)
    assert eval_word(sw.flatten(tables)) == eval_word(w)


def test_fold_emits_one_block_per_k0(tables):
    w = parse_word("K0 CS01 K0 S1 K1 CCZ")
    sw = fold(alternation_decompose(w), tables)
    assert sw.is_processed
    assert len(sw.e_blocks) == 3
    assert eval_word(sw.flatten(tables)) == eval_word(w)


def test_single_k0_is_its_own_block(tables):
    sw = fold(alternation_decompose("K0"), tables)
    assert sw.e_blocks == [EBlock(e4=1)]
    assert measure(sw, tables)[0] == 1


def test_almost_normalize_preserves_operator(tables, rng):
    for _ in range(6):
        word = random_word(rng, int(rng.integers(0, 25)), BASE_ALPHABET)
        sw, stats = almost_normalize(word, tables=tables)
        assert sw.is_processed
        assert eval_word(sw.flatten(tables)) == eval_word(word)
        assert stats.input_length == len(word)
        assert stats.k0_syllables == len(sw.e_blocks)


def test_debug_verify_run(tables):
    config = RunConfig(debug_verify=True)
    sw, stats = almost_normalize("K0 CS01 K0 CS01 K1 CS01 K1", config, tables)
    assert stats.exhausted
    assert eval_word(sw.flatten(tables)) == eval_word("K0 CS01 K0 CS01 K1 CS01 K1")


def test_pass_cap_is_reported(tables):
    sw, stats = almost_normalize("K0 CS01 K0", RunConfig(pass_cap=1), tables)
    assert not stats.exhausted
    assert stats.passes == 1
    assert eval_word(sw.flatten(tables)) == eval_word("K0 CS01 K0")


def test_normalizer_never_increases_the_measure(tables, rng):
    for _ in range(4):
        word = random_word(rng, 20, BASE_ALPHABET)
        folded = fold(alternation_decompose(word), tables)
        sw, _ = almost_normalize(word, tables=tables)
        assert measure(sw, tables) <= measure(folded, tables)


def test_every_syllable_relation_becomes_a_rule(tables):
    rules = syllable_rules(tables)
    assert [r.number for r in rules] == list(range(1, len(SYLLABLE_RULES) + 1))
    assert all(r.blocks >= 1 for r in rules)


def test_syllable_rules_rewrite_source_into_target(tables):
    for rule in syllable_rules(tables):
        sw = refold(rule.source, tables)
        assert match_syllable_rule(rule, sw, 1)
        rewritten = apply_syllable_rule(rule, sw, 1, tables)
        assert rewritten == refold(rule.target, tables)
        assert measure(rewritten, tables) < measure(sw, tables)
        assert eval_word(rewritten.flatten(tables)) == eval_word(rule.source)


@pytest.mark.parametrize("number", range(1, len(SYLLABLE_RULES) + 1))
def test_normalizer_applies_syllable_rules(tables, number):
    rule = next(r for r in syllable_rules(tables) if r.number == number)
    sw, stats = almost_normalize(rule.source, RunConfig(debug_verify=True), tables)
    assert stats.rewrites
    assert measure(sw, tables) < measure(refold(rule.source, tables), tables)
    assert eval_word(sw.flatten(tables)) == eval_word(rule.source)


def test_worked_example_sides_reach_the_same_form(tables):
    relation = worked_relations()[0]
    lhs, _ = almost_normalize(relation.lhs, tables=tables)
    rhs, _ = almost_normalize(relation.rhs, tables=tables)
    assert lhs == rhs
    assert equiv_check(relation.lhs, relation.rhs, tables=tables).forms_match


@pytest.mark.parametrize("word", ["K0 K0", "K1 K1", "i^4 i^3"])
def test_gate_powers_collapse_before_folding(tables, word):
    sw, stats = almost_normalize(word, tables=tables)
    assert stats.simplify_steps >= 1
    assert sw.e_blocks == []
    assert equiv_check(word, "i i i", tables=tables).forms_match


def test_sampled_checks_can_be_switched_off(tables):
    sw, _ = almost_normalize("K0 CS01 K0 X1", RunConfig(check_every=0), tables)
    assert eval_word(sw.flatten(tables)) == eval_word("K0 CS01 K0 X1")


def test_equiv_check_equal():
    result = equiv_check("S0", "S0 S0 S0 S0 S0")
    assert result.equal and result.witness is None
    assert result.forms_match


def test_equiv_check_not_equal():
    result = equiv_check("S0", "S1", compare_forms=False)
    assert not result.equal
    assert result.witness[:2] == (2, 2)
    assert result.forms_match is None
    assert result.to_dict()["witness"][0] == 2


@pytest.mark.parametrize("lhs,rhs", [("K0 K0", "i i i"), ("X1 K0 CS01 K0 CCZ", "K0 CS01^3 S0 K0 CCZ CS02^2 X1")])
def test_equiv_check_on_known_identities(lhs, rhs):
    assert equiv_check(lhs, rhs, compare_forms=False).equal


def test_render_and_structure(tables):
    sw, _ = almost_normalize("K0 S1", tables=tables)
    rendered = render_syllables(sw, tables)
    assert rendered.count(" | ") == len(sw) - 1
    kinds = [entry["kind"] for entry in sw.structure(tables)]
    assert kinds == ["V", "E", "V", "tail"]


def test_syllable_word_flatten_slices(tables):
    sw = SyllableWord([CosetRep(0), ESyllable(EBlock(e4=1)), CosetRep(0), Tail(CNormal(), QNormal(), DNormal())])
    assert sw.flatten(tables, 1, 2).tokens == ("K0",)
    assert sw.is_processed
