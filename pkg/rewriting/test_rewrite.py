import numpy as np
import pytest

from circuits.circuit import CircuitWord, eval_word, parse_word, random_word
from circuits.relations import core_relations
from rewriting.rewrite import (RewriteRule, RuleSet, UnsoundRewrite, apply_once, commute_rules,
                               confluence_sample, get_rule_set, measure_of, power_rules,
                               rewrite_fixpoint, rules_from_relations, trace_decreases)


def test_abstract_symbols_sort_to_a_fixpoint():
    rs = RuleSet([RewriteRule.of("b a", "a b", "swap")])
    outcome = rewrite_fixpoint("b b a a", rs)
    assert outcome.word.tokens == ("a", "a", "b", "b")
    assert outcome.exhausted
    assert outcome.steps == 4
    assert [t.position for t in outcome.trace] == [1, 0, 2, 1]


def test_step_cap_is_reported():
    rs = RuleSet([RewriteRule.of("a", "a a", "grow")], step_cap=5)
    outcome = rewrite_fixpoint("a", rs)
    assert not outcome.exhausted
    assert outcome.steps == 5
    assert len(outcome.word) == 6


def test_match_strategies():
    rules = [RewriteRule.of("a b", "x", "r1"), RewriteRule.of("b c", "y", "r2")]
    left = apply_once("a b c", RuleSet(rules, strategy="leftmost"))
    right = apply_once("a b c", RuleSet(rules, strategy="rightmost"))
    assert left[0].tokens == ("x", "c") and left[2] == 0
    assert right[0].tokens == ("a", "y") and right[2] == 1
    assert apply_once("z", RuleSet(rules)) is None


def test_unknown_strategy():
    with pytest.raises(ValueError):
        RuleSet([], strategy="random")


def test_power_rules_collapse_orders():
    outcome = rewrite_fixpoint(parse_word("K0 K0 S1 S1 S1 S1 CS12^4"), power_rules())
    assert outcome.word.tokens == ("i", "i", "i")


def test_prebuilt_rules_are_sound():
    for rs in (power_rules(), commute_rules()):
        assert all(rule.is_sound() for rule in rs.rules)


def test_commute_rules_sort_tokens():
    outcome = rewrite_fixpoint(parse_word("S1 CS12 S0 i"), commute_rules())
    assert outcome.word.tokens == ("i", "S0", "S1", "CS12")


def test_rewriting_preserves_the_operator(rng):
    rs = get_rule_set("simplify")
    for _ in range(10):
        word = random_word(rng, 25)
        outcome = rewrite_fixpoint(word, rs, debug_verify=True)
        assert eval_word(outcome.word) == eval_word(word)


def test_measures_decrease_along_traces(rng):
    for rs in (power_rules(), commute_rules()):
        for _ in range(5):
            assert trace_decreases(random_word(rng, 20), rs)


def test_debug_verify_catches_unsound_rules():
    rs = RuleSet([RewriteRule.of("S0", "S1", "bogus")])
    with pytest.raises(UnsoundRewrite):
        rewrite_fixpoint("S0", rs, debug_verify=True)


def test_measure_of():
    w = parse_word("K0 S0 K1")
    assert measure_of(w, "length") == (3,)
    assert measure_of(w, "k-then-length") == (2, 3)
    assert measure_of(parse_word("S0 i"), "inversions") == (1,)
    assert measure_of(w, None) == ()


def test_rules_from_relations_orientation():
    relations = core_relations()[:2]
    forward = rules_from_relations(relations)
    backward = rules_from_relations(relations, reverse=True)
    assert forward.rules[0].pattern == ("i", "i", "i", "i")
    assert backward.rules[0].replacement == ("i", "i", "i", "i")
    assert forward.rules[1].source == "C2[q=0]"


def test_get_rule_set():
    assert get_rule_set("syllable").name == "syllable"
    with pytest.raises(ValueError):
        get_rule_set("nope")


def test_confluence_sampling_reports_a_rate():
    rng = np.random.default_rng(11)
    words = [random_word(rng, 12) for _ in range(8)]
    report = confluence_sample(get_rule_set("simplify"), words)
    assert report.samples == 8
    assert 0.0 <= report.disagreement_rate <= 1.0
    assert report.to_dict()["samples"] == 8


def test_empty_word_is_a_fixpoint():
    outcome = rewrite_fixpoint(CircuitWord(), power_rules())
    assert outcome.word == CircuitWord() and outcome.steps == 0


def test_power_rules_take_k8_to_the_empty_word():
    outcome = rewrite_fixpoint(parse_word("K2^8"), power_rules())
    assert outcome.word == CircuitWord()
    assert outcome.exhausted


def test_release_mode_checks_the_final_word():
    rs = RuleSet([RewriteRule.of("S0", "S1", "bogus")])
    with pytest.raises(UnsoundRewrite):
        rewrite_fixpoint("S0", rs)
    assert rewrite_fixpoint("S0", rs, check_every=0).word.tokens == ("S1",)


def test_sampled_checks_fire_on_the_interval():
    rs = RuleSet([RewriteRule.of("S0", "S1", "bogus")])
    with pytest.raises(UnsoundRewrite):
        rewrite_fixpoint("S0 S0 S0", rs, check_every=2)


def test_get_rule_set_step_cap():
    assert get_rule_set("power", step_cap=7).step_cap == 7
    assert get_rule_set("simplify").name == "simplify"
