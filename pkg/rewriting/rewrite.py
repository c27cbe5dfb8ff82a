"""
A small word-rewriting engine over gate tokens.

Rules are plain (pattern -> replacement) token sequences. The engine does
not look tokens up in the gate alphabet, so it also runs on abstract
symbols; semantic checks are only done when requested.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from circuits.circuit import (ALPHABET, BASE_ALPHABET, CircuitWord, as_word, display_word,
                              eval_word)
from circuits.relations import SYLLABLE_RULES, Relation
from utils.config import DEFAULT_CHECK_EVERY, DEFAULT_STEP_CAP
from utils.errors import Cs3Error
from utils.logger import get_logger

logger = get_logger(__name__)

STRATEGIES = ("priority", "leftmost", "rightmost")


class UnsoundRewrite(Cs3Error):
    """A rewrite step changed the evaluated operator"""


@dataclass(frozen=True)
class RewriteRule:
    pattern: Tuple[str, ...]
    replacement: Tuple[str, ...]
    source: str
    note: str = ""

    @classmethod
    def of(cls, pattern: str, replacement: str, source: str, note: str = "") -> "RewriteRule":
        return cls(tuple(pattern.split()), tuple(replacement.split()), source, note)

    def is_sound(self) -> bool:
        return eval_word(CircuitWord(self.pattern)) == eval_word(CircuitWord(self.replacement))

    def __str__(self) -> str:
        return f"{' '.join(self.pattern) or 'ε'} -> {' '.join(self.replacement) or 'ε'}"


@dataclass
class RuleSet:
    """
    Ordered rules plus a match strategy.

    ``measure`` names the quantity the rules strictly decrease, or None for
    heuristic sets.
    """

    rules: List[RewriteRule]
    strategy: str = "priority"
    step_cap: int = DEFAULT_STEP_CAP
    measure: Optional[str] = None
    name: str = "custom"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")

    def with_strategy(self, strategy: str) -> "RuleSet":
        return RuleSet(self.rules, strategy, self.step_cap, self.measure, self.name)


@dataclass
class TraceRecord:
    rule: str
    position: int
    length_after: int

    def to_dict(self) -> Dict:
        return {"rule": self.rule, "position": self.position, "length_after": self.length_after}


@dataclass
class RewriteOutcome:
    word: CircuitWord
    trace: List[TraceRecord] = field(default_factory=list)
    exhausted: bool = True

    @property
    def steps(self) -> int:
        return len(self.trace)

    def to_dict(self) -> Dict:
        return {
            "word": display_word(self.word),
            "exhausted": self.exhausted,
            "steps": self.steps,
            "trace": [t.to_dict() for t in self.trace],
        }


def _as_tokens(word: Union[str, CircuitWord]) -> CircuitWord:
    """Split text without alphabet validation so abstract symbols work too."""
    return word if isinstance(word, CircuitWord) else CircuitWord(word.split())


def _find(tokens: Tuple[str, ...], pattern: Tuple[str, ...], reverse: bool = False) -> int:
    n, m = len(tokens), len(pattern)
    if m == 0 or m > n:
        return -1
    positions = range(n - m, -1, -1) if reverse else range(n - m + 1)
    first = pattern[0]
    for pos in positions:
        if tokens[pos] == first and tokens[pos:pos + m] == pattern:
            return pos
    return -1


def _select(tokens: Tuple[str, ...], rs: RuleSet) -> Optional[Tuple[RewriteRule, int]]:
    if rs.strategy == "priority":
        for rule in rs.rules:
            pos = _find(tokens, rule.pattern)
            if pos >= 0:
                return rule, pos
        return None
    reverse = rs.strategy == "rightmost"
    best: Optional[Tuple[RewriteRule, int]] = None
    for rule in rs.rules:
        pos = _find(tokens, rule.pattern, reverse=reverse)
        if pos < 0:
            continue
        if best is None or (pos > best[1] if reverse else pos < best[1]):
            best = (rule, pos)
    return best


def apply_once(word: Union[str, CircuitWord], rs: RuleSet) -> Optional[Tuple[CircuitWord, str, int]]:
    """Apply the first applicable rule; None when nothing matches."""
    tokens = _as_tokens(word).tokens
    hit = _select(tokens, rs)
    if hit is None:
        return None
    rule, pos = hit
    new_tokens = tokens[:pos] + rule.replacement + tokens[pos + len(rule.pattern):]
    return CircuitWord(new_tokens), rule.source, pos


def rewrite_fixpoint(word: Union[str, CircuitWord], rs: RuleSet,
                     debug_verify: bool = False, check_every: int = DEFAULT_CHECK_EVERY) -> RewriteOutcome:
    """
    Rewrite until no rule matches or the step cap is reached.

    Every ``check_every``-th step and the final word are re-evaluated
    against the starting operator; ``debug_verify`` checks every step and
    ``check_every=0`` turns the checks off. Words over symbols outside the
    gate alphabet are never checked.
    """
    current = _as_tokens(word)
    if debug_verify:
        check_every = 1
    if check_every and not all(t in ALPHABET for t in current):
        check_every = 0
    reference = eval_word(current) if check_every else None
    trace: List[TraceRecord] = []

    def check(rule_id: str, pos: int) -> None:
        if reference is not None and eval_word(current) != reference:
            raise UnsoundRewrite(f"rule {rule_id} at position {pos} changed the operator")

    for step in range(rs.step_cap):
        applied = apply_once(current, rs)
        if applied is None:
            if check_every and trace and step % check_every:
                check(trace[-1].rule, trace[-1].position)
            return RewriteOutcome(current, trace, True)
        current, rule_id, pos = applied
        trace.append(TraceRecord(rule_id, pos, len(current)))
        if check_every and (step + 1) % check_every == 0:
            check(rule_id, pos)

    logger.warning(f"Rewrite step cap {rs.step_cap} reached in rule set {rs.name}")
    if check_every and trace and rs.step_cap % check_every:
        check(trace[-1].rule, trace[-1].position)
    return RewriteOutcome(current, trace, apply_once(current, rs) is None)


# --- measures -------------------------------------------------------------------

def _inversions(tokens: Sequence[str], order: Dict[str, int]) -> int:
    ranks = [order.get(t, len(order)) for t in tokens]
    return sum(1 for a in range(len(ranks)) for b in range(a + 1, len(ranks)) if ranks[a] > ranks[b])


TOKEN_ORDER = {tok: n for n, tok in enumerate(BASE_ALPHABET)}


def measure_of(word: CircuitWord, measure: Optional[str]) -> Tuple[int, ...]:
    if measure == "length":
        return (len(word),)
    if measure == "k-then-length":
        return (sum(1 for t in word if t.startswith("K")), len(word))
    if measure == "inversions":
        return (_inversions(word.tokens, TOKEN_ORDER),)
    return ()


def trace_decreases(word: CircuitWord, rs: RuleSet) -> bool:
    """Replay the rewrite and check the rule set's measure drops at every step."""
    if rs.measure is None:
        return True
    current = word
    previous = measure_of(current, rs.measure)
    for _ in range(rs.step_cap):
        applied = apply_once(current, rs)
        if applied is None:
            return True
        current = applied[0]
        now = measure_of(current, rs.measure)
        if not now < previous:
            return False
        previous = now
    return True


# --- prebuilt rule sets ---------------------------------------------------------

DIAGONAL_BASE = ("i", "S0", "S1", "S2", "CS01", "CS12")


def power_rules() -> RuleSet:
    """
    Order collapses: i^4, S^4, CS^4 vanish and K^2 becomes i^3, so K^8
    rewrites to i^12 and then to the empty word.
    """
    rules = [RewriteRule.of("i i i i", "", "C1")]
    for q in range(3):
        rules.append(RewriteRule.of(f"K{q} K{q}", "i i i", "C2", f"q={q}"))
        rules.append(RewriteRule.of(" ".join([f"S{q}"] * 4), "", "C3", f"q={q}"))
    for cs in ("CS01", "CS12"):
        rules.append(RewriteRule.of(" ".join([cs] * 4), "", "C5", cs))
    return RuleSet(rules, measure="k-then-length", name="power")


def _commute(a: str, b: str) -> bool:
    if a == "i" or b == "i":
        return True
    if a in DIAGONAL_BASE and b in DIAGONAL_BASE:
        return True
    return set(ALPHABET[a].support).isdisjoint(ALPHABET[b].support)


def commute_rules() -> RuleSet:
    """Sort commuting base tokens into a fixed order; i moves to the front."""
    rules = []
    for a in BASE_ALPHABET:
        for b in BASE_ALPHABET:
            if a != b and TOKEN_ORDER[a] > TOKEN_ORDER[b] and _commute(a, b):
                source = "MONOIDAL" if "i" in (a, b) or set(ALPHABET[a].support).isdisjoint(
                    ALPHABET[b].support) else "DIAGONAL"
                rules.append(RewriteRule.of(f"{a} {b}", f"{b} {a}", source, f"{a}|{b}"))
    return RuleSet(rules, measure="inversions", name="commute")


def syllable_rule_set() -> RuleSet:
    rules = []
    for n, (lhs, rhs) in enumerate(SYLLABLE_RULES, start=1):
        rules.append(RewriteRule(tuple(as_word(lhs)), tuple(as_word(rhs)), f"SYL-r{n}"))
    return RuleSet(rules, name="syllable")


def combined_rules(*sets: RuleSet, name: str = "combined") -> RuleSet:
    rules: List[RewriteRule] = []
    for rs in sets:
        rules.extend(rs.rules)
    return RuleSet(rules, name=name)


def rules_from_relations(relations: Sequence[Relation], reverse: bool = False) -> RuleSet:
    """Orient relations lhs -> rhs (or rhs -> lhs)."""
    rules = []
    for r in relations:
        src, dst = (r.rhs, r.lhs) if reverse else (r.lhs, r.rhs)
        rules.append(RewriteRule(src.tokens, dst.tokens, r.label))
    return RuleSet(rules, name="relations")


RULE_SETS = {
    "power": power_rules,
    "commute": commute_rules,
    "syllable": syllable_rule_set,
}


def get_rule_set(name: str, step_cap: Optional[int] = None) -> RuleSet:
    if name == "simplify":
        rs = combined_rules(power_rules(), commute_rules(), name="simplify")
    elif name in RULE_SETS:
        rs = RULE_SETS[name]()
    else:
        raise ValueError(f"unknown rule set {name!r}")
    if step_cap is not None:
        rs.step_cap = step_cap
    return rs


# --- confluence sampling --------------------------------------------------------

@dataclass
class ConfluenceReport:
    samples: int
    disagreements: int
    capped: int
    examples: List[Tuple[str, str, str]] = field(default_factory=list)

    @property
    def disagreement_rate(self) -> float:
        return self.disagreements / self.samples if self.samples else 0.0

    def to_dict(self) -> Dict:
        return {
            "samples": self.samples,
            "disagreements": self.disagreements,
            "capped": self.capped,
            "disagreement_rate": self.disagreement_rate,
            "examples": [list(e) for e in self.examples],
        }


def confluence_sample(rs: RuleSet, words: Sequence[CircuitWord], keep_examples: int = 5) -> ConfluenceReport:
    """Compare fixpoints under leftmost and rightmost matching; asserts nothing."""
    left_rs, right_rs = rs.with_strategy("leftmost"), rs.with_strategy("rightmost")
    report = ConfluenceReport(samples=len(words), disagreements=0, capped=0)
    for word in words:
        left = rewrite_fixpoint(word, left_rs)
        right = rewrite_fixpoint(word, right_rs)
        if not (left.exhausted and right.exhausted):
            report.capped += 1
            continue
        if left.word != right.word:
            report.disagreements += 1
            if len(report.examples) < keep_examples:
                report.examples.append((display_word(word), display_word(left.word), display_word(right.word)))
    logger.info(f"Confluence sample on {rs.name}: {report.disagreements}/{report.samples} disagree")
    return report
