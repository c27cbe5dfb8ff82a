"""
Almost-normal forms for 3-qubit Clifford+CS circuits.

A circuit is cut at its K0 gates into monomial (PD) segments, then folded
left to right: the monomial prefix before each K0 is split into a coset
representative and a CQD part, the CQD part and the K0 are refactored as an
E-block followed by D Q C, and that remainder is carried into the next
segment. The result has the shape

    V e  V e  ...  V e  V (C Q D)

Gate powers are collapsed first. The syllable rules are compiled through the
same fold, so each one matches a run of E-blocks and coset representatives;
a rewrite is kept only when the refolded word is strictly smaller.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

from circuits.circuit import (DIM, CircuitWord, as_word, bits, cs_count, display_word, eval_word,
                              expand, gate_matrix, invert_word, render_word)
from circuits.relations import SYLLABLE_RULES
from exact.linalg import ExactMatrix
from rewriting.rewrite import RuleSet, UnsoundRewrite, get_rule_set, rewrite_fixpoint
from subgroups.factor import decode_permutation_operator, factor_k0cd, split_operator
from subgroups.monomial import MonomialOperator, word_monomial
from subgroups.normal_forms import CNormal, DNormal, EBlock, QNormal
from subgroups.tables import SubgroupTables, get_tables
from utils.config import RunConfig
from utils.logger import get_logger

logger = get_logger(__name__)

# K1 and K2 conjugated down to qubit 0
K_REPLACEMENTS = {
    "K1": ("SWAP01", "K0", "SWAP01"),
    "K2": ("SWAP12", "SWAP01", "K0", "SWAP01", "SWAP12"),
}


# --- syllables ------------------------------------------------------------------

@dataclass(frozen=True)
class RawSegment:
    word: CircuitWord


@dataclass(frozen=True)
class K0Marker:
    pass


@dataclass(frozen=True)
class CosetRep:
    v_index: int


@dataclass(frozen=True)
class ESyllable:
    e: EBlock


@dataclass(frozen=True)
class Tail:
    c: CNormal
    q: QNormal
    d: DNormal


Syllable = Union[RawSegment, K0Marker, CosetRep, ESyllable, Tail]


@dataclass
class SyllableWord:
    syllables: List[Syllable] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.syllables)

    def syllable_word(self, syl: Syllable, tables: SubgroupTables) -> CircuitWord:
        if isinstance(syl, RawSegment):
            return syl.word
        if isinstance(syl, K0Marker):
            return CircuitWord(("K0",))
        if isinstance(syl, CosetRep):
            return tables.coset_word(syl.v_index)
        if isinstance(syl, ESyllable):
            return syl.e.word()
        return syl.c.word() + syl.q.word() + syl.d.word()

    def flatten(self, tables: Optional[SubgroupTables] = None, start: int = 0,
                stop: Optional[int] = None) -> CircuitWord:
        tables = tables or get_tables()
        tokens: List[str] = []
        for syl in self.syllables[start:stop]:
            tokens.extend(self.syllable_word(syl, tables))
        return CircuitWord(tokens)

    @property
    def e_blocks(self) -> List[EBlock]:
        return [s.e for s in self.syllables if isinstance(s, ESyllable)]

    @property
    def is_processed(self) -> bool:
        """(CosetRep ESyllable)* CosetRep Tail"""
        syl = self.syllables
        if not syl:
            return True
        if len(syl) % 2 or not isinstance(syl[-1], Tail):
            return False
        return all(isinstance(s, CosetRep if n % 2 == 0 else ESyllable) for n, s in enumerate(syl[:-1]))

    def structure(self, tables: Optional[SubgroupTables] = None) -> List[Dict]:
        tables = tables or get_tables()
        out = []
        for syl in self.syllables:
            if isinstance(syl, RawSegment):
                out.append({"kind": "PD", "word": display_word(syl.word)})
            elif isinstance(syl, K0Marker):
                out.append({"kind": "K0"})
            elif isinstance(syl, CosetRep):
                out.append({"kind": "V", "v": syl.v_index,
                            "word": display_word(tables.coset_word(syl.v_index))})
            elif isinstance(syl, ESyllable):
                out.append({"kind": "E", **syl.e.to_dict()})
            else:
                out.append({"kind": "tail", "c": syl.c.to_dict(), "q": syl.q.to_dict(),
                            "d": syl.d.to_dict()})
        return out


@lru_cache(maxsize=None)
def _is_monomial_token(tok: str) -> bool:
    return gate_matrix(tok).is_monomial()


def _base_tokens(word: CircuitWord) -> List[str]:
    """Non-monomial macros expanded, K1/K2 moved onto qubit 0."""
    tokens: List[str] = []
    for tok in word:
        if tok == "K0" or tok in K_REPLACEMENTS or _is_monomial_token(tok):
            parts = (tok,)
        else:
            parts = expand(CircuitWord((tok,))).tokens
        for part in parts:
            tokens.extend(K_REPLACEMENTS.get(part, (part,)))
    return tokens


def alternation_decompose(word: Union[str, CircuitWord]) -> SyllableWord:
    """
    Split at K0 into raw PD segments. Adjacent K0 gates get an explicit empty
    segment between them.
    """
    syllables: List[Syllable] = []
    segment: List[str] = []
    previous_k0 = False
    for tok in _base_tokens(as_word(word)):
        if tok == "K0":
            if segment or previous_k0:
                syllables.append(RawSegment(CircuitWord(segment)))
            syllables.append(K0Marker())
            segment, previous_k0 = [], True
        else:
            segment.append(tok)
            previous_k0 = False
    if segment:
        syllables.append(RawSegment(CircuitWord(segment)))
    return SyllableWord(syllables)


# --- the left-to-right fold -------------------------------------------------------

def _d_operator(d: DNormal) -> MonomialOperator:
    return MonomialOperator.diagonal([d.phase(*bits(x)) for x in range(DIM)])


def fold(decomposed: SyllableWord, tables: SubgroupTables) -> SyllableWord:
    """One pass turning raw segments and K0 markers into V / E-block / tail form."""
    k0 = gate_matrix("K0")
    out: List[Syllable] = []
    pending = MonomialOperator.identity()
    for syl in decomposed.syllables:
        if isinstance(syl, RawSegment):
            pending = pending @ word_monomial(syl.word)
            continue
        perm, _ = split_operator(pending)
        v = decode_permutation_operator(perm, tables).v_index
        cqd = tables.coset_ops[v].inverse() @ pending
        k = factor_k0cd(cqd.to_matrix() @ k0, tables)
        out.append(CosetRep(v))
        out.append(ESyllable(k.k.e))
        pending = _d_operator(k.k.d) @ tables.q_ops[k.k.q] @ tables.c_ops[k.c]
    if not decomposed.syllables:
        return SyllableWord([])
    perm, d = split_operator(pending)
    p = decode_permutation_operator(perm, tables)
    out.append(CosetRep(p.v_index))
    out.append(Tail(p.c, p.q, d))
    return SyllableWord(out)


def measure(sw: SyllableWord, tables: SubgroupTables) -> Tuple[int, int, int, Tuple[str, ...]]:
    """(#E-blocks, total coset-representative length, total length, flattened tokens)"""
    flat = sw.flatten(tables)
    v_length = sum(len(tables.coset_word(s.v_index)) for s in sw.syllables if isinstance(s, CosetRep))
    return len(sw.e_blocks), v_length, len(flat), flat.tokens


def refold(word: Union[str, CircuitWord], tables: SubgroupTables) -> SyllableWord:
    return fold(alternation_decompose(word), tables)


# --- syllable-level rules -------------------------------------------------------

@dataclass(frozen=True)
class SyllableRule:
    """
    A syllable relation compiled through the fold. ``source`` folds to
    V_a core V_b T, so ``core`` (E-blocks with the coset representatives
    between them) equals V_a^-1 source T^-1 V_b^-1, and ``replacement`` is
    that word with ``target`` in place of ``source``.
    """

    number: int
    label: str
    source: CircuitWord
    target: CircuitWord
    core: Tuple[Syllable, ...]
    replacement: CircuitWord

    @property
    def blocks(self) -> int:
        return sum(1 for s in self.core if isinstance(s, ESyllable))


def compile_syllable_rule(number: int, label: str, source: CircuitWord, target: CircuitWord,
                          tables: SubgroupTables) -> Optional[SyllableRule]:
    folded = refold(source, tables)
    syl = folded.syllables
    if len(syl) < 4:
        return None
    lead = folded.flatten(tables, 0, 1)
    trail = folded.flatten(tables, len(syl) - 2)
    replacement = invert_word(lead) + target + invert_word(trail)
    return SyllableRule(number, label, source, target, tuple(syl[1:-2]), replacement)


@lru_cache(maxsize=4)
def syllable_rules(tables: SubgroupTables) -> Tuple[SyllableRule, ...]:
    """
    One rule per syllable relation, in the listed order, pointing from the
    side whose fold has the larger measure to the other side.
    """
    rules = []
    for n, (lhs, rhs) in enumerate(SYLLABLE_RULES, start=1):
        lw, rw = as_word(lhs), as_word(rhs)
        if eval_word(lw) != eval_word(rw):
            logger.error(f"Syllable rule r{n} does not hold; skipping it")
            continue
        ml, mr = measure(refold(lw, tables), tables), measure(refold(rw, tables), tables)
        if ml == mr:
            logger.debug(f"Both sides of syllable rule r{n} fold to the same word")
            continue
        label, source, target = (f"SYL-r{n}", lw, rw) if ml > mr else (f"SYL-r{n}-rev", rw, lw)
        rule = compile_syllable_rule(n, label, source, target, tables)
        if rule is not None:
            rules.append(rule)
    logger.debug(f"Compiled {len(rules)} syllable rules")
    return tuple(rules)


def match_syllable_rule(rule: SyllableRule, sw: SyllableWord, pos: int) -> bool:
    """Does the rule's core sit at syllable ``pos`` (an E-block position)?"""
    return tuple(sw.syllables[pos:pos + len(rule.core)]) == rule.core


def apply_syllable_rule(rule: SyllableRule, sw: SyllableWord, pos: int,
                        tables: SubgroupTables) -> SyllableWord:
    """Swap the matched core for the rule's replacement and refold the whole word."""
    word = sw.flatten(tables, 0, pos) + rule.replacement + sw.flatten(tables, pos + len(rule.core))
    return refold(word, tables)


def _first_improvement(sw: SyllableWord, tables: SubgroupTables, power: RuleSet,
                       check_every: int) -> Optional[Tuple[SyllableWord, str]]:
    """
    Syllable rules in order, each at its leftmost position that lowers the
    measure; failing that, the power rules on the flattened word.
    """
    current = measure(sw, tables)
    for rule in syllable_rules(tables):
        for pos in range(1, len(sw.syllables) - 2, 2):
            if not match_syllable_rule(rule, sw, pos):
                continue
            candidate = apply_syllable_rule(rule, sw, pos, tables)
            if measure(candidate, tables) < current:
                return candidate, rule.label
    collapsed = rewrite_fixpoint(sw.flatten(tables), power, check_every=check_every)
    if collapsed.steps:
        candidate = refold(collapsed.word, tables)
        if measure(candidate, tables) < current:
            return candidate, power.name
    return None


# --- entry points -------------------------------------------------------------------

@dataclass
class NormalizeStats:
    input_length: int
    output_length: int = 0
    k0_syllables: int = 0
    cs_before: int = 0
    cs_after: int = 0
    passes: int = 0
    simplify_steps: int = 0
    rewrites: List[str] = field(default_factory=list)
    exhausted: bool = True

    def to_dict(self) -> Dict:
        return {
            "input_length": self.input_length,
            "output_length": self.output_length,
            "k0_syllables": self.k0_syllables,
            "cs_before": self.cs_before,
            "cs_after": self.cs_after,
            "passes": self.passes,
            "simplify_steps": self.simplify_steps,
            "rewrites": list(self.rewrites),
            "exhausted": self.exhausted,
        }


def _check_unchanged(sw: SyllableWord, reference: Optional[ExactMatrix], tables: SubgroupTables,
                     passes: int) -> None:
    if reference is not None and eval_word(sw.flatten(tables)) != reference:
        raise UnsoundRewrite(f"normalization changed the operator after pass {passes}")


def almost_normalize(word: Union[str, CircuitWord], config: Optional[RunConfig] = None,
                     tables: Optional[SubgroupTables] = None) -> Tuple[SyllableWord, NormalizeStats]:
    """
    Collapse gate powers, fold the word into almost-normal form and apply
    syllable rewrites until none shrinks it or the pass cap is hit. Hitting
    the cap is reported in the stats; the returned word still evaluates to
    the input.
    """
    word = as_word(word)
    tables = tables or get_tables()
    config = config or RunConfig()
    check_every = 1 if config.debug_verify else config.check_every
    reference: Optional[ExactMatrix] = eval_word(word) if check_every else None
    power = get_rule_set("power", step_cap=config.step_cap)

    stats = NormalizeStats(input_length=len(word), cs_before=cs_count(word))
    simplified = rewrite_fixpoint(word, power, debug_verify=config.debug_verify, check_every=check_every)
    stats.simplify_steps = simplified.steps
    sw = refold(simplified.word, tables)
    stats.passes = 1
    stats.exhausted = False
    if config.debug_verify:
        _check_unchanged(sw, reference, tables, stats.passes)
    while stats.passes < config.pass_cap:
        step = _first_improvement(sw, tables, power, check_every)
        if step is None:
            stats.exhausted = True
            break
        sw, label = step
        stats.rewrites.append(label)
        stats.passes += 1
        if check_every and stats.passes % check_every == 0:
            _check_unchanged(sw, reference, tables, stats.passes)
        logger.debug(f"Applied {label}; now {len(sw.e_blocks)} E-blocks")
    else:
        logger.warning(f"Pass cap {config.pass_cap} reached while normalizing a word of length {len(word)}")
    _check_unchanged(sw, reference, tables, stats.passes)

    flat = sw.flatten(tables)
    stats.output_length = len(flat)
    stats.k0_syllables = len(sw.e_blocks)
    stats.cs_after = cs_count(flat)
    return sw, stats


@dataclass
class EquivalenceResult:
    equal: bool
    witness: Optional[Tuple[int, int, str, str]] = None
    forms_match: Optional[bool] = None

    def to_dict(self) -> Dict:
        return {"equal": self.equal, "witness": list(self.witness) if self.witness else None,
                "forms_match": self.forms_match}


def equiv_check(u: Union[str, CircuitWord], v: Union[str, CircuitWord], compare_forms: bool = True,
                config: Optional[RunConfig] = None,
                tables: Optional[SubgroupTables] = None) -> EquivalenceResult:
    """
    Exact equality of the two operators, with the first differing entry as
    witness. Optionally also reports whether both almost-normal forms are
    the same word.
    """
    u, v = as_word(u), as_word(v)
    mu, mv = eval_word(u), eval_word(v)
    diff = mu.first_difference(mv)
    witness = None
    if diff is not None:
        r, c, a, b = diff
        witness = (r, c, str(a), str(b))
    forms_match = None
    if compare_forms:
        tables = tables or get_tables()
        fu, _ = almost_normalize(u, config, tables)
        fv, _ = almost_normalize(v, config, tables)
        forms_match = fu.flatten(tables) == fv.flatten(tables)
    return EquivalenceResult(diff is None, witness, forms_match)


def render_syllables(sw: SyllableWord, tables: Optional[SubgroupTables] = None) -> str:
    """Syllables separated by ' | ' for terminal output."""
    tables = tables or get_tables()
    return " | ".join(render_word(sw.syllable_word(s, tables)) or "ε" for s in sw.syllables)
