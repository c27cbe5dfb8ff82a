"""
Relation sets for 3-qubit Clifford+CS circuits and for U_n(Z[1/2, i]),
materialized as concrete word pairs and verified by exact evaluation.

Circuit relations use the 8x8 gate model. The one- and two-level
relations for U_n use tokens ``i[j]``, ``X[j,k]`` and ``K[j,k]`` evaluated
as n x n level matrices.
"""

import itertools
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from circuits.circuit import (ALPHABET, BASE_ALPHABET, CircuitWord, as_word, display_word,
                              eval_word, invert_word, reverse_qubits)
from exact.linalg import ExactMatrix, level_matrices
from utils.errors import Cs3Error
from utils.file_utils import get_file_utils
from utils.logger import get_logger

logger = get_logger(__name__)

CIRCUIT_MODEL = "cs3"
LEVEL_MODEL = "level"


class UnknownRelationSet(Cs3Error):
    """Requested relation set id does not exist"""


@dataclass(frozen=True)
class Relation:
    """lhs = rhs, tagged with its family and index assignment."""

    lhs: CircuitWord
    rhs: CircuitWord
    family: str
    instance: str = ""
    model: str = CIRCUIT_MODEL
    dim: int = 8

    def __str__(self) -> str:
        return f"{display_word(self.lhs)} = {display_word(self.rhs)}"

    @property
    def label(self) -> str:
        return f"{self.family}[{self.instance}]" if self.instance else self.family


@dataclass
class VerificationResult:
    relation: Relation
    holds: bool
    witness: Optional[Tuple[int, int, str, str]] = None
    det_equal: bool = True

    def to_dict(self) -> Dict:
        out = {
            "family": self.relation.family,
            "instance": self.relation.instance,
            "relation": str(self.relation),
            "holds": self.holds,
        }
        if self.witness is not None:
            row, col, lhs_value, rhs_value = self.witness
            out["witness"] = {"row": row, "col": col, "lhs": lhs_value, "rhs": rhs_value}
        return out


def _rel(lhs: str, rhs: str, family: str, instance: str = "") -> Relation:
    return Relation(as_word(lhs), as_word(rhs), family, instance)


# --- core families -------------------------------------------------------------

ADJACENT_PAIRS = ((0, 1), (1, 2))


def _cs(a: int, b: int) -> str:
    return f"CS{a}{b}"


def core_relations() -> List[Relation]:
    """The 30 instances of C1..C17."""
    rels = [_rel("i i i i", "", "C1")]
    for q in range(3):
        inst = f"q={q}"
        rels += [
            _rel(f"K{q} K{q}", "i i i", "C2", inst),
            _rel(f"S{q} S{q} S{q} S{q}", "", "C3", inst),
            _rel(f"S{q} K{q} S{q} K{q} S{q} K{q}", "i i i", "C4", inst),
        ]
    for a, b in ADJACENT_PAIRS:
        cs, inst = _cs(a, b), f"{a}{b}"
        rels += [
            _rel(f"{cs} {cs} {cs} {cs}", "", "C5", inst),
            _rel(f"S{a} {cs}", f"{cs} S{a}", "C6", inst),
            _rel(f"S{b} {cs}", f"{cs} S{b}", "C7", inst),
            _rel(f"X{a} {cs}", f"{cs} {cs} {cs} X{a} S{b}", "C8", inst),
            _rel(f"X{b} {cs}", f"{cs} {cs} {cs} X{b} S{a}", "C9", inst),
            _rel(f"S{a} K{a} {cs} K{a} {cs}", f"{cs} K{a} {cs} K{a} S{a}", "C10", inst),
            _rel(f"S{b} K{b} {cs} K{b} {cs}", f"{cs} K{b} {cs} K{b} S{b}", "C11", inst),
        ]
    rels += [
        _rel("CS12 CS01", "CS01 CS12", "C12"),
        _rel("CX10 CX01 CS12 CX01 CX10", "CX12 CX21 CS01 CX21 CX12", "C13"),
        _rel("CS12 CX01 CS12^3 CX01", "CS01 CX21 CS01^3 CX21", "C14"),
        _rel("CX10 CX01 CS12^2 CX01 CX10", "CX01 CS12^2 CX01 CS12^2", "C15"),
        _rel("CS12 K1 CS12 K1 CS01 K1 CS01", "CS01 K1 CS01 K1 CS12 K1 CS12", "C16"),
        _rel("CS12 K1 CS12^3 K1 CS01 K1 CS12", "CS01 K1 CS01^3 K1 CS12 K1 CS01", "C17"),
    ]
    return rels


def _commutations(tokens: Sequence[str], family: str,
                  skip: Optional[Iterable[Tuple[str, str]]] = None) -> List[Relation]:
    """i commutes with every token; disjoint-support pairs commute."""
    skip = set(skip or ())
    rels = []
    for tok in tokens:
        if tok != "i" and ("i", tok) not in skip:
            rels.append(_rel(f"i {tok}", f"{tok} i", family, f"i,{tok}"))
    for a, b in itertools.combinations(tokens, 2):
        if "i" in (a, b) or (a, b) in skip:
            continue
        if set(ALPHABET[a].support).isdisjoint(ALPHABET[b].support):
            rels.append(_rel(f"{a} {b}", f"{b} {a}", family, f"{a}|{b}"))
    return rels


def monoidal_relations() -> List[Relation]:
    """Family (e) over the base alphabet: these are the axioms."""
    return _commutations(BASE_ALPHABET, "MONOIDAL")


CORE_MACROS = ("X0", "X1", "X2", "CX01", "CX10", "CX12", "CX21")


def extended_monoidal_relations() -> List[Relation]:
    """Disjoint-support commutations that involve an X or CX macro gate."""
    base_pairs = {(a, b) for a, b in itertools.combinations(BASE_ALPHABET, 2)}
    base_pairs |= {("i", t) for t in BASE_ALPHABET}
    return _commutations(BASE_ALPHABET + CORE_MACROS, "EXT-MONOIDAL", skip=base_pairs)


def cs3_relations() -> List[Relation]:
    return core_relations() + monoidal_relations()


# --- definitions, intro, worked example, syllable rules, amalgam ---------------

def definition_relations() -> List[Relation]:
    """One relation per macro definition, plus the K1/K2 abbreviations."""
    rels = [Relation(as_word(sym), CircuitWord(spec.expansion), f"DEF-{sym}")
            for sym, spec in ALPHABET.items() if not spec.is_base]
    rels += [
        _rel("K1", "SWAP01 K0 SWAP01", "DEF-K1"),
        _rel("K2", "SWAP12 SWAP01 K0 SWAP01 SWAP12", "DEF-K2"),
    ]
    return rels


def intro_relations() -> List[Relation]:
    """The CS-count reducing relation on qubits (0, 1), with K on either qubit."""
    return [
        _rel("CSdg01 K1 CS01 K1 CS01", "Sdg1 K1 CS01 K1 S1", "INTRO", "K1"),
        _rel("CSdg01 K0 CS01 K0 CS01", "Sdg0 K0 CS01 K0 S0", "INTRO", "K0"),
    ]


def worked_relations() -> List[Relation]:
    return [_rel("X1 K0 CS01 K0 CCZ", "K0 CS01^3 S0 K0 CCZ CS02^2 X1", "WORKED")]


SYLLABLE_RULES = (
    ("SWAP01 K0 SWAP01 K0", "K0 SWAP01 K0 SWAP01"),
    ("CCX2 K0 CK10", "K0 CK10 CCX2"),
    ("CCX2 CK20 CCK0", "CK20 CCK0 CCX2 CS01^2"),
    ("CCX1 CK10 CCK0", "CK10 CCK0 CCX1 CS02^2"),
    ("CCX2 CX02 CK10", "CK10 CCX2 CX02"),
    ("K0 CCX2 K0 CCX2", "CCX2 K0 CCX2 K0 CX12"),
)


def syllable_relations() -> List[Relation]:
    return [_rel(lhs, rhs, f"SYL-r{n}") for n, (lhs, rhs) in enumerate(SYLLABLE_RULES, start=1)]


C16_DERIVATION = (
    "CS12 K1 CS12 K1 CS01 K1 CS01",
    "CS12 SWAP01 K0 SWAP01 CS12 SWAP01 K0 SWAP01 CS01 SWAP01 K0 SWAP01 CS01",
    "SWAP01 CS02 K0 CS02 K0 CS01 K0 CS01 SWAP01",
    "SWAP01 CS01 K0 CS01 K0 CS02 K0 CS02 SWAP01",
    "CS01 SWAP01 K0 SWAP01 CS01 SWAP01 K0 SWAP01 CS12 SWAP01 K0 SWAP01 CS12",
    "CS01 K1 CS01 K1 CS12 K1 CS12",
)


def amalgam_relations() -> List[Relation]:
    rels = [
        _rel("SWAP01 SWAP01", "", "AMALGAM-swap-square"),
        _rel("SWAP01 CS12 SWAP01", "CS02", "AMALGAM-swap-cs12"),
        _rel("SWAP01 CS01 SWAP01", "CS01", "AMALGAM-swap-cs01"),
        _rel("CS02 K0 CS02 K0 CS01 K0 CS01", "CS01 K0 CS01 K0 CS02 K0 CS02", "AMALGAM-k0-alternation"),
    ]
    for step in range(1, len(C16_DERIVATION)):
        rels.append(_rel(C16_DERIVATION[step - 1], C16_DERIVATION[step], "AMALGAM-C16", f"step{step}"))
    return rels


def qubit_reversal(r: Relation) -> Relation:
    """Relabel qubit q as 2 - q on both sides."""
    if r.model != CIRCUIT_MODEL:
        raise UnknownRelationSet("qubit reversal is defined for circuit relations only")
    family = r.family[len("UPSIDE-"):] if r.family.startswith("UPSIDE-") else f"UPSIDE-{r.family}"
    return Relation(reverse_qubits(r.lhs), reverse_qubits(r.rhs), family, r.instance)


def updown_relations() -> List[Relation]:
    return [qubit_reversal(r) for r in cs3_relations()]


# --- level relations of U_n(Z[1/2, i]) ---------------------------------------

def li(j: int) -> str:
    return f"i[{j}]"


def lx(j: int, k: int) -> str:
    return f"X[{j},{k}]"


def lk(j: int, k: int) -> str:
    return f"K[{j},{k}]"


_LEVEL_TOKEN = re.compile(r"^(?P<kind>[iXK])\[(?P<j>\d+)(?:,(?P<k>\d+))?\]$")


def _lrel(lhs: Sequence[str], rhs: Sequence[str], eq: str, n: int, instance: str) -> Relation:
    return Relation(CircuitWord(lhs), CircuitWord(rhs), f"LEVEL-eq{eq}", instance, LEVEL_MODEL, n)


def level_relations(n: int) -> List[Relation]:
    """Every instance of the U_n relations with admissible distinct indices."""
    if not 2 <= n <= 16:
        raise UnknownRelationSet(f"level relations need 2 <= n <= 16, got {n}")
    idx = range(n)
    pairs = list(itertools.combinations(idx, 2))
    triples = list(itertools.combinations(idx, 3))
    rels: List[Relation] = []

    for j in idx:
        rels.append(_lrel([li(j)] * 4, [], "1", n, f"j={j}"))
    for j, k in pairs:
        rels.append(_lrel([lx(j, k)] * 2, [], "2", n, f"{j},{k}"))
        rels.append(_lrel([lk(j, k)] * 8, [], "3", n, f"{j},{k}"))
    for j, k in itertools.permutations(idx, 2):
        rels.append(_lrel([li(j), li(k)], [li(k), li(j)], "4", n, f"{j},{k}"))
    for j in idx:
        for k, l in pairs:
            if j in (k, l):
                continue
            rels.append(_lrel([li(j), lx(k, l)], [lx(k, l), li(j)], "5", n, f"{j};{k},{l}"))
            rels.append(_lrel([li(j), lk(k, l)], [lk(k, l), li(j)], "6", n, f"{j};{k},{l}"))
    for (j, k), (l, m) in itertools.permutations(pairs, 2):
        if {j, k} & {l, m}:
            continue
        inst = f"{j},{k};{l},{m}"
        rels.append(_lrel([lx(j, k), lx(l, m)], [lx(l, m), lx(j, k)], "7", n, inst))
        rels.append(_lrel([lx(j, k), lk(l, m)], [lk(l, m), lx(j, k)], "8", n, inst))
        rels.append(_lrel([lk(j, k), lk(l, m)], [lk(l, m), lk(j, k)], "9", n, inst))
    for j, k in pairs:
        inst = f"{j},{k}"
        rels += [
            _lrel([li(k), lx(j, k)], [lx(j, k), li(j)], "10", n, inst),
            _lrel([lk(j, k), li(k), li(k)], [lx(j, k), lk(j, k)], "13", n, inst),
            _lrel([lk(j, k)] + [li(k)] * 3, [li(k), lk(j, k), li(k), lk(j, k)], "14", n, inst),
            _lrel([lk(j, k), li(j), li(k)], [li(j), li(k), lk(j, k)], "15", n, inst),
            _lrel([lk(j, k), lk(j, k), li(j), li(k)], [], "16", n, inst),
        ]
    for j, k, l in triples:
        inst = f"{j},{k},{l}"
        rels += [
            _lrel([lx(k, l), lx(j, k)], [lx(j, k), lx(j, l)], "11", n, inst),
            _lrel([lx(j, l), lx(k, l)], [lx(k, l), lx(j, k)], "11p", n, inst),
            _lrel([lk(k, l), lx(j, k)], [lx(j, k), lk(j, l)], "12", n, inst),
            _lrel([lk(j, l), lx(k, l)], [lx(k, l), lk(j, k)], "12p", n, inst),
        ]
    for quad in itertools.combinations(idx, 4):
        j, m = quad[0], quad[3]
        for k, l in ((quad[1], quad[2]), (quad[2], quad[1])):
            rels.append(_lrel([lk(j, k), lk(l, m), lk(j, l), lk(k, m)],
                              [lk(j, l), lk(k, m), lk(j, k), lk(l, m)],
                              "17", n, f"{j},{k},{l},{m}"))
    return rels


@lru_cache(maxsize=None)
def level_token_matrix(tok: str, n: int) -> ExactMatrix:
    match = _LEVEL_TOKEN.match(tok)
    if match is None:
        raise UnknownRelationSet(f"not a level-matrix token: {tok!r}")
    k = match.group("k")
    return level_matrices(match.group("kind"), int(match.group("j")), int(k) if k is not None else None, n)


def eval_level_word(word: CircuitWord, n: int) -> ExactMatrix:
    result = ExactMatrix.identity(n)
    for tok in word:
        result = result @ level_token_matrix(tok, n)
    return result


LEVEL_INVERSE_POWER = {"i": 3, "X": 1, "K": 7}


def invert_level_word(word: CircuitWord) -> CircuitWord:
    out: List[str] = []
    for tok in reversed(word.tokens):
        out.extend([tok] * LEVEL_INVERSE_POWER[tok[0]])
    return CircuitWord(out)


# --- evaluation and verification ----------------------------------------------

def eval_side(r: Relation, word: CircuitWord) -> ExactMatrix:
    if r.model == LEVEL_MODEL:
        return eval_level_word(word, r.dim)
    return eval_word(word)


def invert_relation(r: Relation) -> Relation:
    inv = invert_level_word if r.model == LEVEL_MODEL else invert_word
    return Relation(inv(r.lhs), inv(r.rhs), r.family, r.instance, r.model, r.dim)


def verify_relation(r: Relation) -> VerificationResult:
    """Exact check of eval(lhs) == eval(rhs); the witness is the first differing entry."""
    left, right = eval_side(r, r.lhs), eval_side(r, r.rhs)
    diff = left.first_difference(right)
    det_equal = True
    if r.model == LEVEL_MODEL:
        det_equal = left.det() == right.det()
    if diff is None:
        logger.debug(f"verified {r.label}")
        return VerificationResult(r, True, det_equal=det_equal)
    row, col, a, b = diff
    logger.debug(f"relation {r.label} fails at ({row},{col}): {a} != {b}")
    return VerificationResult(r, False, (row, col, str(a), str(b)), det_equal=det_equal)


def verify_relations(relations: Sequence[Relation], workers: int = 1,
                     progress: bool = False, desc: str = "verifying") -> List[VerificationResult]:
    """Verify in input order; workers > 1 uses a process pool."""
    if workers > 1 and len(relations) > 1:
        chunk = max(1, len(relations) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(tqdm(pool.map(verify_relation, relations, chunksize=chunk),
                                total=len(relations), desc=desc, disable=not progress))
    else:
        results = [verify_relation(r) for r in tqdm(relations, desc=desc, disable=not progress)]
    failures = [res for res in results if not res.holds]
    for res in failures:
        logger.error(f"Relation failed: {res.relation.label}: {res.relation}")
    logger.info(f"Verified {len(results)} relations, {len(failures)} failed")
    return results


def summarize_by_family(results: Sequence[VerificationResult]) -> Dict[str, Dict[str, int]]:
    summary: Dict[str, Dict[str, int]] = {}
    for res in results:
        entry = summary.setdefault(res.relation.family, {"passed": 0, "total": 0})
        entry["total"] += 1
        entry["passed"] += int(res.holds)
    return summary


# --- registry and files --------------------------------------------------------

RELATION_SETS = {
    "c17": core_relations,
    "monoidal": monoidal_relations,
    "ext-monoidal": extended_monoidal_relations,
    "cs3": cs3_relations,
    "defs": definition_relations,
    "intro": intro_relations,
    "worked": worked_relations,
    "fig4": syllable_relations,
    "updown": updown_relations,
    "amalgam": amalgam_relations,
}
LEVEL_SET_IDS = ("level", "u8")


def builtin_relation_sets(which: str, n: Optional[int] = None) -> List[Relation]:
    """
    Instantiate a named relation set. ``level`` (alias ``u8``) needs the
    dimension n (default 8).
    """
    key = which.lower()
    if key in LEVEL_SET_IDS:
        return level_relations(8 if n is None else n)
    if key not in RELATION_SETS:
        raise UnknownRelationSet(f"unknown relation set {which!r}; "
                                 f"choose from {sorted(RELATION_SETS) + list(LEVEL_SET_IDS)}")
    return RELATION_SETS[key]()


def parse_relation(text: str, family: str = "FILE", instance: str = "") -> Relation:
    if text.count("=") != 1:
        raise UnknownRelationSet(f"relation must have the form 'lhs = rhs': {text!r}")
    lhs, rhs = text.split("=")
    return Relation(as_word(lhs), as_word(rhs), family, instance)


def load_relation_file(path: Union[str, Path]) -> List[Relation]:
    """One 'lhs = rhs' relation per line; '#' starts a comment."""
    lines = get_file_utils().read_text_lines(path)
    return [parse_relation(line, "FILE", f"{Path(path).name}:{n}") for n, line in enumerate(lines, start=1)]
