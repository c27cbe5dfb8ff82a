"""
Reidemeister-Schreier for the kernel of a grading onto Z_m.

A CosetSystem grades each generator, names one representative word per
coset and gives an inverse word for every generator. The kernel is then
generated by r_j g inv(r_{j + deg g}) and presented by translating every
relation through every coset.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from circuits.circuit import CircuitWord
from circuits.relations import eval_level_word, level_relations, li, lk, lx
from exact.linalg import ExactMatrix
from exact.ring import I
from subgroups.tables import BudgetExceeded
from utils.config import DEFAULT_SAMPLE_SIZE, DEFAULT_SEED
from utils.errors import Cs3Error
from utils.file_utils import load_json, save_json
from utils.logger import get_logger

logger = get_logger(__name__)

Word = Tuple[str, ...]
Model = Callable[[Sequence[str]], ExactMatrix]


class MissingInverseWitness(Cs3Error):
    """A generator needed an inverse word and none was supplied"""


class UnknownSymbol(Cs3Error):
    """A word uses a symbol the presentation does not declare"""


@dataclass
class Presentation:
    generators: List[str]
    relations: List[Tuple[Word, Word]] = field(default_factory=list)

    def __post_init__(self):
        self.relations = [(tuple(lhs), tuple(rhs)) for lhs, rhs in self.relations]
        declared = set(self.generators)
        for lhs, rhs in self.relations:
            unknown = (set(lhs) | set(rhs)) - declared
            if unknown:
                raise UnknownSymbol(f"relation {' '.join(lhs)} = {' '.join(rhs)} uses {sorted(unknown)}")

    def to_dict(self) -> Dict:
        return {"generators": list(self.generators),
                "relations": [[list(lhs), list(rhs)] for lhs, rhs in self.relations]}

    @classmethod
    def from_dict(cls, data: Dict) -> "Presentation":
        return cls(list(data["generators"]), [(tuple(l), tuple(r)) for l, r in data.get("relations", [])])


@dataclass
class CosetSystem:
    """
    Grading generator -> Z_m with representatives r_0 = ε, ..., r_{m-1} and
    an inverse word per generator.
    """

    index: int
    grading: Dict[str, int]
    representatives: List[Word]
    inverse_witnesses: Dict[str, Word] = field(default_factory=dict)

    def __post_init__(self):
        self.representatives = [tuple(r) for r in self.representatives]
        self.inverse_witnesses = {g: tuple(w) for g, w in self.inverse_witnesses.items()}
        if len(self.representatives) != self.index:
            raise ValueError(f"need {self.index} representatives, got {len(self.representatives)}")
        if self.representatives[0]:
            raise ValueError("the identity coset must be represented by the empty word")
        for j, rep in enumerate(self.representatives):
            if self.coset_of(rep) != j:
                raise ValueError(f"representative {' '.join(rep)} lies in coset {self.coset_of(rep)}, not {j}")

    def coset_of(self, word: Sequence[str]) -> int:
        try:
            return sum(self.grading[g] for g in word) % self.index
        except KeyError as exc:
            raise UnknownSymbol(f"no grading for {exc.args[0]}") from exc

    def inverse(self, word: Sequence[str]) -> Word:
        out: List[str] = []
        for g in reversed(word):
            if g not in self.inverse_witnesses:
                raise MissingInverseWitness(f"no inverse word for {g}")
            out.extend(self.inverse_witnesses[g])
        return tuple(out)


@dataclass(frozen=True)
class SchreierGenerator:
    coset: int
    generator: str
    word: Word

    @property
    def name(self) -> str:
        return f"{self.generator}@{self.coset}"


def schreier_generators(p: Presentation, cs: CosetSystem) -> List[SchreierGenerator]:
    """One kernel generator r_j g inv(r_{j+deg g}) per coset j and generator g."""
    out = []
    for j in range(cs.index):
        for g in p.generators:
            target = (j + cs.grading[g]) % cs.index
            word = cs.representatives[j] + (g,) + cs.inverse(cs.representatives[target])
            out.append(SchreierGenerator(j, g, word))
    return out


def translate(word: Sequence[str], start: int, cs: CosetSystem) -> Word:
    """Rewrite a word read from coset ``start`` into Schreier generator names."""
    out = []
    j = start
    for g in word:
        out.append(f"{g}@{j}")
        j = (j + cs.grading[g]) % cs.index
    return tuple(out)


@dataclass
class KernelPresentation:
    presentation: Presentation
    definitions: Dict[str, Word]
    schreier: List[SchreierGenerator]
    eliminated: List[str] = field(default_factory=list)
    raw_relations: int = 0

    def expand(self, word: Sequence[str]) -> Word:
        """A word over kernel generators spelled in the original alphabet."""
        out: List[str] = []
        for s in word:
            out.extend(self.definitions[s])
        return tuple(out)

    def to_dict(self) -> Dict:
        return {
            **self.presentation.to_dict(),
            "definitions": {k: list(v) for k, v in self.definitions.items()},
            "schreier_generators": len(self.schreier),
            "eliminated": list(self.eliminated),
            "raw_relations": self.raw_relations,
        }


def _eliminate(generators: List[str], relations: List[Tuple[Word, Word]]) -> Tuple[List[str], List[Tuple[Word, Word]], List[str]]:
    """Drop every generator that some relation sets equal to ε, repeatedly."""
    trivial: set = set()
    while True:
        found = {side[0] for lhs, rhs in relations for side, other in ((lhs, rhs), (rhs, lhs))
                 if len(side) == 1 and not other and side[0] not in trivial}
        if not found:
            break
        trivial |= found
        relations = [(tuple(s for s in lhs if s not in trivial), tuple(s for s in rhs if s not in trivial))
                     for lhs, rhs in relations]
    kept = []
    seen = set()
    for lhs, rhs in relations:
        if lhs == rhs:
            continue
        key = tuple(sorted((lhs, rhs)))
        if key not in seen:
            seen.add(key)
            kept.append((lhs, rhs))
    return [g for g in generators if g not in trivial], kept, sorted(trivial)


def rs_present(p: Presentation, cs: CosetSystem, eliminate: bool = True,
               progress: bool = False) -> KernelPresentation:
    """
    Kernel presentation: every relation translated at every coset, the
    inverse-witness relations translated likewise, and s = ε for each
    Schreier generator whose word r_j g is already the next representative.
    """
    schreier = schreier_generators(p, cs)
    definitions = {s.name: s.word for s in schreier}
    relations: List[Tuple[Word, Word]] = []

    for s in schreier:
        if cs.representatives[s.coset] + (s.generator,) == cs.representatives[
                (s.coset + cs.grading[s.generator]) % cs.index]:
            relations.append(((s.name,), ()))

    sources = list(p.relations)
    for g, w in cs.inverse_witnesses.items():
        if g in cs.grading:
            sources.append(((g,) + w, ()))
    for lhs, rhs in tqdm(sources, desc="translating relations", disable=not progress):
        if cs.coset_of(lhs) != cs.coset_of(rhs):
            raise ValueError(f"relation {' '.join(lhs)} = {' '.join(rhs)} does not respect the grading")
        for j in range(cs.index):
            relations.append((translate(lhs, j, cs), translate(rhs, j, cs)))

    raw = len(relations)
    generators = [s.name for s in schreier]
    eliminated: List[str] = []
    if eliminate:
        generators, relations, eliminated = _eliminate(generators, relations)
    logger.info(f"Kernel presentation: {len(schreier)} Schreier generators, {len(generators)} kept, "
                f"{raw} raw relations, {len(relations)} after cleanup")
    return KernelPresentation(Presentation(generators, relations), definitions, schreier, eliminated, raw)


# --- semantic checks ----------------------------------------------------------------

def matrix_model(images: Dict[str, ExactMatrix]) -> Model:
    dim = next(iter(images.values())).rows

    def evaluate(word: Sequence[str]) -> ExactMatrix:
        result = ExactMatrix.identity(dim)
        for g in word:
            result = result @ images[g]
        return result
    return evaluate


def check_inverse_witnesses(cs: CosetSystem, model: Model) -> List[str]:
    """Generators whose witness word is not their inverse under the model."""
    bad = []
    for g, w in cs.inverse_witnesses.items():
        m = model((g,) + w)
        if m != ExactMatrix.identity(m.rows):
            bad.append(g)
    return bad


@dataclass
class SoundnessReport:
    checked_generators: int
    checked_relations: int
    generator_failures: List[str] = field(default_factory=list)
    relation_failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.generator_failures or self.relation_failures)

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "checked_generators": self.checked_generators,
            "checked_relations": self.checked_relations,
            "generator_failures": self.generator_failures,
            "relation_failures": self.relation_failures,
        }


def check_soundness(kp: KernelPresentation, cs: CosetSystem, model: Model,
                    sample: Optional[int] = None, seed: int = DEFAULT_SEED,
                    progress: bool = False) -> SoundnessReport:
    """
    Schreier words must lie in the kernel and both sides of every relation
    (or of a uniform sample of them) must agree under the model.
    """
    relations = kp.presentation.relations
    if sample is not None and sample < len(relations):
        rng = np.random.default_rng(seed)
        picks = sorted(int(k) for k in rng.choice(len(relations), size=sample, replace=False))
        relations = [relations[k] for k in picks]
    report = SoundnessReport(len(kp.schreier), len(relations))
    report.generator_failures = [s.name for s in kp.schreier if cs.coset_of(s.word) != 0]
    for lhs, rhs in tqdm(relations, desc="checking relations", disable=not progress):
        if model(kp.expand(lhs)) != model(kp.expand(rhs)):
            report.relation_failures.append(f"{' '.join(lhs) or 'ε'} = {' '.join(rhs) or 'ε'}")
    if not report.passed:
        logger.error(f"{len(report.relation_failures)} derived relations fail under the model")
    return report


# --- brute-force oracle ---------------------------------------------------------------

@dataclass
class MonoidTable:
    """Elements with a shortest word each and the right action of the generators."""

    words: List[Word]
    action: List[Dict[str, int]]

    @property
    def order(self) -> int:
        return len(self.words)


def _closure_by_model(p: Presentation, model: Model, budget: int) -> MonoidTable:
    first = model(())
    index = {first.key(): 0}
    words: List[Word] = [()]
    elements = [first]
    action: List[Dict[str, int]] = [{}]
    n = 0
    while n < len(words):
        for g in p.generators:
            m = elements[n] @ model((g,))
            k = m.key()
            if k not in index:
                if len(words) >= budget:
                    raise BudgetExceeded(f"more than {budget} elements")
                index[k] = len(words)
                words.append(words[n] + (g,))
                elements.append(m)
                action.append({})
            action[n][g] = index[k]
        n += 1
    return MonoidTable(words, action)


class _CongruenceGraph:
    """Right Cayley graph of the presented monoid, built by defining and merging nodes."""

    def __init__(self, generators: Sequence[str], budget: int):
        self.generators = list(generators)
        self.budget = budget
        self.parent: List[int] = [0]
        self.edges: List[Dict[str, int]] = [{}]
        self.words: List[Word] = [()]
        self.live = 1

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def define(self, node: int, g: str) -> int:
        if self.live >= self.budget:
            raise BudgetExceeded(f"more than {self.budget} elements")
        new = len(self.parent)
        self.live += 1
        self.parent.append(new)
        self.edges.append({})
        self.words.append(self.words[node] + (g,))
        self.edges[node][g] = new
        return new

    def follow(self, node: int, word: Sequence[str]) -> int:
        node = self.find(node)
        for g in word:
            nxt = self.edges[node].get(g)
            node = self.find(nxt) if nxt is not None else self.define(node, g)
        return node

    def merge(self, a: int, b: int) -> None:
        pending = [(a, b)]
        while pending:
            x, y = (self.find(v) for v in pending.pop())
            if x == y:
                continue
            if y < x:
                x, y = y, x
            self.parent[y] = x
            self.live -= 1
            for g, t in self.edges[y].items():
                if g in self.edges[x]:
                    pending.append((self.edges[x][g], t))
                else:
                    self.edges[x][g] = t


def brute_force_monoid(p: Presentation, budget: int = 10_000, model: Optional[Model] = None) -> MonoidTable:
    """
    Enumerate the presented monoid. With a model, elements are distinct
    model values; otherwise the relations are closed under congruence on the
    right Cayley graph. Raises BudgetExceeded past ``budget`` elements.
    """
    if model is not None:
        return _closure_by_model(p, model, budget)
    graph = _CongruenceGraph(p.generators, budget)
    node = 0
    while node < len(graph.parent):
        if graph.find(node) == node:
            for lhs, rhs in p.relations:
                graph.merge(graph.follow(node, lhs), graph.follow(node, rhs))
                if graph.find(node) != node:
                    break
            if graph.find(node) == node:
                for g in p.generators:
                    graph.follow(node, (g,))
        node += 1
    live = [k for k in range(len(graph.parent)) if graph.find(k) == k]
    position = {k: n for n, k in enumerate(live)}
    words = [graph.words[k] for k in live]
    action = [{g: position[graph.find(t)] for g, t in graph.edges[k].items()} for k in live]
    return MonoidTable(words, action)


# --- toy and U_8 instances ----------------------------------------------------------------

def cyclic_toy() -> Tuple[Presentation, CosetSystem, Model]:
    """<a | a^4 = ε> graded a -> 1 mod 2; the kernel is {ε, a^2}."""
    p = Presentation(["a"], [(("a",) * 4, ())])
    cs = CosetSystem(2, {"a": 1}, [(), ("a",)], {"a": ("a", "a", "a")})
    return p, cs, matrix_model({"a": ExactMatrix([[I]])})


def dihedral_toy() -> Tuple[Presentation, CosetSystem, Model]:
    """
    <a, b | a^2 = ε, b^2 = ε> graded by length parity, modelled by the
    affine maps x -> -x and x -> 1 - x.
    """
    p = Presentation(["a", "b"], [(("a", "a"), ()), (("b", "b"), ())])
    cs = CosetSystem(2, {"a": 1, "b": 1}, [(), ("a",)], {"a": ("a",), "b": ("b",)})
    model = matrix_model({
        "a": ExactMatrix.from_ints([[-1, 0], [0, 1]]),
        "b": ExactMatrix.from_ints([[-1, 1], [0, 1]]),
    })
    return p, cs, model


def level_generators(n: int) -> List[str]:
    gens = [li(j) for j in range(n)]
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    gens += [lx(j, k) for j, k in pairs]
    gens += [lk(j, k) for j, k in pairs]
    return gens


def level_presentation(n: int = 8) -> Presentation:
    return Presentation(level_generators(n), [(r.lhs.tokens, r.rhs.tokens) for r in level_relations(n)])


def det_parity_system(n: int = 8) -> CosetSystem:
    """
    det(i_[j]) = det(K_[j,k]) = i and det(X_[j,k]) = -1, so counting i and K
    tokens mod 2 separates determinant ±1 from ±i.
    """
    grading = {g: 0 if g.startswith("X") else 1 for g in level_generators(n)}
    witnesses = {}
    for g in level_generators(n):
        power = {"i": 3, "X": 1, "K": 7}[g[0]]
        witnesses[g] = (g,) * power
    return CosetSystem(2, grading, [(), (li(0),)], witnesses)


def level_model(n: int = 8) -> Model:
    return lambda word: eval_level_word(CircuitWord(word), n)


@dataclass
class LevelApplicationReport:
    n: int
    schreier_generators: int
    kernel_generators: int
    raw_relations: int
    soundness: SoundnessReport

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "schreier_generators": self.schreier_generators,
            "kernel_generators": self.kernel_generators,
            "raw_relations": self.raw_relations,
            "soundness": self.soundness.to_dict(),
        }


def determinant_kernel(n: int = 8, sample_size: int = DEFAULT_SAMPLE_SIZE, seed: int = DEFAULT_SEED,
                       progress: bool = False) -> LevelApplicationReport:
    """Kernel of the determinant-parity grading of U_n, with sampled soundness."""
    p = level_presentation(n)
    cs = det_parity_system(n)
    model = level_model(n)
    bad = check_inverse_witnesses(cs, model)
    if bad:
        raise MissingInverseWitness(f"inverse words fail for {bad}")
    kp = rs_present(p, cs, progress=progress)
    soundness = check_soundness(kp, cs, model, sample=sample_size, seed=seed, progress=progress)
    return LevelApplicationReport(n, len(kp.schreier), len(kp.presentation.generators),
                                  kp.raw_relations, soundness)


# --- files --------------------------------------------------------------------------------

def load_presentation_file(path: Union[str, Path]) -> Tuple[Presentation, Optional[CosetSystem]]:
    """
    JSON with generators and relations, optionally a grading. Missing
    representatives are found by breadth-first search over the generators;
    missing inverse words are read off relations of the form g^k = ε.
    """
    data = load_json(path)
    if data is None:
        raise Cs3Error(f"cannot read a presentation from {path}")
    p = Presentation.from_dict(data)
    if "grading" not in data:
        return p, None
    index = int(data.get("index", 2))
    grading = {g: int(v) % index for g, v in data["grading"].items()}
    reps = data.get("representatives")
    if reps is None:
        reps = _find_representatives(p.generators, grading, index)
    witnesses = {g: tuple(w) for g, w in data.get("inverse_witnesses", {}).items()}
    for lhs, rhs in p.relations:
        if not rhs and lhs and len(set(lhs)) == 1 and lhs[0] not in witnesses:
            witnesses[lhs[0]] = lhs[1:]
    return p, CosetSystem(index, grading, reps, witnesses)


def _find_representatives(generators: Sequence[str], grading: Dict[str, int], index: int) -> List[Word]:
    reps: Dict[int, Word] = {0: ()}
    frontier: List[Word] = [()]
    while len(reps) < index and frontier:
        nxt = []
        for w in frontier:
            for g in generators:
                word = w + (g,)
                c = sum(grading[t] for t in word) % index
                if c not in reps:
                    reps[c] = word
                    nxt.append(word)
        frontier = nxt
    if len(reps) < index:
        raise ValueError(f"grading reaches only {len(reps)} of {index} cosets")
    return [reps[j] for j in range(index)]


def save_presentation(p: Union[Presentation, KernelPresentation], path: Union[str, Path]) -> Path:
    save_json(p.to_dict(), path)
    return Path(path)
