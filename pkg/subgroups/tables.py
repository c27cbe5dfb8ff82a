"""
Enumeration of the finite subgroups and the precomputed lookup tables
(coset representatives V, the C and Q permutation tables, K0D prefix candidates).

Tables are built once per process and persisted to the JSON cache under a
format/version header; a missing file or a different version triggers a
rebuild.
"""

from collections import deque
from dataclasses import astuple, dataclass, field
from pathlib import Path
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from circuits.circuit import CircuitWord, eval_word, gate_matrix, parse_word, render_word
from exact.linalg import ExactMatrix
from subgroups.monomial import MonomialOperator, token_monomial, word_monomial
from subgroups.normal_forms import D_GENERATORS, CNormal, EBlock, QNormal
from utils.config import TABLE_CACHE_FORMAT, TABLE_CACHE_KEY, TABLE_CACHE_VERSION
from utils.errors import Cs3Error
from utils.file_utils import FileUtils
from utils.logger import get_logger

logger = get_logger(__name__)


class BudgetExceeded(Cs3Error):
    """Enumeration or closure grew past its element budget"""


Q_GENERATORS = ("X0", "CX10", "CX20", "CCX0")
C_GENERATORS = ("X1", "CX12", "CX21")
P_GENERATORS = ("CX01", "CX10", "CX12", "CX21", "CCX0", "X0")
W_GENERATORS = ("SWAP01", "SWAP12")

GROUP_GENERATORS: Dict[str, Tuple[str, ...]] = {
    "W": W_GENERATORS,
    "Q": Q_GENERATORS,
    "C": C_GENERATORS,
    "CQ": C_GENERATORS + Q_GENERATORS,
    "P": P_GENERATORS,
    "D": D_GENERATORS,
    "PD": P_GENERATORS + D_GENERATORS,
    "QD": Q_GENERATORS + D_GENERATORS,
    "CQD": C_GENERATORS + Q_GENERATORS + D_GENERATORS,
    "K0": ("K0",),
    "K0D": ("K0",) + D_GENERATORS,
    "K0CD": ("K0",) + C_GENERATORS + D_GENERATORS,
    "K0W": ("K0",) + W_GENERATORS,
}
# groups small enough to list; K0W and <K0> contain non-monomial elements
MONOMIAL_ENUMERABLE = ("W", "Q", "C", "CQ", "D", "P")
MATRIX_ENUMERABLE = ("K0W", "K0")
ENUMERABLE = MONOMIAL_ENUMERABLE + MATRIX_ENUMERABLE
DEFAULT_BUDGET = 100_000


@dataclass
class ElementTable:
    """Elements of an enumerated group keyed canonically, each with its shortest word."""

    group: str
    generators: Tuple[str, ...]
    words: Dict[Hashable, CircuitWord] = field(default_factory=dict)
    elements: List = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.words)

    def contains_key(self, key: Hashable) -> bool:
        return key in self.words


def bfs_closure(generators: Sequence[str], as_element: Callable[[str], object],
                identity, key: Callable[[object], Hashable],
                budget: int = DEFAULT_BUDGET, group: str = "custom",
                progress: bool = False) -> ElementTable:
    """
    Breadth-first closure under right multiplication by the generators, in
    the listed order; the first word reaching an element is shortlex-least.
    """
    gens = [(g, as_element(g)) for g in generators]
    table = ElementTable(group, tuple(generators))
    start_key = key(identity)
    table.words[start_key] = CircuitWord()
    table.elements.append(identity)
    queue = deque([(identity, CircuitWord())])
    bar = tqdm(total=None, desc=f"enumerating {group}", disable=not progress, unit="el")
    while queue:
        element, word = queue.popleft()
        for name, g in gens:
            nxt = element @ g
            k = key(nxt)
            if k in table.words:
                continue
            if len(table.words) >= budget:
                bar.close()
                raise BudgetExceeded(f"{group}: more than {budget} elements")
            new_word = word + CircuitWord((name,))
            table.words[k] = new_word
            table.elements.append(nxt)
            queue.append((nxt, new_word))
            bar.update(1)
    bar.close()
    logger.info(f"Enumerated {group}: {table.order} elements")
    return table


def enumerate_generated(generators: Sequence[str], budget: int = DEFAULT_BUDGET,
                        group: str = "custom", monomial: Optional[bool] = None,
                        progress: bool = False) -> ElementTable:
    """Enumerate the group generated by the given tokens."""
    if monomial is None:
        monomial = all(gate_matrix(g).is_monomial() for g in generators)
    if monomial:
        return bfs_closure(generators, token_monomial, MonomialOperator.identity(),
                           lambda op: op.key(), budget, group, progress)
    return bfs_closure(generators, gate_matrix, ExactMatrix.identity(8),
                       lambda m: m.key(), budget, group, progress)


def enumerate_subgroup(group: str, budget: int = DEFAULT_BUDGET, progress: bool = False) -> ElementTable:
    if group not in ENUMERABLE:
        raise ValueError(f"{group} is not enumerable; choose from {ENUMERABLE}")
    return enumerate_generated(GROUP_GENERATORS[group], budget, group,
                               monomial=group in MONOMIAL_ENUMERABLE, progress=progress)


# --- coset structure ----------------------------------------------------------

def fiber_partition(op: MonomialOperator) -> Tuple[Tuple[int, int], ...]:
    """
    Image of the pairs {(0,a,b), (1,a,b)} as a sorted perfect matching; two
    permutations share it iff they lie in the same left coset of CQ.
    """
    perm = op.perm
    return tuple(sorted(tuple(sorted((perm[low], perm[4 + low]))) for low in range(4)))


def sigma_of(op: MonomialOperator) -> Tuple[int, ...]:
    """Action on (x1, x2) of an operator that fixes x0."""
    return tuple(op.perm[low] & 3 for low in range(4))


def sigma_operator(sigma: Sequence[int]) -> MonomialOperator:
    """The permutation fixing x0 and acting as sigma on (x1, x2)."""
    return MonomialOperator([(x & 4) | sigma[x & 3] for x in range(8)])


class SubgroupTables:
    """
    Immutable lookup tables shared by every factor/normalize call. The C and
    Q tables are computed from their normal-form words unless given, as they
    are when loaded from the cache.
    """

    def __init__(self, coset_words: Sequence[CircuitWord],
                 c_table: Optional[Dict[Tuple[int, ...], CNormal]] = None,
                 q_table: Optional[Dict[QNormal, Tuple[int, ...]]] = None):
        self.coset_words: List[CircuitWord] = list(coset_words)
        self.coset_ops: List[MonomialOperator] = [word_monomial(w) for w in self.coset_words]
        self.coset_index: Dict[Tuple, int] = {fiber_partition(op): v for v, op in enumerate(self.coset_ops)}
        if len(self.coset_index) != len(self.coset_words):
            raise Cs3Error("coset representatives are not pairwise inequivalent")

        if c_table is None:
            self.c_ops: Dict[CNormal, MonomialOperator] = {c: word_monomial(c.word()) for c in CNormal.all()}
            self.c_by_sigma: Dict[Tuple[int, ...], CNormal] = {sigma_of(op): c for c, op in self.c_ops.items()}
        else:
            self.c_by_sigma = dict(c_table)
            self.c_ops = {c: sigma_operator(sigma) for sigma, c in self.c_by_sigma.items()}
        if len(self.c_by_sigma) != 24 or len(self.c_ops) != 24:
            raise Cs3Error("C table does not hold 24 distinct permutations")

        if q_table is None:
            self.q_ops: Dict[QNormal, MonomialOperator] = {
                QNormal(a, b, c, d): word_monomial(QNormal(a, b, c, d).word())
                for a in range(2) for b in range(2) for c in range(2) for d in range(2)
            }
        else:
            self.q_ops = {q: MonomialOperator(perm) for q, perm in q_table.items()}
        if len({op.perm for op in self.q_ops.values()}) != 16:
            raise Cs3Error("Q table does not hold 16 distinct permutations")

        self.e_candidates: List[Tuple[EBlock, ExactMatrix, ExactMatrix]] = []
        for e in EBlock.all():
            m = eval_word(e.word())
            self.e_candidates.append((e, m, m.adjoint()))

        self._w_table: Optional[ElementTable] = None
        self._k0w_table: Optional[ElementTable] = None
        self._k0_table: Optional[ElementTable] = None

    def coset_word(self, v: int) -> CircuitWord:
        return self.coset_words[v]

    @property
    def w_table(self) -> ElementTable:
        if self._w_table is None:
            self._w_table = enumerate_subgroup("W")
        return self._w_table

    @property
    def k0w_table(self) -> ElementTable:
        if self._k0w_table is None:
            self._k0w_table = enumerate_subgroup("K0W")
        return self._k0w_table

    @property
    def k0_table(self) -> ElementTable:
        if self._k0_table is None:
            self._k0_table = enumerate_subgroup("K0")
        return self._k0_table

    def to_payload(self) -> Dict:
        return {
            "coset_representatives": [render_word(w) for w in self.coset_words],
            "c_table": [{"c": [c.c4, c.c3, c.c2], "sigma": list(sigma)}
                        for sigma, c in sorted(self.c_by_sigma.items())],
            "q_table": [{"q": [q.a, q.b, q.c, q.d], "perm": list(op.perm)}
                        for q, op in sorted(self.q_ops.items(), key=lambda kv: astuple(kv[0]))],
        }

    @classmethod
    def from_payload(cls, payload: Dict) -> "SubgroupTables":
        try:
            c_table = {tuple(e["sigma"]): CNormal(*e["c"]) for e in payload["c_table"]}
            q_table = {QNormal(*e["q"]): tuple(e["perm"]) for e in payload["q_table"]}
            words = [parse_word(w) for w in payload["coset_representatives"]]
        except (KeyError, TypeError) as e:
            raise Cs3Error(f"malformed table cache: {e}") from e
        return cls(words, c_table=c_table, q_table=q_table)


def build_coset_table(progress: bool = False) -> List[CircuitWord]:
    """
    The 105 left-coset representatives of CQ in P: for each coset, the
    shortlex-least word over the P generators.
    """
    p_table = enumerate_subgroup("P", progress=progress)
    reps: Dict[Tuple, CircuitWord] = {}
    for op in p_table.elements:
        k = fiber_partition(op)
        if k not in reps:
            reps[k] = p_table.words[op.key()]
    words = list(reps.values())
    logger.info(f"Built coset table with {len(words)} representatives")
    return words


def build_tables(progress: bool = False) -> SubgroupTables:
    return SubgroupTables(build_coset_table(progress))


def _cache_utils(cache_dir: Union[str, Path]) -> FileUtils:
    utils = FileUtils(Path(cache_dir).parent)
    utils.cache_dir = Path(cache_dir)
    return utils


def is_table_cached(cache_dir: Union[str, Path]) -> bool:
    return _cache_utils(cache_dir).is_cached(TABLE_CACHE_KEY)


def clear_table_cache(cache_dir: Union[str, Path]) -> bool:
    """Delete the table cache file; returns whether one existed."""
    utils = _cache_utils(cache_dir)
    existed = utils.is_cached(TABLE_CACHE_KEY)
    if existed:
        utils.clear_cache(TABLE_CACHE_KEY)
    return existed


def save_tables(tables: SubgroupTables, cache_dir: Union[str, Path]) -> Path:
    return _cache_utils(cache_dir).save_to_cache(
        tables.to_payload(), TABLE_CACHE_KEY, TABLE_CACHE_FORMAT, TABLE_CACHE_VERSION)


def load_tables(cache_dir: Union[str, Path]) -> Optional[SubgroupTables]:
    payload = _cache_utils(cache_dir).load_from_cache(TABLE_CACHE_KEY, TABLE_CACHE_FORMAT, TABLE_CACHE_VERSION)
    if payload is None:
        return None
    return SubgroupTables.from_payload(payload)


_tables: Optional[SubgroupTables] = None


def get_tables(cache_dir: Union[str, Path, None] = None, rebuild: bool = False,
               progress: bool = False) -> SubgroupTables:
    """
    The process-wide tables: from memory, else from the cache, else built
    (and written back when a cache directory is given).
    """
    global _tables
    if _tables is not None and not rebuild:
        return _tables
    if cache_dir is not None and not rebuild:
        loaded = load_tables(cache_dir)
        if loaded is not None:
            logger.info(f"Loaded subgroup tables from {cache_dir}")
            _tables = loaded
            return _tables
        logger.warning(f"No usable table cache in {cache_dir}; rebuilding")
    _tables = build_tables(progress)
    if cache_dir is not None:
        save_tables(_tables, cache_dir)
    return _tables
