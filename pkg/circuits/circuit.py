"""
Circuit words over the 3-qubit Clifford+CS alphabet.

A word g1 g2 ... gk denotes the matrix product g1 * g2 * ... * gk, so the
rightmost gate acts first. Basis index = 4*x0 + 2*x1 + x2 (qubit 0 is the
leftmost tensor factor).

Base generators are i, K0..K2, S0..S2, CS01, CS12. Every other symbol is a
macro with a single defining word; macros are evaluated through matrices
built directly from their intended action, so evaluating a macro and
evaluating its definition are two independent computations.
"""

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from exact.linalg import CS_MATRIX, ExactMatrix, K_MATRIX, S_MATRIX, tensor
from exact.ring import DyadicGaussian, I, INV_ONE_PLUS_I, ONE, ZERO
from utils.errors import Cs3Error
from utils.logger import get_logger

logger = get_logger(__name__)

GateToken = str
DIM = 8


class ParseError(Cs3Error):
    """Unknown token or malformed qubit index in circuit text"""


class NoMirrorGate(Cs3Error):
    """A token whose qubit-reversed image is not in the alphabet"""


@dataclass(frozen=True)
class GateSpec:
    """Static description of one alphabet symbol."""

    symbol: str
    support: Tuple[int, ...]
    expansion: Optional[Tuple[str, ...]] = None  # None for base generators
    inverse: Tuple[str, ...] = ()
    mirror: Optional[str] = None

    @property
    def is_base(self) -> bool:
        return self.expansion is None


class CircuitWord:
    """An immutable sequence of gate tokens."""

    __slots__ = ("tokens",)

    def __init__(self, tokens: Iterable[GateToken] = ()):
        self.tokens: Tuple[GateToken, ...] = tuple(tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[GateToken]:
        return iter(self.tokens)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return CircuitWord(self.tokens[item])
        return self.tokens[item]

    def __add__(self, other: "CircuitWord") -> "CircuitWord":
        return CircuitWord(self.tokens + tuple(other))

    def __mul__(self, power: int) -> "CircuitWord":
        return CircuitWord(self.tokens * power)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CircuitWord):
            return self.tokens == other.tokens
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.tokens)

    def __bool__(self) -> bool:
        return bool(self.tokens)

    def __str__(self) -> str:
        return render_word(self)

    def __repr__(self) -> str:
        return f"CircuitWord({render_word(self) or 'ε'!r})"


EPSILON = CircuitWord()


# --- alphabet ---------------------------------------------------------------

def _w(text: str) -> Tuple[str, ...]:
    return tuple(text.split())


def _build_alphabet() -> Dict[str, GateSpec]:
    specs: List[GateSpec] = [GateSpec("i", (), inverse=_w("i i i"), mirror="i")]
    for q in range(3):
        m = 2 - q
        specs += [
            GateSpec(f"K{q}", (q,), inverse=_w(f"i K{q}"), mirror=f"K{m}"),
            GateSpec(f"S{q}", (q,), inverse=_w(f"S{q} S{q} S{q}"), mirror=f"S{m}"),
            GateSpec(f"X{q}", (q,), _w(f"K{q} S{q} S{q} K{q} i"), _w(f"X{q}"), f"X{m}"),
            GateSpec(f"Sdg{q}", (q,), _w(f"S{q} S{q} S{q}"), _w(f"S{q}"), f"Sdg{m}"),
        ]
    specs += [
        GateSpec("CS01", (0, 1), inverse=_w("CS01 CS01 CS01"), mirror="CS12"),
        GateSpec("CS12", (1, 2), inverse=_w("CS12 CS12 CS12"), mirror="CS01"),
        GateSpec("CS02", (0, 2), _w("SWAP12 CS01 SWAP12"), _w("CS02 CS02 CS02"), "CS02"),
    ]
    for ab in ("01", "12", "02"):
        mirrored = "".join(sorted(str(2 - int(c)) for c in ab))
        specs.append(GateSpec(f"CSdg{ab}", (int(ab[0]), int(ab[1])), _w(f"CS{ab} CS{ab} CS{ab}"),
                              _w(f"CS{ab}"), f"CSdg{mirrored}"))
    # controlled-X: control c, target t, built from CS on the pair
    for c, t in ((0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2)):
        pair = "".join(sorted(f"{c}{t}"))
        specs.append(GateSpec(f"CX{c}{t}", tuple(sorted((c, t))),
                              _w(f"K{t} CS{pair} CS{pair} K{t} i"), _w(f"CX{c}{t}"),
                              f"CX{2 - c}{2 - t}"))
    specs += [
        GateSpec("SWAP01", (0, 1), _w("CX01 CX10 CX01"), _w("SWAP01"), "SWAP12"),
        GateSpec("SWAP12", (1, 2), _w("CX12 CX21 CX12"), _w("SWAP12"), "SWAP01"),
        GateSpec("CK10", (0, 1), _w("CS01 K0 CS01 K0 S1 S1 S1 CS01 i"), _w("CK10 S1")),
        GateSpec("CK20", (0, 2), _w("SWAP12 CK10 SWAP12"), _w("CK20 S2")),
        GateSpec("CCZ", (0, 1, 2), _w("CS01 CX21 CS01 CS01 CS01 CX21 CS02"), _w("CCZ"), "CCZ"),
        GateSpec("CCX0", (0, 1, 2), _w("K0 CCZ K0 i"), _w("CCX0"), "CCX2"),
        GateSpec("CCX1", (0, 1, 2), _w("SWAP01 CCX0 SWAP01"), _w("CCX1"), "CCX1"),
        GateSpec("CCX2", (0, 1, 2), _w("SWAP12 CCX1 SWAP12"), _w("CCX2"), "CCX0"),
        # controlled-controlled K' with K' = K S^dagger; the trailing i i is part of it
        GateSpec("CCK0", (0, 1, 2),
                 _w("K0 CS01 K0 CS02 K0 CS01 K0 CCX0 CX10 "
                    "CS12 CS12 CS12 CS02 CS02 CS02 i i"),
                 _w("CCK0 CCK0 CS12 CS12")),
    ]
    return {s.symbol: s for s in specs}


ALPHABET: Dict[str, GateSpec] = _build_alphabet()
BASE_ALPHABET: Tuple[str, ...] = ("i", "K0", "K1", "K2", "S0", "S1", "S2", "CS01", "CS12")
MACRO_SYMBOLS: Tuple[str, ...] = tuple(s for s, spec in ALPHABET.items() if not spec.is_base)

_TOKEN_SHAPE = re.compile(r"^(?P<name>[A-Za-z]+?)(?P<index>\d*)$")
_POWER = re.compile(r"^(?P<token>[^\^]+)\^(?P<power>\d+)$")
_KNOWN_NAMES = {_TOKEN_SHAPE.match(s).group("name") for s in ALPHABET}


# --- text format --------------------------------------------------------------

def parse_token(text: str) -> GateToken:
    if text in ALPHABET:
        return text
    shape = _TOKEN_SHAPE.match(text)
    if shape and shape.group("name") in _KNOWN_NAMES:
        raise ParseError(f"malformed qubit index in token {text!r}")
    raise ParseError(f"unknown token {text!r}")


def parse_word(text: str) -> CircuitWord:
    """
    Parse whitespace-separated tokens. ``ε`` denotes the empty word and
    ``TOKEN^n`` is shorthand for n copies of TOKEN.
    """
    tokens: List[GateToken] = []
    for raw in text.split():
        if raw in ("ε", "eps"):
            continue
        power = _POWER.match(raw)
        if power:
            tokens.extend([parse_token(power.group("token"))] * int(power.group("power")))
        else:
            tokens.append(parse_token(raw))
    return CircuitWord(tokens)


def as_word(word: Union[str, CircuitWord, Sequence[str]]) -> CircuitWord:
    if isinstance(word, CircuitWord):
        return word
    if isinstance(word, str):
        return parse_word(word)
    return CircuitWord(parse_token(t) for t in word)


def render_word(word: CircuitWord, compact: bool = False) -> str:
    """Space-separated tokens; ``compact`` folds runs into TOKEN^n."""
    if not compact:
        return " ".join(word.tokens)
    parts: List[str] = []
    run_token, run = None, 0
    for tok in list(word.tokens) + [None]:
        if tok == run_token:
            run += 1
            continue
        if run_token is not None:
            parts.append(run_token if run == 1 else f"{run_token}^{run}")
        run_token, run = tok, 1
    return " ".join(parts)


def display_word(word: CircuitWord) -> str:
    return render_word(word, compact=True) or "ε"


# --- expansion, inversion, reversal ------------------------------------------

def expand(word: Union[str, CircuitWord]) -> CircuitWord:
    """Replace every macro by its defining word, recursively."""
    out: List[GateToken] = []
    for tok in as_word(word):
        out.extend(_expand_token(tok))
    return CircuitWord(out)


@lru_cache(maxsize=None)
def _expand_token(tok: GateToken) -> Tuple[GateToken, ...]:
    spec = ALPHABET[tok]
    if spec.is_base:
        return (tok,)
    out: List[GateToken] = []
    for sub in spec.expansion:
        out.extend(_expand_token(sub))
    return tuple(out)


def invert_word(word: Union[str, CircuitWord]) -> CircuitWord:
    """A word for the inverse operator: reversed order, per-token inverses."""
    out: List[GateToken] = []
    for tok in reversed(as_word(word).tokens):
        out.extend(ALPHABET[tok].inverse)
    return CircuitWord(out)


def mirror_token(tok: GateToken) -> GateToken:
    mirror = ALPHABET[tok].mirror
    if mirror is None:
        raise NoMirrorGate(f"{tok} has no qubit-reversed counterpart in the alphabet")
    return mirror


def reverse_qubits(word: Union[str, CircuitWord]) -> CircuitWord:
    """Relabel qubit q as 2 - q in every token."""
    return CircuitWord(mirror_token(t) for t in as_word(word))


def support(word: Union[str, CircuitWord]) -> frozenset:
    qubits = set()
    for tok in as_word(word):
        qubits.update(ALPHABET[tok].support)
    return frozenset(qubits)


# --- statistics ---------------------------------------------------------------

def gate_histogram(word: Union[str, CircuitWord], expanded: bool = True) -> Dict[str, int]:
    word = expand(word) if expanded else as_word(word)
    return dict(sorted(Counter(word.tokens).items()))


def cs_count(word: Union[str, CircuitWord]) -> int:
    """Number of CS01/CS12 generators after full expansion."""
    return sum(1 for t in expand(word) if t in ("CS01", "CS12"))


def k_count(word: Union[str, CircuitWord]) -> int:
    return sum(1 for t in expand(word) if t[0] == "K")


# --- matrices -----------------------------------------------------------------

def bits(x: int) -> Tuple[int, int, int]:
    """Basis index to (x0, x1, x2)."""
    return (x >> 2) & 1, (x >> 1) & 1, x & 1


def index_of(x0: int, x1: int, x2: int) -> int:
    return 4 * x0 + 2 * x1 + x2


def permutation_matrix(action: Callable[[Tuple[int, int, int]], Tuple[int, int, int]]) -> ExactMatrix:
    """The 8x8 matrix sending |x> to |action(x)>."""
    rows = [[ZERO] * DIM for _ in range(DIM)]
    for x in range(DIM):
        rows[index_of(*action(bits(x)))][x] = ONE
    return ExactMatrix(rows)


def phase_matrix(exponent: Callable[[Tuple[int, int, int]], int]) -> ExactMatrix:
    """diag(i**exponent(x))."""
    return ExactMatrix.diagonal([DyadicGaussian.i_power(exponent(bits(x))) for x in range(DIM)])


def _controlled_on_qubit0(block: ExactMatrix, control: Callable[[Tuple[int, int, int]], bool]) -> ExactMatrix:
    """Apply a 2x2 block to qubit 0 on the basis pairs where control holds."""
    rows = [list(r) for r in ExactMatrix.identity(DIM).entries]
    for low in range(4):
        x = (0, (low >> 1) & 1, low & 1)
        if not control(x):
            continue
        idx = (low, 4 + low)
        for a in range(2):
            for b in range(2):
                rows[idx[a]][idx[b]] = block.entries[a][b]
    return ExactMatrix(rows)


def _on_qubit(m2: ExactMatrix, q: int) -> ExactMatrix:
    eye = ExactMatrix.identity(2)
    factors = [m2 if k == q else eye for k in range(3)]
    return tensor(tensor(factors[0], factors[1]), factors[2])


def _flip(x: Tuple[int, int, int], q: int, when: bool = True) -> Tuple[int, int, int]:
    y = list(x)
    if when:
        y[q] ^= 1
    return tuple(y)


K_PRIME = ExactMatrix([[INV_ONE_PLUS_I, -I * INV_ONE_PLUS_I], [INV_ONE_PLUS_I, I * INV_ONE_PLUS_I]])


@lru_cache(maxsize=None)
def gate_matrix(tok: GateToken) -> ExactMatrix:
    """The 8x8 matrix of a single token."""
    if tok not in ALPHABET:
        raise ParseError(f"unknown token {tok!r}")
    if tok == "i":
        return ExactMatrix.identity(DIM).scale(I)
    name, index = _TOKEN_SHAPE.match(tok).group("name", "index")
    q = [int(c) for c in index]
    if name == "K":
        return _on_qubit(K_MATRIX, q[0])
    if name == "S":
        return _on_qubit(S_MATRIX, q[0])
    if name == "Sdg":
        return phase_matrix(lambda x: 3 * x[q[0]])
    if name == "CS":
        if tok == "CS01":
            return tensor(CS_MATRIX, ExactMatrix.identity(2))
        if tok == "CS12":
            return tensor(ExactMatrix.identity(2), CS_MATRIX)
        return phase_matrix(lambda x: x[0] * x[2])
    if name == "CSdg":
        return phase_matrix(lambda x: 3 * x[q[0]] * x[q[1]])
    if name == "X":
        return permutation_matrix(lambda x: _flip(x, q[0]))
    if name == "CX":
        return permutation_matrix(lambda x: _flip(x, q[1], x[q[0]] == 1))
    if name == "SWAP":
        a, b = q

        def swap(x):
            y = list(x)
            y[a], y[b] = y[b], y[a]
            return tuple(y)
        return permutation_matrix(swap)
    if tok == "CCZ":
        return phase_matrix(lambda x: 2 * x[0] * x[1] * x[2])
    if name == "CCX":
        t = q[0]
        others = [k for k in range(3) if k != t]
        return permutation_matrix(lambda x: _flip(x, t, x[others[0]] == 1 and x[others[1]] == 1))
    if tok == "CK10":
        return _controlled_on_qubit0(K_MATRIX, lambda x: x[1] == 1)
    if tok == "CK20":
        return _controlled_on_qubit0(K_MATRIX, lambda x: x[2] == 1)
    if tok == "CCK0":
        return _controlled_on_qubit0(K_PRIME, lambda x: x[1] == 1 and x[2] == 1)
    raise ParseError(f"no matrix for token {tok!r}")


def eval_word(word: Union[str, CircuitWord]) -> ExactMatrix:
    """Exact product of the token matrices in word order."""
    result = ExactMatrix.identity(DIM)
    for tok in as_word(word):
        result = result @ gate_matrix(tok)
    return result


def eval_expanded(word: Union[str, CircuitWord]) -> ExactMatrix:
    """Evaluate through base generators only."""
    return eval_word(expand(word))


def random_word(rng, length: int, alphabet: Sequence[str] = BASE_ALPHABET) -> CircuitWord:
    """Uniform word of the given length; ``rng`` is a numpy Generator."""
    picks = rng.integers(0, len(alphabet), size=length)
    return CircuitWord(alphabet[int(p)] for p in picks)
