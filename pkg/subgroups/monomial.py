"""
Monomial operators: a basis permutation with an i-power phase per source
basis state. M|x> = i**phase[x] |perm[x]>, i.e. M[perm[x]][x] = i**phase[x].

Products of these are tuple lookups, which makes enumerating the finite
permutation and diagonal subgroups much cheaper than multiplying matrices.
"""

from functools import lru_cache
from typing import Iterable, Optional, Sequence, Tuple

from circuits.circuit import DIM, CircuitWord, as_word, gate_matrix
from exact.linalg import ExactMatrix
from exact.ring import DyadicGaussian, ZERO
from utils.errors import Cs3Error


class NotMonomial(Cs3Error):
    """Matrix does not have exactly one nonzero entry per row and column"""


class NotPowerOfI(Cs3Error):
    """A nonzero entry is not a power of i"""


class MonomialOperator:
    __slots__ = ("perm", "phase")

    def __init__(self, perm: Sequence[int], phase: Optional[Sequence[int]] = None):
        self.perm: Tuple[int, ...] = tuple(perm)
        self.phase: Tuple[int, ...] = tuple(p % 4 for p in phase) if phase is not None else (0,) * len(self.perm)

    @classmethod
    def identity(cls, n: int = DIM) -> "MonomialOperator":
        return cls(range(n))

    @classmethod
    def diagonal(cls, exponents: Sequence[int]) -> "MonomialOperator":
        return cls(range(len(exponents)), exponents)

    @classmethod
    def from_matrix(cls, m: ExactMatrix) -> "MonomialOperator":
        if not m.is_monomial():
            raise NotMonomial("matrix is not monomial")
        perm = [0] * m.cols
        phase = [0] * m.cols
        for r in range(m.rows):
            for c in m.nonzero_columns(r):
                e = m.entries[r][c].unit_power()
                if e is None:
                    raise NotPowerOfI(f"entry ({r},{c}) = {m.entries[r][c]} is not a power of i")
                perm[c], phase[c] = r, e
        return cls(perm, phase)

    def to_matrix(self) -> ExactMatrix:
        n = len(self.perm)
        rows = [[ZERO] * n for _ in range(n)]
        for x, (y, e) in enumerate(zip(self.perm, self.phase)):
            rows[y][x] = DyadicGaussian.i_power(e)
        return ExactMatrix(rows)

    def __matmul__(self, other: "MonomialOperator") -> "MonomialOperator":
        """Matrix product self * other (other acts first)."""
        p1, f1 = self.perm, self.phase
        perm = tuple(p1[y] for y in other.perm)
        phase = tuple((f2 + f1[y]) % 4 for y, f2 in zip(other.perm, other.phase))
        return MonomialOperator(perm, phase)

    def inverse(self) -> "MonomialOperator":
        n = len(self.perm)
        perm, phase = [0] * n, [0] * n
        for x, (y, e) in enumerate(zip(self.perm, self.phase)):
            perm[y], phase[y] = x, -e
        return MonomialOperator(perm, phase)

    def target_phases(self) -> Tuple[int, ...]:
        """Phase attached to each target state: M = diag(target_phases) * P."""
        out = [0] * len(self.perm)
        for y, e in zip(self.perm, self.phase):
            out[y] = e
        return tuple(out)

    def permutation_part(self) -> "MonomialOperator":
        return MonomialOperator(self.perm)

    @property
    def is_permutation(self) -> bool:
        return not any(self.phase)

    @property
    def is_diagonal(self) -> bool:
        return self.perm == tuple(range(len(self.perm)))

    def key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return self.perm, self.phase

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MonomialOperator):
            return NotImplemented
        return self.perm == other.perm and self.phase == other.phase

    def __hash__(self) -> int:
        return hash((self.perm, self.phase))

    def __repr__(self) -> str:
        return f"MonomialOperator(perm={self.perm}, phase={self.phase})"


@lru_cache(maxsize=None)
def token_monomial(tok: str) -> MonomialOperator:
    return MonomialOperator.from_matrix(gate_matrix(tok))


def word_monomial(word) -> MonomialOperator:
    """Monomial operator of a word whose tokens are all monomial gates."""
    result = MonomialOperator.identity()
    for tok in as_word(word):
        result = result @ token_monomial(tok)
    return result


def product(ops: Iterable[MonomialOperator]) -> MonomialOperator:
    result = MonomialOperator.identity()
    for op in ops:
        result = result @ op
    return result
