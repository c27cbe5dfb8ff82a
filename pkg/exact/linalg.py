"""
Exact matrices over Z[1/2, i].

Entries are DyadicGaussian values stored densely, row-major. Products skip
zero entries, which keeps the 8x8 monomial and block-diagonal operators that
dominate this toolkit cheap to multiply.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

from exact.ring import DyadicGaussian, ONE, ZERO, I, INV_ONE_PLUS_I, _times_one_plus_i_power
from utils.errors import Cs3Error


class DimensionMismatch(Cs3Error):
    """Operands have incompatible shapes"""


class LevelIndexError(Cs3Error):
    """Level-matrix indices out of range or not ordered"""


Entry = DyadicGaussian


class ExactMatrix:
    """An immutable rows x cols matrix of DyadicGaussian entries."""

    __slots__ = ("rows", "cols", "entries", "_key")

    def __init__(self, entries: Sequence[Sequence[Entry]]):
        self.entries: Tuple[Tuple[Entry, ...], ...] = tuple(tuple(row) for row in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise DimensionMismatch("ragged rows")
        self._key = None

    # --- constructors -----------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> ExactMatrix:
        return cls([[ONE if r == c else ZERO for c in range(n)] for r in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: Optional[int] = None) -> ExactMatrix:
        cols = rows if cols is None else cols
        return cls([[ZERO] * cols for _ in range(rows)])

    @classmethod
    def diagonal(cls, values: Sequence[Entry]) -> ExactMatrix:
        n = len(values)
        return cls([[values[r] if r == c else ZERO for c in range(n)] for r in range(n)])

    @classmethod
    def from_ints(cls, rows: Iterable[Iterable[int]], denom_exp: int = 0) -> ExactMatrix:
        """Integer entries divided by a shared (1+i)**denom_exp."""
        return cls([[DyadicGaussian(v, 0, denom_exp) for v in row] for row in rows])

    @classmethod
    def from_json(cls, data) -> ExactMatrix:
        return cls([[DyadicGaussian.from_json(t) for t in row] for row in data])

    # --- structure ----------------------------------------------------------

    def __getitem__(self, index: Tuple[int, int]) -> Entry:
        r, c = index
        return self.entries[r][c]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def key(self) -> tuple:
        """Hashable canonical key; equal matrices have equal keys."""
        if self._key is None:
            self._key = tuple(e.fields() for row in self.entries for e in row)
        return self._key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.key())

    def nonzero_columns(self, r: int) -> List[int]:
        return [c for c, e in enumerate(self.entries[r]) if not e.is_zero()]

    # --- arithmetic ---------------------------------------------------------

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        return matmul(self, other)

    def scale(self, s: Entry) -> ExactMatrix:
        return ExactMatrix([[s * e for e in row] for row in self.entries])

    def adjoint(self) -> ExactMatrix:
        return ExactMatrix([[self.entries[r][c].conj() for r in range(self.rows)]
                            for c in range(self.cols)])

    def transpose(self) -> ExactMatrix:
        return ExactMatrix([[self.entries[r][c] for r in range(self.rows)]
                            for c in range(self.cols)])

    def is_unitary(self) -> bool:
        return self.is_square and matmul(self, self.adjoint()) == ExactMatrix.identity(self.rows)

    def det(self) -> Entry:
        return det_exact(self)

    def is_diagonal(self) -> bool:
        return all(e.is_zero() for r, row in enumerate(self.entries)
                   for c, e in enumerate(row) if r != c)

    def is_monomial(self) -> bool:
        """Exactly one nonzero entry in every row and every column."""
        if not self.is_square:
            return False
        seen = set()
        for r in range(self.rows):
            nz = self.nonzero_columns(r)
            if len(nz) != 1 or nz[0] in seen:
                return False
            seen.add(nz[0])
        return True

    def is_permutation(self) -> bool:
        return self.is_monomial() and all(e.is_zero() or e == ONE for row in self.entries for e in row)

    def entries_canonical(self) -> bool:
        return all(e.canonical() == e for row in self.entries for e in row)

    def first_difference(self, other: ExactMatrix) -> Optional[Tuple[int, int, Entry, Entry]]:
        """Row-major first (row, col, mine, theirs) where the matrices differ."""
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch(f"{self.rows}x{self.cols} vs {other.rows}x{other.cols}")
        for r in range(self.rows):
            for c in range(self.cols):
                a, b = self.entries[r][c], other.entries[r][c]
                if a != b:
                    return r, c, a, b
        return None

    # --- output -------------------------------------------------------------

    def to_json(self):
        return [[e.to_json() for e in row] for row in self.entries]

    def pretty(self) -> str:
        cells = [[str(e) for e in row] for row in self.entries]
        width = max((len(s) for row in cells for s in row), default=1)
        return "\n".join("[ " + "  ".join(s.rjust(width) for s in row) + " ]" for row in cells)

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols})"


def matmul(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Exact product a @ b."""
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    b_rows = [[(c, e) for c, e in enumerate(row) if not e.is_zero()] for row in b.entries]
    out: List[List[Entry]] = []
    for row in a.entries:
        acc: List[Entry] = [ZERO] * b.cols
        for k, x in enumerate(row):
            if x.is_zero():
                continue
            for c, y in b_rows[k]:
                acc[c] = acc[c] + x * y
        out.append(acc)
    return ExactMatrix(out)


def tensor(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Kronecker product; a indexes the most significant block."""
    out = []
    for ra in a.entries:
        for rb in b.entries:
            out.append([x * y for x in ra for y in rb])
    return ExactMatrix(out)


def adjoint_and_unitarity(a: ExactMatrix) -> Tuple[ExactMatrix, bool]:
    if not a.is_square:
        raise DimensionMismatch("unitarity needs a square matrix")
    adj = a.adjoint()
    return adj, matmul(a, adj) == ExactMatrix.identity(a.rows)


def _gaussian_exact_div(a: Tuple[int, int], b: Tuple[int, int]) -> Tuple[int, int]:
    """a / b in Z[i], where b is known to divide a."""
    (ar, ai), (br, bi) = a, b
    norm = br * br + bi * bi
    re, im = ar * br + ai * bi, ai * br - ar * bi
    if re % norm or im % norm:
        raise ArithmeticError("inexact Gaussian division in Bareiss elimination")
    return re // norm, im // norm


def _gmul(a: Tuple[int, int], b: Tuple[int, int]) -> Tuple[int, int]:
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def det_exact(a: ExactMatrix) -> Entry:
    """
    Determinant by fraction-free Bareiss elimination over Z[i].

    Every entry is first scaled by a common (1+i)**K so that the working
    matrix is integral; the result is divided back by (1+i)**(K*n).
    """
    if not a.is_square:
        raise DimensionMismatch("determinant needs a square matrix")
    n = a.rows
    if n == 0:
        return ONE
    big_k = max(e.denom_exp for row in a.entries for e in row)
    m = [[_times_one_plus_i_power(e.num_re, e.num_im, big_k - e.denom_exp) for e in row]
         for row in a.entries]

    sign = 1
    prev = (1, 0)
    for k in range(n - 1):
        if m[k][k] == (0, 0):
            swap = next((r for r in range(k + 1, n) if m[r][k] != (0, 0)), None)
            if swap is None:
                return ZERO
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                num = _gmul(m[r][c], pivot)
                sub = _gmul(m[r][k], m[k][c])
                m[r][c] = _gaussian_exact_div((num[0] - sub[0], num[1] - sub[1]), prev)
            m[r][k] = (0, 0)
        prev = pivot
    re, im = m[n - 1][n - 1]
    return DyadicGaussian(sign * re, sign * im, big_k * n)


# 2x2 building blocks
K_MATRIX = ExactMatrix([[INV_ONE_PLUS_I, INV_ONE_PLUS_I], [INV_ONE_PLUS_I, -INV_ONE_PLUS_I]])
S_MATRIX = ExactMatrix.diagonal([ONE, I])
X_MATRIX = ExactMatrix([[ZERO, ONE], [ONE, ZERO]])
CS_MATRIX = ExactMatrix.diagonal([ONE, ONE, ONE, I])


def level_matrices(kind: str, j: int, k: Optional[int] = None, n: int = 2) -> ExactMatrix:
    """
    One- and two-level generators of U_n(Z[1/2, i]).

    ``i`` places i at (j, j); ``X`` and ``K`` embed the 2x2 X or K block on
    rows and columns j < k of the n x n identity.
    """
    if kind == "i":
        if k is not None:
            raise LevelIndexError("i_[j] takes a single index")
        if not 0 <= j < n:
            raise LevelIndexError(f"index {j} out of range for n={n}")
        return ExactMatrix.diagonal([I if r == j else ONE for r in range(n)])

    if kind not in ("X", "K"):
        raise LevelIndexError(f"unknown level-matrix kind {kind!r}")
    if k is None or not (0 <= j < k < n):
        raise LevelIndexError(f"{kind}_[{j},{k}] needs 0 <= j < k < {n}")
    block = X_MATRIX if kind == "X" else K_MATRIX
    rows = [list(r) for r in ExactMatrix.identity(n).entries]
    idx = (j, k)
    for a in range(2):
        for b in range(2):
            rows[idx[a]][idx[b]] = block.entries[a][b]
    return ExactMatrix(rows)
