"""
Factoring exact 8x8 matrices into the normal forms of the finite subgroups.

Diagonal and permutation parts decode in closed form; K0D searches its 81
prefix candidates and K0CD reads its C suffix off the column supports.
"""

from typing import List, Optional, Sequence, Tuple, Union

from circuits.circuit import DIM
from exact.linalg import ExactMatrix
from subgroups.monomial import MonomialOperator, NotMonomial, NotPowerOfI
from subgroups.normal_forms import (CNormal, CQDNormal, CQNormal, DNormal, K0CDNormal,
                                    K0DNormal, PDNormal, PNormal, QDNormal, QNormal,
                                    WNormal)
from subgroups.tables import SubgroupTables, fiber_partition, get_tables
from utils.errors import Cs3Error
from utils.logger import get_logger

logger = get_logger(__name__)


class NotDiagonal(Cs3Error):
    """Matrix has a nonzero off-diagonal entry"""


class NotInD(Cs3Error):
    """Diagonal phase function has an odd cubic coefficient"""


class NotPermutation(Cs3Error):
    """Matrix is not a 0/1 permutation matrix"""


class NotInPD(Cs3Error):
    """Monomial matrix whose phase part lies outside D"""


class NotMember(Cs3Error):
    def __init__(self, group: str, reason: str = ""):
        self.group = group
        super().__init__(f"not a member of {group}" + (f": {reason}" if reason else ""))


class NormalFormCollision(Cs3Error):
    """More than one normal-form tuple evaluates to the same matrix"""


FACTOR_GROUPS = ("Q", "C", "CQ", "D", "W", "P", "QD", "PD", "CQD", "K0D", "K0CD")

NormalForm = Union[QNormal, CNormal, CQNormal, DNormal, WNormal, PNormal, QDNormal,
                   PDNormal, CQDNormal, K0DNormal, K0CDNormal]


def _check_shape(m: ExactMatrix) -> None:
    if m.rows != DIM or m.cols != DIM:
        raise NotMember("CS(3)", f"expected an 8x8 matrix, got {m.rows}x{m.cols}")


# --- diagonal part ----------------------------------------------------------------

def decode_phase_function(f: Sequence[int]) -> DNormal:
    """
    Moebius decode of the exponent function f over basis indices 4x0+2x1+x2.
    The cubic coefficient must be even.
    """
    f000, f001, f010, f011, f100, f101, f110, f111 = (v % 4 for v in f)
    n = [
        f000,
        f100 - f000,
        f010 - f000,
        f001 - f000,
        f110 - f100 - f010 + f000,
        f011 - f010 - f001 + f000,
        f101 - f100 - f001 + f000,
    ]
    t = (f111 - f110 - f101 - f011 + f100 + f010 + f001 - f000) % 4
    if t % 2:
        raise NotInD(f"cubic coefficient {t} is odd (determinant ±i)")
    return DNormal(tuple(v % 4 for v in n) + (t // 2,))


def decode_diagonal(m: ExactMatrix) -> DNormal:
    _check_shape(m)
    if not m.is_diagonal():
        raise NotDiagonal("matrix has off-diagonal entries")
    exponents = []
    for x in range(DIM):
        e = m[x, x].unit_power()
        if e is None:
            raise NotPowerOfI(f"diagonal entry {x} = {m[x, x]} is not a power of i")
        exponents.append(e)
    return decode_phase_function(exponents)


# --- permutation part -------------------------------------------------------------

def decode_cq(op: MonomialOperator, tables: SubgroupTables) -> Optional[CQNormal]:
    """
    CQ elements act as (x0, x1, x2) -> (x0 + g(x1, x2), sigma(x1, x2)).
    Returns None for a permutation outside CQ.
    """
    perm = op.perm
    sigma, g = [], []
    for low in range(4):
        y0, y1 = perm[low], perm[4 + low]
        if (y0 & 3) != (y1 & 3) or (y0 >> 2) == (y1 >> 2):
            return None
        sigma.append(y0 & 3)
        g.append(y0 >> 2)
    c = tables.c_by_sigma.get(tuple(sigma))
    if c is None:
        return None
    # low index = 2*x1 + x2
    q = QNormal.from_function(lambda x1, x2: g[2 * x1 + x2])
    return CQNormal(c, q)


def _permutation_operator(m: ExactMatrix) -> MonomialOperator:
    _check_shape(m)
    if not m.is_permutation():
        raise NotPermutation("matrix is not a 0/1 permutation matrix")
    return MonomialOperator.from_matrix(m)


def decode_permutation_operator(op: MonomialOperator, tables: SubgroupTables) -> PNormal:
    v = tables.coset_index[fiber_partition(op)]
    cq = decode_cq(tables.coset_ops[v].inverse() @ op, tables)
    if cq is None:
        raise Cs3Error(f"coset representative {v} does not reduce the permutation into CQ")
    return PNormal(v, cq.c, cq.q)


def decode_permutation(m: ExactMatrix, tables: Optional[SubgroupTables] = None) -> PNormal:
    tables = tables or get_tables()
    return decode_permutation_operator(_permutation_operator(m), tables)


def monomial_split(m: ExactMatrix) -> Tuple[ExactMatrix, DNormal]:
    """M = P * D with the phases attached to source columns."""
    _check_shape(m)
    op = MonomialOperator.from_matrix(m)
    try:
        d = decode_phase_function(op.phase)
    except NotInD as exc:
        raise NotInPD(str(exc)) from exc
    return op.permutation_part().to_matrix(), d


def split_operator(op: MonomialOperator) -> Tuple[MonomialOperator, DNormal]:
    try:
        return op.permutation_part(), decode_phase_function(op.phase)
    except NotInD as exc:
        raise NotInPD(str(exc)) from exc


# --- K0D / K0CD ---------------------------------------------------------------------

def _dq_of(n: ExactMatrix, tables: SubgroupTables) -> Optional[Tuple[DNormal, QNormal]]:
    """Decode N = D*Q, or None when N is not of that shape."""
    try:
        op = MonomialOperator.from_matrix(n)
    except (NotMonomial, NotPowerOfI):
        return None
    cq = decode_cq(op.permutation_part(), tables)
    if cq is None or cq.c != CNormal():
        return None
    try:
        d = decode_phase_function(op.target_phases())
    except NotInD:
        return None
    return d, cq.q


def factor_k0d(m: ExactMatrix, tables: SubgroupTables) -> K0DNormal:
    _check_shape(m)
    matches: List[K0DNormal] = []
    # every candidate is tried so that a second decomposition is caught
    for e, _, e_adj in tables.e_candidates:
        dq = _dq_of(e_adj @ m, tables)
        if dq is not None:
            matches.append(K0DNormal(e, dq[0], dq[1]))
    if not matches:
        raise NotMember("K0D")
    if len(matches) > 1:
        raise NormalFormCollision(f"K0D: {len(matches)} decompositions, e.g. {matches[0]} and {matches[1]}")
    return matches[0]


def column_fiber_sigma(m: ExactMatrix) -> Optional[Tuple[int, ...]]:
    """
    The (x1, x2) permutation an element of K0CD induces: column x is supported
    on a single fiber, shared by x and x xor 4.
    """
    sigma = []
    for low in range(4):
        fibers = set()
        for col in (low, 4 + low):
            fibers.update(r & 3 for r in range(DIM) if not m[r, col].is_zero())
        if len(fibers) != 1:
            return None
        sigma.append(fibers.pop())
    if len(set(sigma)) != 4:
        return None
    return tuple(sigma)


def factor_k0cd(m: ExactMatrix, tables: SubgroupTables) -> K0CDNormal:
    _check_shape(m)
    sigma = column_fiber_sigma(m)
    if sigma is None or sigma not in tables.c_by_sigma:
        raise NotMember("K0CD", "columns do not respect the (x1, x2) fibers")
    c = tables.c_by_sigma[sigma]
    rest = m @ tables.c_ops[c].inverse().to_matrix()
    try:
        k = factor_k0d(rest, tables)
    except NotMember as exc:
        raise NotMember("K0CD") from exc
    return K0CDNormal(k, c)


# --- dispatch -------------------------------------------------------------------------

def _factor_monomial(group: str, m: ExactMatrix, tables: SubgroupTables) -> NormalForm:
    op = MonomialOperator.from_matrix(m)
    if group == "D":
        if not op.is_diagonal:
            raise NotDiagonal("matrix has off-diagonal entries")
        return decode_phase_function(op.phase)
    if group == "W":
        key = op.key()
        words = tables.w_table.words
        if key not in words:
            raise NotMember("W")
        index = list(words).index(key)
        return WNormal(index, " ".join(words[key]))

    perm, d = split_operator(op)
    if group in ("Q", "C", "CQ", "P") and not d.is_trivial:
        raise NotPermutation("matrix carries phases")
    if group == "P":
        return decode_permutation_operator(perm, tables)
    if group == "PD":
        return PDNormal(decode_permutation_operator(perm, tables), d)

    cq = decode_cq(perm, tables)
    if cq is None:
        raise NotMember(group)
    if group == "CQ":
        return cq
    if group == "CQD":
        return CQDNormal(cq, d)
    if group == "Q":
        if cq.c != CNormal():
            raise NotMember(group)
        return cq.q
    if group == "QD":
        if cq.c != CNormal():
            raise NotMember(group)
        return QDNormal(cq.q, d)
    if group == "C":
        if cq.q != QNormal():
            raise NotMember(group)
        return cq.c
    raise ValueError(f"unknown group {group!r}")


def factor(group: str, m: ExactMatrix, tables: Optional[SubgroupTables] = None) -> NormalForm:
    """
    Decompose m into the normal form of ``group``.

    Raises NotMember when m lies outside the group and NormalFormCollision
    if a K0D search finds two decompositions.
    """
    if group not in FACTOR_GROUPS:
        raise ValueError(f"cannot factor in {group!r}; choose from {FACTOR_GROUPS}")
    tables = tables or get_tables()
    _check_shape(m)
    if group == "K0D":
        return factor_k0d(m, tables)
    if group == "K0CD":
        return factor_k0cd(m, tables)
    try:
        return _factor_monomial(group, m, tables)
    except (NotMonomial, NotPowerOfI, NotDiagonal, NotPermutation, NotInD, NotInPD) as exc:
        raise NotMember(group, str(exc)) from exc
