"""
Membership predicates for the finite subgroups and for the whole group, and
the subgroup inclusion graph with its generator-level check.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from circuits.circuit import DIM, gate_matrix
from exact.linalg import ExactMatrix
from exact.ring import ONE
from subgroups.factor import FACTOR_GROUPS, NotMember, factor
from subgroups.tables import GROUP_GENERATORS, SubgroupTables, get_tables
from utils.logger import get_logger

logger = get_logger(__name__)

# K0D contains Q and K0CD contains CQ, hence the longer names in the graph
DISPLAY_NAMES = {"K0D": "K0QD", "K0CD": "K0CQD", "K0": "<K0>"}

INCLUSION_NODES = ("PD", "K0W", "K0CD", "P", "CQD", "K0D", "W", "CQ", "QD", "K0", "C", "Q", "D")

# (lower, upper)
INCLUSION_EDGES: Tuple[Tuple[str, str], ...] = (
    ("W", "P"),
    ("K0", "K0D"),
    ("K0", "K0W"),
    ("W", "K0W"),
    ("C", "CQ"),
    ("CQ", "P"),
    ("P", "PD"),
    ("D", "QD"),
    ("QD", "K0D"),
    ("K0D", "K0CD"),
    ("Q", "CQ"),
    ("CQ", "CQD"),
    ("CQD", "K0CD"),
    ("Q", "QD"),
    ("QD", "CQD"),
    ("CQD", "PD"),
)


def is_clifford_cs3(m: ExactMatrix) -> bool:
    """Unitary 8x8 over Z[1/2, i] with determinant 1 or -1."""
    if m.rows != DIM or m.cols != DIM:
        return False
    if not (m.entries_canonical() and m.is_unitary()):
        return False
    det = m.det()
    return det == ONE or det == -ONE


def is_member(group: str, m: ExactMatrix, tables: Optional[SubgroupTables] = None) -> bool:
    if group == "CS3":
        return is_clifford_cs3(m)
    tables = tables or get_tables()
    if group in ("K0W", "K0"):
        table = tables.k0w_table if group == "K0W" else tables.k0_table
        return m.rows == DIM and m.cols == DIM and table.contains_key(m.key())
    if group not in FACTOR_GROUPS:
        raise ValueError(f"no membership test for {group!r}")
    try:
        factor(group, m, tables)
    except NotMember:
        return False
    return True


@dataclass
class EdgeCheck:
    lower: str
    upper: str
    failures: List[str]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict:
        return {
            "edge": f"{DISPLAY_NAMES.get(self.lower, self.lower)} <= {DISPLAY_NAMES.get(self.upper, self.upper)}",
            "passed": self.passed,
            "failures": self.failures,
        }


def check_inclusions(tables: Optional[SubgroupTables] = None) -> List[EdgeCheck]:
    """Every generator of the lower group must pass the upper group's test."""
    tables = tables or get_tables()
    results = []
    for lower, upper in INCLUSION_EDGES:
        failures = [g for g in GROUP_GENERATORS[lower] if not is_member(upper, gate_matrix(g), tables)]
        if failures:
            logger.error(f"Inclusion {lower} <= {upper} fails for {failures}")
        results.append(EdgeCheck(lower, upper, failures))
    logger.info(f"Checked {len(results)} inclusion edges")
    return results
