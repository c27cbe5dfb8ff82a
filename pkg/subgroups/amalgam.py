"""
The three generator families X, Y, Z whose pairwise unions generate
K0CQD, K0W and PD, with the checks that tie them to the finite subgroups.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional

from circuits.circuit import gate_matrix
from circuits.relations import Relation
from subgroups.membership import is_member
from subgroups.tables import SubgroupTables, enumerate_generated, get_tables
from utils.logger import get_logger

logger = get_logger(__name__)

X_SET = ("K0", "i")
Y_SET = ("X0", "X1", "X2", "CX12", "CX21", "CX10", "CX20", "CCX0",
         "S0", "S1", "S2", "CS01", "CS12", "CS02", "CCZ", "i")
Z_SET = ("SWAP01", "SWAP12")

# factor group -> the generator union it is glued from, and the test used
AMALGAM_FACTORS: Dict[str, tuple] = {
    "K0CQD": (X_SET + Y_SET, "K0CD"),
    "K0W": (X_SET + Z_SET, "K0W"),
    "PD": (Y_SET + Z_SET, "PD"),
}


@dataclass
class AmalgamReport:
    failures: Dict[str, List[str]] = field(default_factory=dict)
    xz_order: int = 0
    k0w_order: int = 0
    xz_equals_k0w: bool = False

    @property
    def passed(self) -> bool:
        return not any(self.failures.values()) and self.xz_equals_k0w

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "failures": self.failures,
            "xz_order": self.xz_order,
            "k0w_order": self.k0w_order,
            "xz_equals_k0w": self.xz_equals_k0w,
        }


def generator_failures(tokens: Iterable[str], group: str, tables: SubgroupTables) -> List[str]:
    return [t for t in dict.fromkeys(tokens) if not is_member(group, gate_matrix(t), tables)]


def check_amalgam(tables: Optional[SubgroupTables] = None) -> AmalgamReport:
    """
    X and Y lie in K0CD, Y and Z lie in PD, and <X u Z> is the finite group
    K0W.
    """
    tables = tables or get_tables()
    report = AmalgamReport()
    for name, (tokens, test_group) in AMALGAM_FACTORS.items():
        report.failures[name] = generator_failures(tokens, test_group, tables)

    xz = enumerate_generated(tuple(dict.fromkeys(X_SET + Z_SET)), group="<X u Z>", monomial=False)
    k0w = tables.k0w_table
    report.xz_order, report.k0w_order = xz.order, k0w.order
    report.xz_equals_k0w = set(xz.words) == set(k0w.words)
    logger.info(f"<X u Z> has {xz.order} elements; K0W has {k0w.order}")
    return report


def relation_home(relation: Relation) -> List[str]:
    """Factor groups whose generator union covers every token of the relation."""
    tokens = set(relation.lhs) | set(relation.rhs)
    return [name for name, (gens, _) in AMALGAM_FACTORS.items() if tokens <= set(gens)]
