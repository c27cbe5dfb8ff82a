"""
Normal-form tuples for the finite subgroups and the words they stand for.

Each tuple type knows how to spell itself as a circuit word (``word()``)
and how to serialize itself. P-based forms need the coset table to spell
their coset representative, so their ``word()`` takes the tables object.
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, Optional, Tuple

from circuits.circuit import CircuitWord, parse_word

# --- Q -------------------------------------------------------------------------


@dataclass(frozen=True)
class QNormal:
    """X0^a CX10^b CX20^c CCX0^d"""

    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0

    def word(self, tables=None) -> CircuitWord:
        parts = ["X0"] * self.a + ["CX10"] * self.b + ["CX20"] * self.c + ["CCX0"] * self.d
        return CircuitWord(parts)

    def target_bit(self, x1: int, x2: int) -> int:
        """The bit added to x0 at control values (x1, x2)."""
        return (self.a ^ (self.b & x1) ^ (self.c & x2) ^ (self.d & x1 & x2))

    @classmethod
    def from_function(cls, g) -> "QNormal":
        """F2 Moebius decode of g(x1, x2) = a + b x1 + c x2 + d x1 x2."""
        g00, g10, g01, g11 = g(0, 0), g(1, 0), g(0, 1), g(1, 1)
        return cls(g00, g10 ^ g00, g01 ^ g00, g00 ^ g10 ^ g01 ^ g11)

    def to_dict(self) -> Dict:
        return asdict(self)


# --- C -------------------------------------------------------------------------

C4_CHOICES = ("", "X1", "X2", "X1 X2")
C3_CHOICES = ("", "CX21", "CX12 CX21")
C2_CHOICES = ("", "CX12")


@dataclass(frozen=True)
class CNormal:
    """c4 c3 c2, each field an index into its choice list."""

    c4: int = 0
    c3: int = 0
    c2: int = 0

    def word(self, tables=None) -> CircuitWord:
        return parse_word(" ".join([C4_CHOICES[self.c4], C3_CHOICES[self.c3], C2_CHOICES[self.c2]]))

    def to_dict(self) -> Dict:
        return {"c4": C4_CHOICES[self.c4] or "ε", "c3": C3_CHOICES[self.c3] or "ε",
                "c2": C2_CHOICES[self.c2] or "ε"}

    @classmethod
    def all(cls):
        return [cls(c4, c3, c2) for c4 in range(4) for c3 in range(3) for c2 in range(2)]


@dataclass(frozen=True)
class CQNormal:
    c: CNormal = field(default_factory=CNormal)
    q: QNormal = field(default_factory=QNormal)

    def word(self, tables=None) -> CircuitWord:
        return self.c.word() + self.q.word()

    def to_dict(self) -> Dict:
        return {"c": self.c.to_dict(), "q": self.q.to_dict()}


# --- D -------------------------------------------------------------------------

D_GENERATORS = ("i", "S0", "S1", "S2", "CS01", "CS12", "CS02", "CCZ")


@dataclass(frozen=True)
class DNormal:
    """i^n0 S0^n1 S1^n2 S2^n3 CS01^n4 CS12^n5 CS02^n6 CCZ^n7"""

    n: Tuple[int, ...] = (0,) * 8

    def __post_init__(self):
        if len(self.n) != 8 or not all(0 <= v < 4 for v in self.n[:7]) or self.n[7] not in (0, 1):
            raise ValueError(f"DNormal exponents out of range: {self.n}")

    @classmethod
    def of(cls, **exponents: int) -> "DNormal":
        """DNormal.of(n1=1, n7=1)"""
        n = [0] * 8
        for name, value in exponents.items():
            n[int(name[1:])] = value
        return cls(tuple(n))

    def phase(self, x0: int, x1: int, x2: int) -> int:
        n = self.n
        return (n[0] + n[1] * x0 + n[2] * x1 + n[3] * x2 + n[4] * x0 * x1 + n[5] * x1 * x2
                + n[6] * x0 * x2 + 2 * n[7] * x0 * x1 * x2) % 4

    def word(self, tables=None) -> CircuitWord:
        tokens = []
        for gen, power in zip(D_GENERATORS, self.n):
            tokens.extend([gen] * power)
        return CircuitWord(tokens)

    def to_dict(self) -> Dict:
        return {f"n{k}": v for k, v in enumerate(self.n) if v}

    @property
    def is_trivial(self) -> bool:
        return not any(self.n)


# --- P, PD, QD, CQD --------------------------------------------------------------


@dataclass(frozen=True)
class PNormal:
    """V[v_index] c q"""

    v_index: int
    c: CNormal = field(default_factory=CNormal)
    q: QNormal = field(default_factory=QNormal)

    def word(self, tables) -> CircuitWord:
        return tables.coset_word(self.v_index) + self.c.word() + self.q.word()

    def to_dict(self) -> Dict:
        return {"v": self.v_index, "c": self.c.to_dict(), "q": self.q.to_dict()}


@dataclass(frozen=True)
class PDNormal:
    p: PNormal
    d: DNormal = field(default_factory=DNormal)

    def word(self, tables) -> CircuitWord:
        return self.p.word(tables) + self.d.word()

    def to_dict(self) -> Dict:
        return {"p": self.p.to_dict(), "d": self.d.to_dict()}


@dataclass(frozen=True)
class QDNormal:
    q: QNormal = field(default_factory=QNormal)
    d: DNormal = field(default_factory=DNormal)

    def word(self, tables=None) -> CircuitWord:
        return self.q.word() + self.d.word()

    def to_dict(self) -> Dict:
        return {"q": self.q.to_dict(), "d": self.d.to_dict()}


@dataclass(frozen=True)
class CQDNormal:
    cq: CQNormal = field(default_factory=CQNormal)
    d: DNormal = field(default_factory=DNormal)

    def word(self, tables=None) -> CircuitWord:
        return self.cq.word() + self.d.word()

    def to_dict(self) -> Dict:
        return {"cq": self.cq.to_dict(), "d": self.d.to_dict()}


# --- K0D, K0CD -----------------------------------------------------------------

E1_CHOICES = ("", "CCK0", "CCK0 CCK0")
E2_CHOICES = ("", "CK10", "S0 CK10")
E3_CHOICES = ("", "CK20", "S0 CK20")
E4_CHOICES = ("", "K0", "S0 K0")


@dataclass(frozen=True)
class EBlock:
    """e4 e3 e2 e1 as choice indices."""

    e4: int = 0
    e3: int = 0
    e2: int = 0
    e1: int = 0

    def word(self, tables=None) -> CircuitWord:
        return parse_word(" ".join([E4_CHOICES[self.e4], E3_CHOICES[self.e3],
                                    E2_CHOICES[self.e2], E1_CHOICES[self.e1]]))

    @property
    def is_trivial(self) -> bool:
        return not (self.e4 or self.e3 or self.e2 or self.e1)

    def to_dict(self) -> Dict:
        return {"e4": E4_CHOICES[self.e4] or "ε", "e3": E3_CHOICES[self.e3] or "ε",
                "e2": E2_CHOICES[self.e2] or "ε", "e1": E1_CHOICES[self.e1] or "ε"}

    @classmethod
    def all(cls):
        return [cls(e4, e3, e2, e1) for e4 in range(3) for e3 in range(3)
                for e2 in range(3) for e1 in range(3)]


@dataclass(frozen=True)
class K0DNormal:
    """e4 e3 e2 e1 D Q"""

    e: EBlock = field(default_factory=EBlock)
    d: DNormal = field(default_factory=DNormal)
    q: QNormal = field(default_factory=QNormal)

    def word(self, tables=None) -> CircuitWord:
        return self.e.word() + self.d.word() + self.q.word()

    def to_dict(self) -> Dict:
        return {"e": self.e.to_dict(), "d": self.d.to_dict(), "q": self.q.to_dict()}


@dataclass(frozen=True)
class K0CDNormal:
    """(e4 e3 e2 e1 D Q) C"""

    k: K0DNormal = field(default_factory=K0DNormal)
    c: CNormal = field(default_factory=CNormal)

    def word(self, tables=None) -> CircuitWord:
        return self.k.word() + self.c.word()

    def to_dict(self) -> Dict:
        return {"k": self.k.to_dict(), "c": self.c.to_dict()}


@dataclass(frozen=True)
class WNormal:
    """Index into the enumerated W table and its shortest word."""

    index: int
    spelled: str = ""

    def word(self, tables=None) -> CircuitWord:
        return parse_word(self.spelled)

    def to_dict(self) -> Dict:
        return {"index": self.index, "word": self.spelled or "ε"}


def word_of(t, tables=None) -> CircuitWord:
    """The literal word a normal-form tuple stands for."""
    return t.word(tables)
