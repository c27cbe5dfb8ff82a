"""
Exact arithmetic in Z[1/2, i].

Every element is stored as ``(num_re + num_im*i) / (1+i)**denom_exp`` with
``denom_exp >= 0``. The canonical form has ``denom_exp == 0`` or an odd
``num_re + num_im`` (so ``1+i`` does not divide the numerator); canonical
fields are unique per value, which makes equality and hashing structural.
"""

from __future__ import annotations

from typing import Optional, Tuple, Union

IntLike = Union[int, "DyadicGaussian"]


def _times_one_plus_i_power(re: int, im: int, m: int) -> Tuple[int, int]:
    """Multiply ``re + im*i`` by ``(1+i)**m`` for m >= 0."""
    # (1+i)**2 == 2i
    half, odd = divmod(m, 2)
    if half:
        re, im = re << half, im << half
        # multiply by i**half
        for _ in range(half % 4):
            re, im = -im, re
    if odd:
        re, im = re - im, re + im
    return re, im


class DyadicGaussian:
    """An exact element of Z[1/2, i] in canonical (1+i)-adic form."""

    __slots__ = ("num_re", "num_im", "denom_exp")

    num_re: int
    num_im: int
    denom_exp: int

    def __init__(self, num_re: int = 0, num_im: int = 0, denom_exp: int = 0) -> None:
        if denom_exp < 0:
            num_re, num_im = _times_one_plus_i_power(num_re, num_im, -denom_exp)
            denom_exp = 0
        # strip common (1+i) factors: (a+bi)/(1+i) = ((a+b) + (b-a)i)/2
        while denom_exp > 0 and (num_re + num_im) % 2 == 0:
            num_re, num_im = (num_re + num_im) // 2, (num_im - num_re) // 2
            denom_exp -= 1
        if num_re == 0 and num_im == 0:
            denom_exp = 0
        self.num_re = num_re
        self.num_im = num_im
        self.denom_exp = denom_exp

    @classmethod
    def _raw(cls, num_re: int, num_im: int, denom_exp: int) -> DyadicGaussian:
        """Build from fields already known to be canonical."""
        obj = object.__new__(cls)
        obj.num_re = num_re
        obj.num_im = num_im
        obj.denom_exp = denom_exp
        return obj

    # --- constructors -----------------------------------------------------

    @classmethod
    def from_int(cls, value: int) -> DyadicGaussian:
        return cls._raw(value, 0, 0)

    @classmethod
    def from_gaussian(cls, re: int, im: int) -> DyadicGaussian:
        return cls._raw(re, im, 0)

    @classmethod
    def from_dyadic(cls, re: int, im: int, two_exp: int) -> DyadicGaussian:
        """Build ``(re + im*i) / 2**two_exp``."""
        # 2**e == (1+i)**(2e) * (-i)**e, so x/2**e == x * i**e / (1+i)**(2e)
        for _ in range(two_exp % 4):
            re, im = -im, re
        return cls(re, im, 2 * two_exp)

    @classmethod
    def i_power(cls, exponent: int) -> DyadicGaussian:
        """The unit ``i**exponent``."""
        return _I_POWERS[exponent % 4]

    @classmethod
    def from_json(cls, triple) -> DyadicGaussian:
        re, im, k = triple
        return cls(int(re), int(im), int(k))

    # --- ring structure ---------------------------------------------------

    def _coerce(self, other: IntLike) -> Optional[DyadicGaussian]:
        if isinstance(other, DyadicGaussian):
            return other
        if isinstance(other, int):
            return DyadicGaussian._raw(other, 0, 0)
        return None

    def __add__(self, other: IntLike) -> DyadicGaussian:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        k1, k2 = self.denom_exp, other.denom_exp
        if k1 == k2:
            return DyadicGaussian(self.num_re + other.num_re, self.num_im + other.num_im, k1)
        if k1 > k2:
            re, im = _times_one_plus_i_power(other.num_re, other.num_im, k1 - k2)
            # an odd-parity numerator plus an even one stays odd
            return DyadicGaussian._raw(self.num_re + re, self.num_im + im, k1)
        re, im = _times_one_plus_i_power(self.num_re, self.num_im, k2 - k1)
        return DyadicGaussian._raw(re + other.num_re, im + other.num_im, k2)

    __radd__ = __add__

    def __neg__(self) -> DyadicGaussian:
        return DyadicGaussian._raw(-self.num_re, -self.num_im, self.denom_exp)

    def __sub__(self, other: IntLike) -> DyadicGaussian:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: IntLike) -> DyadicGaussian:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: IntLike) -> DyadicGaussian:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self.num_re, self.num_im, other.num_re, other.num_im
        k = self.denom_exp + other.denom_exp
        if k == 0 or self.denom_exp == 0 or other.denom_exp == 0:
            return DyadicGaussian(a * c - b * d, a * d + b * c, k)
        # two numerators coprime to (1+i) have a product coprime to (1+i)
        return DyadicGaussian._raw(a * c - b * d, a * d + b * c, k)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> DyadicGaussian:
        if exponent < 0:
            raise ValueError("negative powers are only defined for units; use unit_inverse()")
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conj(self) -> DyadicGaussian:
        """Complex conjugate: conj(x/(1+i)^k) = conj(x) * i^k / (1+i)^k."""
        re, im = self.num_re, -self.num_im
        for _ in range(self.denom_exp % 4):
            re, im = -im, re
        return DyadicGaussian._raw(re, im, self.denom_exp)

    def norm_squared(self) -> DyadicGaussian:
        """``|a|**2 = a * conj(a)``; always real and non-negative."""
        return self * self.conj()

    def unit_power(self) -> Optional[int]:
        """Return e in 0..3 when the value equals i**e, else None."""
        if self.denom_exp != 0:
            return None
        return _UNIT_EXPONENTS.get((self.num_re, self.num_im))

    def unit_inverse(self) -> DyadicGaussian:
        """Inverse of a power of i."""
        e = self.unit_power()
        if e is None:
            raise ValueError(f"{self} is not a power of i")
        return DyadicGaussian.i_power(-e)

    # --- predicates and conversions ---------------------------------------

    def is_zero(self) -> bool:
        return self.num_re == 0 and self.num_im == 0

    def is_real(self) -> bool:
        return self.imag_numerator_over_two_power()[1] == 0

    def imag_numerator_over_two_power(self) -> Tuple[int, int, int]:
        """
        Rewrite as ``(re + im*i) / 2**e`` with integers and return (re, im, e).
        """
        k = self.denom_exp
        e = (k + 1) // 2
        # x/(1+i)^k = x*(1+i)^(2e-k) / (1+i)^(2e) = x*(1+i)^(2e-k) * (-i)^e / 2^e
        re, im = _times_one_plus_i_power(self.num_re, self.num_im, 2 * e - k)
        for _ in range(e % 4):
            re, im = im, -re
        return re, im, e

    def to_complex(self) -> complex:
        re, im, e = self.imag_numerator_over_two_power()
        return complex(re, im) / (2 ** e)

    def to_json(self):
        return [self.num_re, self.num_im, self.denom_exp]

    def canonical(self) -> DyadicGaussian:
        """Re-run canonicalization; idempotent on canonical values."""
        return DyadicGaussian(self.num_re, self.num_im, self.denom_exp)

    def fields(self) -> Tuple[int, int, int]:
        return self.num_re, self.num_im, self.denom_exp

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.denom_exp == 0 and self.num_im == 0 and self.num_re == other
        if isinstance(other, DyadicGaussian):
            return (self.num_re == other.num_re and self.num_im == other.num_im
                    and self.denom_exp == other.denom_exp)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num_re, self.num_im, self.denom_exp))

    def __repr__(self) -> str:
        return f"DyadicGaussian({self.num_re}, {self.num_im}, {self.denom_exp})"

    def __str__(self) -> str:
        numerator = f"{self.num_re}{self.num_im:+}i"
        if self.denom_exp == 0:
            return numerator
        return f"({numerator})/(1+i)^{self.denom_exp}"


ZERO = DyadicGaussian._raw(0, 0, 0)
ONE = DyadicGaussian._raw(1, 0, 0)
I = DyadicGaussian._raw(0, 1, 0)
INV_ONE_PLUS_I = DyadicGaussian._raw(1, 0, 1)
HALF = DyadicGaussian.from_dyadic(1, 0, 1)

_I_POWERS = (
    ONE,
    I,
    DyadicGaussian._raw(-1, 0, 0),
    DyadicGaussian._raw(0, -1, 0),
)
_UNIT_EXPONENTS = {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}


def add(a: DyadicGaussian, b: DyadicGaussian) -> DyadicGaussian:
    return a + b


def mul(a: DyadicGaussian, b: DyadicGaussian) -> DyadicGaussian:
    return a * b


def conj(a: DyadicGaussian) -> DyadicGaussian:
    return a.conj()
