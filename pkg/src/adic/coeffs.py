"""Exact coefficient fields: the rationals and prime fields."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class DomainError(ValueError):
    """Operands live over different coefficient fields."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Mod:
    """Residue class r mod p with 0 <= r < p."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise DomainError(f"cannot mix F_{self.p} and F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        return NotImplemented if v is NotImplemented else Mod(self.value + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        return NotImplemented if v is NotImplemented else Mod(self.value - v, self.p)

    def __rsub__(self, other):
        v = self._coerce(other)
        return NotImplemented if v is NotImplemented else Mod(v - self.value, self.p)

    def __mul__(self, other):
        v = self._coerce(other)
        return NotImplemented if v is NotImplemented else Mod(self.value * v, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Mod(-self.value, self.p)

    def inverse(self) -> Mod:
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.p}")
        return Mod(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return self * Mod(v, self.p).inverse()

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Mod(v, self.p) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, Mod):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"Mod({self.value}, {self.p})"

    def __str__(self):
        return str(self.value)


class Field:
    """A coefficient field tag: ``Field()`` is Q, ``Field(p)`` is F_p."""

    __slots__ = ("p",)

    def __init__(self, p: int | None = None):
        if p is not None and not _is_prime(p):
            raise DomainError(f"{p} is not prime")
        self.p = p

    def __call__(self, x) -> Fraction | Mod:
        """Coerce an int, Fraction or element of this field."""
        if self.p is None:
            if isinstance(x, Mod):
                raise DomainError("cannot coerce a prime-field element into Q")
            if isinstance(x, (int, Rational)):
                return Fraction(x)
            raise TypeError(f"cannot coerce {x!r} into Q")
        if isinstance(x, Mod):
            if x.p != self.p:
                raise DomainError(f"cannot coerce F_{x.p} element into F_{self.p}")
            return x
        if isinstance(x, int):
            return Mod(x, self.p)
        if isinstance(x, Rational):
            x = Fraction(x)
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator {x.denominator} vanishes in F_{self.p}")
            return Mod(x.numerator * pow(x.denominator, -1, self.p), self.p)
        raise TypeError(f"cannot coerce {x!r} into F_{self.p}")

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def elements(self, limit: int | None = None):
        """Small elements, for sampling: all of F_p, or a fixed list of rationals."""
        if self.p is not None:
            return [Mod(v, self.p) for v in range(self.p)]
        vals = [Fraction(0), Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2),
                Fraction(-3), Fraction(3, 2)]
        return vals if limit is None else vals[:limit]

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"

    def describe(self) -> str:
        return "Q" if self.p is None else f"Fp {self.p}"


QQ = Field()


def GF(p: int) -> Field:
    return Field(p)


def format_coeff(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)
