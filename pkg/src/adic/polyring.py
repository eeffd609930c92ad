"""Sparse multivariate polynomials over Q or F_p in variables t1, t2, ...

A monomial is a tuple of ``(index, exponent)`` pairs with strictly ascending
indices and positive exponents; ``()`` is the monomial 1.  Terms are ordered
graded-lexicographically: total degree first, then the exponent of the
lowest-indexed variable is the most significant.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from fractions import Fraction
from functools import lru_cache

from .coeffs import QQ, DomainError, Field, Mod, format_coeff

Monomial = tuple[tuple[int, int], ...]

ONE: Monomial = ()


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for i, e in b:
        out[i] = out.get(i, 0) + e
    return tuple(sorted(out.items()))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True if a divides b."""
    eb = dict(b)
    return all(eb.get(i, 0) >= e for i, e in a)


def mono_div(b: Monomial, a: Monomial) -> Monomial:
    """b / a, assuming a divides b."""
    out = dict(b)
    for i, e in a:
        r = out[i] - e
        if r:
            out[i] = r
        else:
            del out[i]
    return tuple(sorted(out.items()))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    out = dict(a)
    for i, e in b:
        out[i] = max(out.get(i, 0), e)
    return tuple(sorted(out.items()))


def mono_pow(m: Monomial, n: int) -> Monomial:
    return tuple((i, e * n) for i, e in m) if n else ONE


@lru_cache(maxsize=None)
def mono_key(m: Monomial):
    """Sort key realising the graded-lex order (larger key = larger monomial)."""
    return (mono_degree(m), tuple((-i, e) for i, e in m))


def mono_str(m: Monomial) -> str:
    return "*".join(f"t{i}" if e == 1 else f"t{i}^{e}" for i, e in m)


def monomials_upto(variables: Iterable[int], degree: int) -> list[Monomial]:
    """All monomials in the given variables of total degree <= degree."""
    vs = sorted(set(variables))
    out: list[Monomial] = []

    def rec(pos: int, left: int, acc: list[tuple[int, int]]):
        if pos == len(vs):
            out.append(tuple(acc))
            return
        for e in range(left + 1):
            if e:
                acc.append((vs[pos], e))
            rec(pos + 1, left - e, acc)
            if e:
                acc.pop()

    rec(0, degree, [])
    out.sort(key=mono_key)
    return out


def monomials_of_degree(variables: Iterable[int], degree: int) -> list[Monomial]:
    return [m for m in monomials_upto(variables, degree) if mono_degree(m) == degree]


class Polynomial:
    """Immutable polynomial; ``terms`` maps Monomial -> nonzero coefficient."""

    __slots__ = ("_terms", "field", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None, field: Field = QQ):
        self.field = field
        clean = {}
        if terms:
            for m, c in terms.items():
                c = field(c)
                if c != 0:
                    clean[m] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, field: Field) -> Polynomial:
        p = object.__new__(cls)
        p._terms = terms
        p.field = field
        p._hash = None
        return p

    @classmethod
    def constant(cls, c, field: Field = QQ) -> Polynomial:
        return cls({ONE: c}, field)

    @classmethod
    def var(cls, index: int, field: Field = QQ) -> Polynomial:
        if index < 1:
            raise ValueError(f"variable indices start at 1, got {index}")
        return cls._raw({((index, 1),): field.one}, field)

    @classmethod
    def monomial(cls, m: Monomial, c=1, field: Field = QQ) -> Polynomial:
        return cls({m: c}, field)

    @classmethod
    def zero(cls, field: Field = QQ) -> Polynomial:
        return cls._raw({}, field)

    @property
    def terms(self) -> Mapping[Monomial, object]:
        return self._terms

    def sorted_terms(self) -> list[tuple[Monomial, object]]:
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda kv: mono_key(kv[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(m == ONE for m in self._terms)

    def constant_term(self):
        return self._terms.get(ONE, self.field.zero)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((mono_degree(m) for m in self._terms), default=-1)

    def variables(self) -> frozenset[int]:
        return frozenset(i for m in self._terms for i, _ in m)

    def leading(self) -> tuple[Monomial, object]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self._terms, key=mono_key)
        return m, self._terms[m]

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.field != self.field:
                raise DomainError(f"cannot combine polynomials over {self.field!r} and {other.field!r}")
            return other
        if isinstance(other, (int, Fraction, Mod)):
            return Polynomial.constant(other, self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v == 0:
                    del out[m]
                else:
                    out[m] = v
        return Polynomial._raw(out, self.field)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()}, self.field)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = mono_mul(m1, m2)
                v = out.get(m)
                out[m] = c1 * c2 if v is None else v + c1 * c2
        return Polynomial._raw({m: c for m, c in out.items() if c != 0}, self.field)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a natural number")
        result = Polynomial.constant(1, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> Polynomial:
        c = self.field(c)
        if c == 0:
            return Polynomial.zero(self.field)
        return Polynomial._raw({m: v * c for m, v in self._terms.items()}, self.field)

    def mul_monomial(self, mono: Monomial, c=1) -> Polynomial:
        c = self.field(c)
        if c == 0:
            return Polynomial.zero(self.field)
        return Polynomial._raw({mono_mul(m, mono): v * c for m, v in self._terms.items()}, self.field)

    def filter_terms(self, keep) -> Polynomial:
        """Polynomial made of the terms whose monomial satisfies ``keep``."""
        return Polynomial._raw({m: c for m, c in self._terms.items() if keep(m)}, self.field)

    def substitute_zero(self, kill: Iterable[int]) -> Polynomial:
        """Set the variables in ``kill`` to zero."""
        kill = frozenset(kill)
        return self.filter_terms(lambda m: not any(i in kill for i, _ in m))

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field == other.field and self._terms == other._terms
        if isinstance(other, (int, Fraction, Mod)):
            try:
                return self == Polynomial.constant(other, self.field)
            except (TypeError, DomainError):
                return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({str(self)!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts: list[str] = []
        for k, (m, c) in enumerate(self.sorted_terms()):
            negative = isinstance(c, Fraction) and c < 0
            mag = -c if negative else c
            if m == ONE:
                body = format_coeff(mag)
            elif mag == 1:
                body = mono_str(m)
            else:
                body = f"{format_coeff(mag)}*{mono_str(m)}"
            if k == 0:
                parts.append(f"-{body}" if negative else body)
            else:
                parts.append(f" - {body}" if negative else f" + {body}")
        return "".join(parts)


def t(index: int, field: Field = QQ) -> Polynomial:
    """The variable t_index."""
    return Polynomial.var(index, field)


def const(c, field: Field = QQ) -> Polynomial:
    return Polynomial.constant(c, field)


def poly_parse(text: str, field: Field = QQ) -> Polynomial:
    from .parsing import parse_polynomial

    return parse_polynomial(text, field)


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def poly_neg(p: Polynomial) -> Polynomial:
    return -p


def substitute_zero(p: Polynomial, kill: Iterable[int]) -> Polynomial:
    return p.substitute_zero(kill)


Vector = tuple[Polynomial, ...]


def vec_add(u: Vector, v: Vector) -> Vector:
    if len(u) != len(v):
        raise ValueError("vector length mismatch")
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Vector, v: Vector) -> Vector:
    if len(u) != len(v):
        raise ValueError("vector length mismatch")
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c: Polynomial, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def vec_is_zero(v: Vector) -> bool:
    return all(a.is_zero() for a in v)


def vec_str(v: Vector) -> str:
    return str(v[0]) if len(v) == 1 else "(" + ", ".join(str(a) for a in v) + ")"
