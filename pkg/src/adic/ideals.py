"""The ideal a: membership in its powers, normal forms, adic order and metric.

Two kinds of ideal are supported.  A ``VariableIdeal`` is generated by a set
of variables (possibly all of them); membership in its powers is a degree
count.  A ``GeneralIdeal`` is generated by arbitrary polynomials over a field
and is handled with degree-capped Buchberger.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .coeffs import QQ, Field
from .polyring import (
    Monomial,
    Polynomial,
    mono_degree,
    mono_div,
    mono_divides,
    mono_key,
    mono_lcm,
    mono_mul,
    monomials_upto,
)


class DegreeCapError(ValueError):
    """A Gröbner computation would exceed the configured degree cap."""

    def __init__(self, message: str, achieved_degree: int):
        super().__init__(message)
        self.achieved_degree = achieved_degree


# ---------------------------------------------------------------- order values


@dataclass(frozen=True)
class OrderValue:
    """Finite(n), AtLeast(n) (true order is >= n) or Infinity."""

    kind: str
    n: int | None = None

    @classmethod
    def finite(cls, n: int) -> OrderValue:
        return cls("finite", n)

    @classmethod
    def at_least(cls, n: int) -> OrderValue:
        return cls("atleast", n)

    @classmethod
    def infinity(cls) -> OrderValue:
        return cls("inf")

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def floor(self) -> float:
        """A number the true order is known to be >= to."""
        return float("inf") if self.kind == "inf" else self.n

    def __str__(self):
        if self.kind == "finite":
            return str(self.n)
        if self.kind == "atleast":
            return f">={self.n}"
        return "inf"


Finite = OrderValue.finite
AtLeast = OrderValue.at_least
INFINITY = OrderValue.infinity()


def order_min(a: OrderValue, b: OrderValue) -> OrderValue:
    return a if a.floor <= b.floor else b


@dataclass(frozen=True)
class DyadicDistance:
    """0, exactly (1/2)^e, or at most (1/2)^e."""

    kind: str
    e: int | None = None

    @classmethod
    def from_order(cls, o: OrderValue) -> DyadicDistance:
        if o.kind == "inf":
            return cls("zero")
        if o.kind == "atleast":
            return cls("atmost", o.n)
        return cls("exact", o.n)

    @property
    def value(self) -> Fraction:
        """The exact value, or the upper bound for AtMost."""
        return Fraction(0) if self.kind == "zero" else Fraction(1, 2 ** self.e)

    def __str__(self):
        if self.kind == "zero":
            return "0"
        v = str(self.value)
        return f"<={v}" if self.kind == "atmost" else v


# ---------------------------------------------------------------- ideals


@dataclass(frozen=True)
class VariableIdeal:
    """The ideal generated by the variables in ``variables``; None means all of them."""

    variables: frozenset[int] | None

    def __post_init__(self):
        if self.variables is not None:
            if not self.variables:
                raise ValueError("a variable ideal needs at least one variable")
            if any(i < 1 for i in self.variables):
                raise ValueError("variable indices start at 1")

    @property
    def all_variables(self) -> bool:
        return self.variables is None

    def contains_var(self, i: int) -> bool:
        return self.variables is None or i in self.variables

    def mono_order(self, m: Monomial) -> int:
        """Degree of a monomial in the ideal's variables."""
        if self.variables is None:
            return mono_degree(m)
        return sum(e for i, e in m if i in self.variables)

    def describe(self) -> str:
        if self.variables is None:
            return "vars *"
        return "vars " + " ".join(f"t{i}" for i in sorted(self.variables))


ALL_VARIABLES = VariableIdeal(None)


def variable_ideal(*indices: int) -> VariableIdeal:
    return VariableIdeal(frozenset(indices))


@dataclass(frozen=True)
class GeneralIdeal:
    gens: tuple[Polynomial, ...]
    degree_cap: int = 12
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if not self.gens:
            raise ValueError("a general ideal needs generators")
        if any(g.is_zero() for g in self.gens):
            raise ValueError("generators must be nonzero")
        if self.degree_cap < 1:
            raise ValueError("degree cap must be >= 1")
        if len({g.field for g in self.gens}) != 1:
            raise ValueError("generators over different fields")

    @property
    def field(self) -> Field:
        return self.gens[0].field

    def power_generators(self, i: int) -> list[Polynomial]:
        if i == 0:
            return [Polynomial.constant(1, self.field)]
        out = []
        for combo in itertools.combinations_with_replacement(range(len(self.gens)), i):
            p = Polynomial.constant(1, self.field)
            for j in combo:
                p = p * self.gens[j]
            out.append(p)
        return out

    def power_basis(self, i: int) -> list[Polynomial]:
        """Reduced Gröbner basis of a^i (cached)."""
        basis = self._cache.get(i)
        if basis is None:
            basis = groebner_basis(self.power_generators(i), self.degree_cap)
            with self._lock:
                self._cache.setdefault(i, basis)
        return basis

    def describe(self) -> str:
        return "gens " + "; ".join(str(g) for g in self.gens)


AdicIdeal = VariableIdeal | GeneralIdeal


def parse_ideal(text: str, field: Field = QQ, degree_cap: int = 12) -> AdicIdeal:
    """``vars t1 t2``, ``vars *`` or ``gens <poly>; <poly>``."""
    from .parsing import parse_polynomial

    text = text.strip()
    kind, _, rest = text.partition(" ")
    rest = rest.strip()
    if kind == "vars":
        if rest == "*":
            return ALL_VARIABLES
        idx = []
        for tok in rest.split():
            if not (tok.startswith("t") and tok[1:].isdigit() and int(tok[1:]) >= 1):
                raise ValueError(f"bad variable {tok!r} in ideal spec")
            idx.append(int(tok[1:]))
        return VariableIdeal(frozenset(idx))
    if kind == "gens":
        gens = tuple(parse_polynomial(s, field) for s in rest.split(";") if s.strip())
        return GeneralIdeal(gens, degree_cap)
    raise ValueError(f"ideal spec must start with 'vars' or 'gens': {text!r}")


# ---------------------------------------------------------------- Gröbner engine


def _lead(p: Polynomial):
    return p.leading()


def reduce_full(f: Polynomial, basis: list[Polynomial]) -> Polynomial:
    """Fully reduced remainder of f modulo basis (graded-lex)."""
    leads = [(g, *_lead(g)) for g in basis]
    work = dict(f.terms)
    rem = {}
    while work:
        m = max(work, key=mono_key)
        c = work[m]
        for g, lm, lc in leads:
            if mono_divides(lm, m):
                q = mono_div(m, lm)
                factor = c / lc
                for gm, gc in g.terms.items():
                    mm = mono_mul(gm, q)
                    v = work.get(mm, 0) - factor * gc
                    if v == 0:
                        work.pop(mm, None)
                    else:
                        work[mm] = v
                break
        else:
            rem[m] = c
            del work[m]
    return Polynomial(rem, f.field)


def _spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    lf, cf = f.leading()
    lg, cg = g.leading()
    L = mono_lcm(lf, lg)
    return f.mul_monomial(mono_div(L, lf), 1 / cf) - g.mul_monomial(mono_div(L, lg), 1 / cg)


def groebner_basis(gens: list[Polynomial], degree_cap: int) -> list[Polynomial]:
    """Reduced Gröbner basis for graded-lex, via Buchberger.

    Raises DegreeCapError if an S-pair whose lcm exceeds ``degree_cap``
    would have to be processed before the basis stabilizes.
    """
    basis = [g for g in gens if not g.is_zero()]
    if not basis:
        return []
    for g in basis:
        if g.degree() > degree_cap:
            raise DegreeCapError(f"generator degree {g.degree()} exceeds cap {degree_cap}", 0)
    basis = [g.scale(1 / g.leading()[1]) for g in basis]
    pairs = [(i, j) for i in range(len(basis)) for j in range(i)]
    achieved = max(g.degree() for g in basis)

    def lcm_deg(pair):
        i, j = pair
        return mono_degree(mono_lcm(basis[i].leading()[0], basis[j].leading()[0]))

    while pairs:
        pairs.sort(key=lcm_deg)
        i, j = pairs.pop(0)
        li, lj = basis[i].leading()[0], basis[j].leading()[0]
        if not set(dict(li)) & set(dict(lj)):
            continue  # coprime leading monomials: S-polynomial reduces to 0
        d = lcm_deg((i, j))
        if d > degree_cap:
            raise DegreeCapError(
                f"Buchberger needs S-pairs of degree {d} > cap {degree_cap}", achieved
            )
        achieved = max(achieved, d)
        r = reduce_full(_spoly(basis[i], basis[j]), basis)
        if not r.is_zero():
            r = r.scale(1 / r.leading()[1])
            basis.append(r)
            n = len(basis) - 1
            pairs.extend((n, k) for k in range(n))
    return _interreduce(basis)


def _interreduce(basis: list[Polynomial]) -> list[Polynomial]:
    # drop elements whose leading monomial is divisible by another's
    basis = sorted(basis, key=lambda g: mono_key(g.leading()[0]))
    minimal: list[Polynomial] = []
    for g in basis:
        lg = g.leading()[0]
        if not any(mono_divides(h.leading()[0], lg) for h in minimal):
            minimal.append(g)
    out = []
    for k, g in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1:]
        r = reduce_full(g, others)
        out.append(r.scale(1 / r.leading()[1]))
    out.sort(key=lambda g: mono_key(g.leading()[0]), reverse=True)
    return out


def standard_monomials(basis: list[Polynomial], variables) -> list[Monomial] | None:
    """Monomials in ``variables`` not divisible by any leading monomial, or None
    if there are infinitely many."""
    leads = [g.leading()[0] for g in basis]
    vs = sorted(variables)
    bound = 0
    for v in vs:
        pure = [dict(lm)[v] for lm in leads if len(lm) == 1 and lm[0][0] == v]
        if not pure:
            return None
        bound += min(pure) - 1
    return [m for m in monomials_upto(vs, bound) if not any(mono_divides(lm, m) for lm in leads)]


# ---------------------------------------------------------------- operations


def _check_cap(f: Polynomial, a: GeneralIdeal):
    if f.degree() > a.degree_cap:
        raise DegreeCapError(f"degree {f.degree()} exceeds cap {a.degree_cap}", 0)


def power_membership(f: Polynomial, a: AdicIdeal, i: int) -> bool:
    """Is f in a^i?"""
    if i < 0:
        raise ValueError("power must be >= 0")
    if f.is_zero() or i == 0:
        return True
    if isinstance(a, VariableIdeal):
        return all(a.mono_order(m) >= i for m in f.terms)
    _check_cap(f, a)
    return reduce_full(f, a.power_basis(i)).is_zero()


def normal_form(f: Polynomial, a: AdicIdeal, i: int) -> Polynomial:
    """Canonical representative of f modulo a^(i+1)."""
    if i < 0:
        raise ValueError("level must be >= 0")
    if isinstance(a, VariableIdeal):
        return f.filter_terms(lambda m: a.mono_order(m) <= i)
    _check_cap(f, a)
    return reduce_full(f, a.power_basis(i + 1))


def ord_ring(f: Polynomial, a: AdicIdeal, cap: int = 8) -> OrderValue:
    """sup { i : f in a^i }, exact for variable ideals, capped for general ones."""
    if f.is_zero():
        return INFINITY
    if isinstance(a, VariableIdeal):
        return Finite(min(a.mono_order(m) for m in f.terms))
    for i in range(1, cap + 2):
        try:
            member = power_membership(f, a, i)
        except DegreeCapError:
            return AtLeast(i - 1)
        if not member:
            return Finite(i - 1)
    return AtLeast(cap + 1)


def dist_ring(f: Polynomial, g: Polynomial, a: AdicIdeal, cap: int = 8) -> DyadicDistance:
    return DyadicDistance.from_order(ord_ring(f - g, a, cap))
