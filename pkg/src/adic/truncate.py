"""Finitely presented modules and their truncations M_i = M / a^(i+1) M.

Everything at a fixed level is reduced to linear algebra over the base field:
restricted to the finitely many variables that occur, A_i is a finite
dimensional vector space with a monomial basis, and M_i is the quotient of
A_i^rank by the span of (basis monomial) * (relation).
"""

from __future__ import annotations

import threading
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from dataclasses import field as dc_field

from .coeffs import QQ, Field
from .ideals import (
    INFINITY,
    AdicIdeal,
    AtLeast,
    Finite,
    GeneralIdeal,
    OrderValue,
    VariableIdeal,
    normal_form,
    standard_monomials,
)
from .linalg import Echelon, SparseVec, axpy
from .polyring import Monomial, Polynomial, Vector, monomials_upto, vec_is_zero, vec_str


class UnsupportedError(ValueError):
    """The ideal/presentation combination is outside what the engine decides."""


class LevelMismatch(ValueError):
    pass


@dataclass(frozen=True)
class ModulePresentation:
    """A^rank modulo the submodule generated by ``relations``."""

    rank: int
    relations: tuple[Vector, ...]
    ideal: AdicIdeal
    field: Field = QQ
    _cache: dict = dc_field(default_factory=dict, compare=False, repr=False, hash=False)
    _lock: threading.Lock = dc_field(default_factory=threading.Lock, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be >= 0")
        rels = tuple(tuple(r) for r in self.relations)
        for r in rels:
            if len(r) != self.rank:
                raise ValueError(f"relation of length {len(r)} in a rank-{self.rank} presentation")
            for p in r:
                if p.field != self.field:
                    raise ValueError("relation coefficients over the wrong field")
        object.__setattr__(self, "relations", rels)
        if isinstance(self.ideal, GeneralIdeal) and self.ideal.field != self.field:
            raise ValueError("ideal and module over different fields")

    @classmethod
    def free(cls, rank: int, ideal: AdicIdeal, field: Field = QQ) -> ModulePresentation:
        return cls(rank, (), ideal, field)

    @property
    def is_free(self) -> bool:
        return not self.relations

    def relation_variables(self) -> frozenset[int]:
        return frozenset(i for r in self.relations for p in r for i in p.variables())

    def zero(self) -> Vector:
        return tuple(Polynomial.zero(self.field) for _ in range(self.rank))

    def unit(self, k: int) -> Vector:
        z = list(self.zero())
        z[k] = Polynomial.constant(1, self.field)
        return tuple(z)

    def quotient(self, level: int, extra_vars: Iterable[int] = ()) -> LevelQuotient:
        variables = frozenset(extra_vars) | self.relation_variables()
        if isinstance(self.ideal, GeneralIdeal):
            variables |= frozenset(i for g in self.ideal.gens for i in g.variables())
        key = (level, variables)
        q = self._cache.get(key)
        if q is None:
            q = LevelQuotient(self, level, variables)
            with self._lock:
                q = self._cache.setdefault(key, q)
        return q


@dataclass(frozen=True)
class TruncatedElement:
    """Class of ``coords`` in M_level; coordinates are kept in normal form."""

    level: int
    coords: Vector

    def __str__(self):
        return vec_str(self.coords)


class LevelQuotient:
    """Linear-algebra model of M_i restricted to a finite set of variables."""

    def __init__(self, module: ModulePresentation, level: int, variables: frozenset[int]):
        self.module = module
        self.level = level
        self.variables = variables
        ideal = module.ideal
        if isinstance(ideal, VariableIdeal):
            outside = {v for v in variables if not ideal.contains_var(v)}
            if outside:
                raise UnsupportedError(
                    "variables outside the ideal make A_i infinite dimensional: "
                    + ", ".join(f"t{v}" for v in sorted(outside))
                )
            self.ring_basis = monomials_upto(variables, level)
        else:
            if module.relations:
                raise UnsupportedError("general ideals are only supported on free modules")
            basis = standard_monomials(ideal.power_basis(level + 1), variables)
            if basis is None:
                raise UnsupportedError(f"A/a^{level + 1} is not finite dimensional")
            self.ring_basis = basis
        self.mono_index = {m: j for j, m in enumerate(self.ring_basis)}
        nb = len(self.ring_basis)
        self.ambient_dim = module.rank * nb
        self.relation_span = Echelon()
        for r in module.relations:
            for mu in self.ring_basis:
                self.relation_span.add(self.to_sparse(tuple(p.mul_monomial(mu) for p in r)))

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.relation_span.rank

    def nf(self, p: Polynomial) -> Polynomial:
        return normal_form(p, self.module.ideal, self.level)

    def to_sparse(self, coords: Sequence[Polynomial]) -> SparseVec:
        nb = len(self.ring_basis)
        out: SparseVec = {}
        for k, p in enumerate(coords):
            for m, c in self.nf(p).terms.items():
                j = self.mono_index.get(m)
                if j is None:
                    raise UnsupportedError(f"monomial outside the truncation basis in {p}")
                out[k * nb + j] = c
        return out

    def from_sparse(self, vec: SparseVec) -> Vector:
        nb = len(self.ring_basis)
        f = self.module.field
        coords = [dict() for _ in range(self.module.rank)]
        for idx, c in vec.items():
            k, j = divmod(idx, nb)
            coords[k][self.ring_basis[j]] = c
        return tuple(Polynomial(d, f) for d in coords)

    def residue(self, coords: Sequence[Polynomial]) -> SparseVec:
        """Canonical representative of the class, as a sparse vector."""
        return self.relation_span.reduce(self.to_sparse(coords))[0]

    def is_zero(self, coords: Sequence[Polynomial]) -> bool:
        return not self.residue(coords)

    def basis_elements(self) -> list[Vector]:
        """Monomial vectors mu*e_k spanning the ambient space."""
        out = []
        for k in range(self.module.rank):
            for mu in self.ring_basis:
                out.append(tuple(
                    Polynomial.monomial(mu, 1, self.module.field) if kk == k
                    else Polynomial.zero(self.module.field)
                    for kk in range(self.module.rank)
                ))
        return out


def _vars(vectors: Iterable[Sequence[Polynomial]]) -> frozenset[int]:
    return frozenset(i for v in vectors for p in v for i in p.variables())


def truncate(v: Sequence[Polynomial], M: ModulePresentation, level: int) -> TruncatedElement:
    if len(v) != M.rank:
        raise ValueError(f"vector of length {len(v)} for a rank-{M.rank} module")
    return TruncatedElement(level, tuple(normal_form(p, M.ideal, level) for p in v))


def is_zero_at(v: Sequence[Polynomial], M: ModulePresentation, level: int) -> bool:
    """Does v vanish in M_level?"""
    coords = tuple(normal_form(p, M.ideal, level) for p in v)
    if vec_is_zero(coords):
        return True
    if M.is_free:
        return False
    return M.quotient(level, _vars([coords])).is_zero(coords)


def module_zero_test(v: TruncatedElement, M: ModulePresentation) -> bool:
    return is_zero_at(v.coords, M, v.level)


def _check_levels(target: TruncatedElement, gens: Sequence[TruncatedElement]) -> int:
    lv = target.level
    for g in gens:
        if g.level != lv:
            raise LevelMismatch(f"generator at level {g.level}, target at level {lv}")
    return lv


def _columns(q: LevelQuotient, gens, allowed: Sequence[Monomial]):
    f = q.module.field
    cols = []
    for k, g in enumerate(gens):
        for mu in allowed:
            cols.append(((k, mu), q.residue(tuple(p.mul_monomial(mu) for p in g))))
    return cols


def _assemble(combo: SparseVec, n: int, field: Field) -> Vector:
    coeffs = [dict() for _ in range(n)]
    for (k, mu), c in combo.items():
        coeffs[k][mu] = c
    return tuple(Polynomial(d, field) for d in coeffs)


def solve_at(
    target: Sequence[Polynomial],
    gens: Sequence[Sequence[Polynomial]],
    M: ModulePresentation,
    level: int,
    monomials: Sequence[Monomial] | None = None,
    with_kernel: bool = False,
):
    """Find c with sum c_k * gens_k = target in M_level.

    ``monomials`` restricts the coefficients' support (default: all of A_level).
    Returns the coefficient vector, or None; with ``with_kernel`` returns
    ``(solution_or_None, kernel_basis)``.
    """
    q = M.quotient(level, _vars([target, *gens]))
    allowed = q.ring_basis if monomials is None else monomials
    ech = Echelon(track=True)
    kernel = []
    for tag, col in _columns(q, gens, allowed):
        rel = ech.add(col, tag)
        if rel is not None and with_kernel:
            kernel.append(_assemble(rel, len(gens), M.field))
    combo = ech.solve(q.residue(target))
    sol = None if combo is None else _assemble(combo, len(gens), M.field)
    return (sol, kernel) if with_kernel else sol


def module_solve(
    target: TruncatedElement, gens: Sequence[TruncatedElement], M: ModulePresentation
) -> Vector | None:
    """Coefficients c (normal forms) with sum c_k gens_k = target in M_i, or None."""
    level = _check_levels(target, gens)
    return solve_at(target.coords, [g.coords for g in gens], M, level)


def solution_space(
    target: TruncatedElement, gens: Sequence[TruncatedElement], M: ModulePresentation
) -> tuple[Vector | None, list[Vector]]:
    """A particular solution (or None) and a basis of the solutions of the
    homogeneous system, as field-linear data."""
    level = _check_levels(target, gens)
    return solve_at(target.coords, [g.coords for g in gens], M, level, with_kernel=True)


_SYNTACTIC_LIMIT = 20000


def _syntactically_zero(v: Sequence[Polynomial], M: ModulePresentation, cap: int) -> bool:
    """Certify v = 0 in M by writing it as a polynomial combination of relations
    with multipliers of degree <= max(deg v, cap)."""
    if vec_is_zero(v):
        return True
    if M.is_free:
        return False
    variables = sorted(_vars([v]) | M.relation_variables())
    bound = max(max(p.degree() for p in v), cap)
    index: dict = {}

    def sparse(vec):
        out = {}
        for k, p in enumerate(vec):
            for m, c in p.terms.items():
                out[index.setdefault((k, m), len(index))] = c
        return out

    multipliers = monomials_upto(variables, bound)
    if len(multipliers) * len(M.relations) > _SYNTACTIC_LIMIT:
        return False
    ech = Echelon()
    for r in M.relations:
        for mu in multipliers:
            ech.add(sparse(tuple(p.mul_monomial(mu) for p in r)))
    return ech.contains(sparse(v))


def ord_module(v: Sequence[Polynomial], M: ModulePresentation, cap: int = 8) -> OrderValue:
    """Adic order of v in M: the largest i with v in a^i M, examined up to cap."""
    v = tuple(v)
    if len(v) != M.rank:
        raise ValueError(f"vector of length {len(v)} for a rank-{M.rank} module")
    if vec_is_zero(v):
        return INFINITY
    for i in range(cap + 1):
        if not is_zero_at(v, M, i):
            return Finite(i)
    if _syntactically_zero(v, M, cap):
        return INFINITY
    return AtLeast(cap + 1)
