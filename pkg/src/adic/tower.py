"""Elements of the completion as lazily evaluated coherent towers.

A ``TowerElement`` wraps a level oracle ``i -> representative of M_i``.  Levels
are memoized and every newly evaluated level is checked for coherence against
the levels already seen.
"""

from __future__ import annotations

import threading
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from .coeffs import QQ, Field
from .ideals import (
    AtLeast,
    DyadicDistance,
    Finite,
    GeneralIdeal,
    OrderValue,
    VariableIdeal,
    normal_form,
    order_min,
)
from .linalg import Echelon
from .polyring import Polynomial, Vector, mono_degree, vec_add, vec_is_zero, vec_scale, vec_str, vec_sub
from .truncate import (
    ModulePresentation,
    TruncatedElement,
    UnsupportedError,
    is_zero_at,
    ord_module,
)


class CoherenceError(ValueError):
    def __init__(self, lower: int, upper: int, detail: str = ""):
        self.levels = (lower, upper)
        msg = f"tower is not coherent between levels {lower} and {upper}"
        super().__init__(msg + (f": {detail}" if detail else ""))


class ModuleMismatch(ValueError):
    pass


class NoWitnessStrategy(ValueError):
    pass


def _as_vector(value, M: ModulePresentation) -> Vector:
    if isinstance(value, TruncatedElement):
        value = value.coords
    if isinstance(value, Polynomial):
        value = (value,)
    value = tuple(value)
    if len(value) != M.rank:
        raise ValueError(f"level value of length {len(value)} for a rank-{M.rank} module")
    return value


class TowerElement:
    """An element of the completion of ``module``, given level by level."""

    def __init__(
        self,
        module: ModulePresentation,
        oracle: Callable[[int], object],
        source: Vector | None = None,
        label: str | None = None,
    ):
        self.module = module
        self._oracle = oracle
        self._memo: dict[int, Vector] = {}
        self._lock = threading.Lock()
        self.source = source
        self.label = label

    def _evaluate(self, i: int) -> Vector:
        raw = _as_vector(self._oracle(i), self.module)
        return tuple(normal_form(p, self.module.ideal, i) for p in raw)

    def project(self, i: int) -> TruncatedElement:
        """Image in M_i, after checking coherence with all evaluated levels."""
        if i < 0:
            raise ValueError("level must be >= 0")
        rep = self._memo.get(i)
        if rep is None:
            rep = self._evaluate(i)
            for j, other in sorted(self._memo.items()):
                lo, hi = min(i, j), max(i, j)
                if not is_zero_at(vec_sub(rep, other), self.module, lo):
                    raise CoherenceError(lo, hi, f"{vec_str(rep)} vs {vec_str(other)}")
            with self._lock:
                rep = self._memo.setdefault(i, rep)
        return TruncatedElement(i, rep)

    def level(self, i: int) -> Vector:
        return self.project(i).coords

    def evaluated_levels(self) -> list[int]:
        return sorted(self._memo)

    def __add__(self, other):
        return tower_add(self, other)

    def __sub__(self, other):
        return tower_add(self, tower_neg(other))

    def __neg__(self):
        return tower_neg(self)

    def __rmul__(self, c):
        return tower_scale(c, self)

    def __repr__(self):
        return f"TowerElement({self.label or '<oracle>'})"


def ring_module(ideal, field: Field = QQ) -> ModulePresentation:
    """The ring A itself as a free module of rank 1."""
    if isinstance(ideal, GeneralIdeal):
        field = ideal.field
    return ModulePresentation.free(1, ideal, field)


def tower_from_element(m, M: ModulePresentation) -> TowerElement:
    """tau_M(m): the tower of truncations of an element of M."""
    v = _as_vector(m, M)
    return TowerElement(M, lambda i: v, source=v, label=vec_str(v))


def tower_zero(M: ModulePresentation) -> TowerElement:
    return tower_from_element(M.zero(), M)


def tower_project(x: TowerElement, i: int) -> TruncatedElement:
    return x.project(i)


def _same_module(x: TowerElement, y: TowerElement):
    if x.module != y.module:
        raise ModuleMismatch("towers live in different modules")


def tower_add(x: TowerElement, y: TowerElement) -> TowerElement:
    _same_module(x, y)
    src = vec_add(x.source, y.source) if x.source is not None and y.source is not None else None
    return TowerElement(x.module, lambda i: vec_add(x.level(i), y.level(i)), src)


def tower_neg(x: TowerElement) -> TowerElement:
    src = tuple(-p for p in x.source) if x.source is not None else None
    return TowerElement(x.module, lambda i: tuple(-p for p in x.level(i)), src)


def tower_sub(x: TowerElement, y: TowerElement) -> TowerElement:
    return tower_add(x, tower_neg(y))


def tower_scale(c, x: TowerElement) -> TowerElement:
    """Multiply by a ring element: a Polynomial or a rank-1 ring tower."""
    if isinstance(c, TowerElement):
        if c.module.rank != 1 or not c.module.is_free or c.module.ideal != x.module.ideal:
            raise ModuleMismatch("scalar tower must live in the completed ring")
        src = vec_scale(c.source[0], x.source) if c.source is not None and x.source is not None else None
        return TowerElement(x.module, lambda i: vec_scale(c.level(i)[0], x.level(i)), src)
    if not isinstance(c, Polynomial):
        c = Polynomial.constant(c, x.module.field)
    src = vec_scale(c, x.source) if x.source is not None else None
    return TowerElement(x.module, lambda i: vec_scale(c, x.level(i)), src)


# ---------------------------------------------------------------- order functions


def ord_prime(x: TowerElement, cap: int = 8) -> OrderValue:
    """Order for the filtration F^i = Ker(pi_{i-1}): least i with pi_i(x) != 0."""
    for i in range(cap + 1):
        if not is_zero_at(x.level(i), x.module, i):
            return Finite(i)
    return AtLeast(cap + 1)


def dist_prime(x: TowerElement, y: TowerElement, cap: int = 8) -> DyadicDistance:
    return DyadicDistance.from_order(ord_prime(tower_sub(x, y), cap))


def _finitely_many_variables(M: ModulePresentation) -> bool:
    return isinstance(M.ideal, GeneralIdeal) or not M.ideal.all_variables


def kill_witnesses(x: TowerElement, n_max: int, cap: int) -> dict[int, tuple[int, Vector] | None]:
    """For each n <= n_max, a level l <= cap where killing t1..tn leaves a nonzero
    representative (refuting x = sum_{k<=n} t_k b_k), or None."""
    out: dict[int, tuple[int, Vector] | None] = {}
    for n in range(1, n_max + 1):
        kill = range(1, n + 1)
        found = None
        for lv in range(cap + 1):
            rest = tuple(p.substitute_zero(kill) for p in x.level(lv))
            if not vec_is_zero(rest):
                found = (lv, rest)
                break
        out[n] = found
    return out


def ord_adic_bounds(
    x: TowerElement, cap: int = 8, witnesses: str = "kill", n_max: int | None = None
) -> tuple[OrderValue, OrderValue]:
    """Bounds (lower, upper) on the a-adic order of x inside the completion.

    With finitely many variables the a-adic filtration of the completion agrees
    with F^i, so both bounds equal ord'.  In the infinite-variable free case
    the substitution-kill strategy certifies order 0 when every decomposition
    x = sum_{k<=n} t_k b_k, n <= n_max (default cap - 1), is refuted.
    """
    M = x.module
    op = ord_prime(x, cap)
    if _finitely_many_variables(M):
        return op, op
    if witnesses != "kill":
        raise NoWitnessStrategy(f"unknown witness strategy {witnesses!r}")
    if not M.is_free:
        raise NoWitnessStrategy("substitution-kill needs a free module")
    upper = op
    if op.kind == "finite" and op.n == 0:
        upper = Finite(0)
    else:
        n_max = cap - 1 if n_max is None else n_max
        w = kill_witnesses(x, n_max, cap)
        if n_max >= 1 and all(v is not None for v in w.values()):
            upper = Finite(0)
    if x.source is not None:
        lower = order_min(ord_module(x.source, M, cap), op)
    else:
        lower = AtLeast(0)
    if upper.kind == "finite" and lower.floor >= upper.n:
        lower = upper
    return lower, upper


def dist_adic_bounds(x: TowerElement, y: TowerElement, cap: int = 8) -> tuple[DyadicDistance, DyadicDistance]:
    """(smallest, largest) possible a-adic distance between x and y."""
    lower, upper = ord_adic_bounds(tower_sub(x, y), cap)
    return DyadicDistance.from_order(upper), DyadicDistance.from_order(lower)


# ---------------------------------------------------------------- Theorem 6 checker


@dataclass
class Theorem6Report:
    level: int
    surjective_tau: bool
    kernel_equals_power: bool
    injective_tau: bool
    witness: Vector | None = None

    @property
    def passed(self) -> bool:
        return self.surjective_tau and self.kernel_equals_power

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        s = (f"{status} level {self.level}: tau surjective={self.surjective_tau} "
             f"ker(pi)=a^{self.level + 1}N={self.kernel_equals_power} tau injective={self.injective_tau}")
        if self.witness is not None:
            s += f" witness {vec_str(self.witness)}"
        return s


def theorem6_check(M: ModulePresentation, i: int, depth: int = 2) -> Theorem6Report:
    """Check surjectivity of M_i -> A_i (x) M^ and Ker(pi_i) = a^(i+1) M^ at level i.

    The completion is modelled by its truncation M_L with L = i + depth; the
    checks are exact linear algebra on that model.
    """
    ideal = M.ideal
    if not isinstance(ideal, VariableIdeal) or ideal.all_variables:
        raise UnsupportedError(
            "theorem6_check needs a variable ideal on finitely many variables; "
            "infinite-variable cases are refuted by witnesses in the gallery"
        )
    if depth < 1:
        raise ValueError("depth must be >= 1")
    L = i + depth
    variables = ideal.variables | M.relation_variables()
    qL = M.quotient(L, variables)
    qi = M.quotient(i, variables)
    ambient = qL.basis_elements()

    def deg(v: Vector) -> int:
        return max(mono_degree(m) for p in v for m in p.terms)

    # a^(i+1) M_L inside M_L
    power = Echelon()
    for b in ambient:
        if deg(b) >= i + 1:
            power.add(qL.residue(b))

    # Ker(M_L -> M_i), pulled back to the ambient space via kernel relations
    kernel_ok = True
    witness = None
    proj = Echelon(track=True)
    for idx, b in enumerate(ambient):
        rel = proj.add(qi.residue(b), idx)
        if rel is None:
            continue
        elem = M.zero()
        for j, c in rel.items():
            elem = vec_add(elem, tuple(p.scale(c) for p in ambient[j]))
        if not power.contains(qL.residue(elem)):
            kernel_ok = False
            witness = elem
            break
    # conversely a^(i+1) M_L dies at level i
    for b in ambient:
        if deg(b) >= i + 1 and not qi.is_zero(b):
            kernel_ok = False
            witness = witness or b

    # tau_{M,i}: M_i -> M_L / a^(i+1) M_L
    span = Echelon()
    for v in power.rows.values():
        span.add(v)
    base_rank = span.rank
    for b in ambient:
        if deg(b) <= i:
            span.add(qL.residue(b))
    surjective = True
    for b in ambient:
        if not span.contains(qL.residue(b)):
            surjective = False
            witness = witness or b
            break
    injective = span.rank - base_rank == qi.dim
    return Theorem6Report(i, surjective, kernel_ok, injective, witness)
