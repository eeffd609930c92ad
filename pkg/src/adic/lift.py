"""Constructive lifting: complete Nakayama, order-preserving lifts along
surjections, basis lifting for m-adic systems, and free covers.

All lifts are built level by level.  Going from level i to i+1 only a
correction with coefficients in the homogeneous piece a^(i+1)/a^(i+2) is
solved for, so the coefficient towers are coherent by construction.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .decay import DecayStream, hom_apply
from .ideals import VariableIdeal, normal_form
from .linalg import Echelon
from .polyring import Polynomial, Vector, mono_degree, vec_add, vec_is_zero, vec_scale, vec_str, vec_sub
from .tower import TowerElement, ring_module, tower_from_element
from .truncate import ModulePresentation, UnsupportedError, is_zero_at, solve_at

Matrix = Sequence[Sequence[Polynomial]]


class NotGenerating(ValueError):
    """The family does not generate M_0 over A_0."""

    def __init__(self, witness: Vector):
        self.witness = witness
        super().__init__(f"family does not generate M_0: {vec_str(witness)} is not in its span")


class NotSurjective(ValueError):
    def __init__(self, witness: Vector):
        self.witness = witness
        super().__init__(f"map is not surjective at level 0: {vec_str(witness)} has no preimage")


class NotFlat(ValueError):
    """A lifted basis fails to be free at some level."""

    def __init__(self, level: int, relation: Vector):
        self.level = level
        self.relation = relation
        super().__init__(f"lifted basis is not free at level {level}: relation {vec_str(relation)}")


class NotAdicSystem(ValueError):
    def __init__(self, level: int, reason: str):
        self.level = level
        super().__init__(f"not an m-adic system at level {level}: {reason}")


@dataclass
class LiftReport:
    success: bool
    cap: int
    residuals: dict[int, bool] = field(default_factory=dict)
    failure_level: int | None = None
    witness: object = None
    notes: list[str] = field(default_factory=list)


def _require_local(M: ModulePresentation):
    if not isinstance(M.ideal, VariableIdeal):
        raise UnsupportedError("lifting needs a variable-generated ideal (A_0 a field)")


def _degree_piece(residual: Vector, gens: Sequence[Vector], M: ModulePresentation, level: int, degree: int):
    q = M.quotient(level, frozenset(i for v in [residual, *gens] for p in v for i in p.variables()))
    monos = [m for m in q.ring_basis if mono_degree(m) == degree]
    return solve_at(residual, gens, M, level, monomials=monos)


class _GradedLifter:
    """Coefficients c(i) with sum_k c_k(i) gens_k(i) = target(i) in M_i, coherent in i.

    Below ``start`` the target must vanish and the coefficients are zero; at
    level j >= start the correction lives in degree j.
    """

    def __init__(self, target: Callable[[int], Vector], gens: Callable[[int], list[Vector]],
                 M: ModulePresentation, start: int = 0):
        self.target = target
        self.gens = gens
        self.M = M
        self.start = start
        self.levels: list[list[Polynomial]] = []

    def level(self, i: int) -> list[Polynomial]:
        zero = Polynomial.zero(self.M.field)
        while len(self.levels) <= i:
            j = len(self.levels)
            gens = self.gens(j)
            prev = self.levels[-1] if self.levels else []
            prev = prev + [zero] * (len(gens) - len(prev))
            if j < self.start:
                self.levels.append(prev)
                continue
            approx = self.M.zero()
            for c, g in zip(prev, gens):
                approx = vec_add(approx, vec_scale(c, g))
            residual = vec_sub(self.target(j), approx)
            if is_zero_at(residual, self.M, j):
                self.levels.append(prev)
                continue
            corr = _degree_piece(residual, gens, self.M, j, j)
            if corr is None:
                raise _CorrectionFailed(j, residual)
            self.levels.append([normal_form(a + b, self.M.ideal, j) for a, b in zip(prev, corr)])
        return self.levels[i]


class _CorrectionFailed(RuntimeError):
    """A graded correction had no solution; impossible once M_0 is generated."""

    def __init__(self, level: int, residual: Vector):
        self.level = level
        self.residual = residual
        super().__init__(f"no degree-{level} correction for residual {vec_str(residual)}")


# ---------------------------------------------------------------- complete Nakayama


@dataclass
class NakayamaResult:
    coefficients: DecayStream
    report: LiftReport


def nakayama_lift(m: TowerElement, family: Sequence[TowerElement] | DecayStream, cap: int) -> NakayamaResult:
    """Coefficients g with sum_z g(z) m_z = m, when the m_z generate M_0.

    Raises NotGenerating, with a generator of M outside the span as witness,
    when the level-0 images do not generate M_0.
    """
    M = m.module
    _require_local(M)
    if isinstance(family, DecayStream):
        if family.module != M:
            raise ValueError("family lives in a different module")

        def size(i: int) -> int:
            return max(family.declared_bound(j) for j in range(i + 1))

        def member(z: int) -> TowerElement:
            return family.value(z)
    else:
        members = [f if isinstance(f, TowerElement) else tower_from_element(f, M) for f in family]
        for f in members:
            if f.module != M:
                raise ValueError("family lives in a different module")

        def size(i: int) -> int:
            return len(members)

        def member(z: int) -> TowerElement:
            return members[z]

    def gens(i: int) -> list[Vector]:
        return [member(z).level(i) for z in range(size(i))]

    level0 = gens(0)
    for j in range(M.rank):
        e = M.unit(j)
        if solve_at(e, level0, M, 0) is None:
            raise NotGenerating(e)

    lifter = _GradedLifter(m.level, gens, M)
    R = ring_module(M.ideal, M.field)

    def coefficient(z: int) -> TowerElement:
        def level(i: int) -> Polynomial:
            row = lifter.level(i)
            return row[z] if z < len(row) else Polynomial.zero(M.field)

        return TowerElement(R, level)

    g = DecayStream(R, coefficient, lambda i: size(i), "nakayama coefficients")
    report = LiftReport(True, cap)
    for i in range(cap + 1):
        total = M.zero()
        for z in range(size(i)):
            total = vec_add(total, vec_scale(g.at_level(z, i)[0], member(z).level(i)))
        report.residuals[i] = is_zero_at(vec_sub(total, m.level(i)), M, i)
    report.success = all(report.residuals.values())
    return NakayamaResult(g, report)


# ---------------------------------------------------------------- lifting along surjections


def apply_matrix(phi: Matrix, v: Vector) -> Vector:
    """phi * v for a matrix given as rows."""
    out = []
    for row in phi:
        acc = Polynomial.zero(v[0].field if v else row[0].field)
        for a, b in zip(row, v):
            acc = acc + a * b
        out.append(acc)
    return tuple(out)


def _columns(phi: Matrix, ncols: int) -> list[Vector]:
    return [tuple(row[k] for row in phi) for k in range(ncols)]


def check_homomorphism(phi: Matrix, source: ModulePresentation, target: ModulePresentation, cap: int):
    if len(phi) != target.rank or any(len(row) != source.rank for row in phi):
        raise ValueError(f"matrix must be {target.rank} x {source.rank}")
    for r in source.relations:
        image = apply_matrix(phi, r)
        for i in range(cap + 1):
            if not is_zero_at(image, target, i):
                raise ValueError(f"matrix does not respect the relation {vec_str(r)} at level {i}")


def lift_along_surjection(phi: Matrix, source: ModulePresentation, f: DecayStream, cap: int) -> DecayStream:
    """A decaying g into ``source`` with phi o g = f and ord g(z) >= ord f(z)."""
    target = f.module
    _require_local(source)
    check_homomorphism(phi, source, target, cap)
    cols = _columns(phi, source.rank)
    for j in range(target.rank):
        e = target.unit(j)
        if is_zero_at(e, target, 0):
            continue
        if solve_at(e, cols, target, 0) is None:
            raise NotSurjective(e)

    lifters: dict[int, _GradedLifter] = {}

    def lifter(z: int) -> _GradedLifter:
        lf = lifters.get(z)
        if lf is None:
            fz = f.value(z)
            start = 0
            while start <= cap and is_zero_at(fz.level(start), target, start):
                start += 1
            lf = lifters[z] = _GradedLifter(fz.level, lambda i: cols, target, start)
        return lf

    def term(z: int) -> TowerElement:
        return TowerElement(source, lambda i: tuple(lifter(z).level(i)))

    return DecayStream(source, term, f.bound, f"lift of {f.label}")


# ---------------------------------------------------------------- m-adic systems and basis lifting


@dataclass
class AdicSystem:
    """Levels M_i (presentations read at level i) and transitions psi_i: M_{i+1} -> M_i.

    ``transition(i)`` is a rank(M_i) x rank(M_{i+1}) matrix.
    """

    presentation: Callable[[int], ModulePresentation]
    transition: Callable[[int], Matrix]
    max_level: int | None = None

    def module(self, i: int) -> ModulePresentation:
        if self.max_level is not None and i > self.max_level:
            raise ValueError(f"system only defined through level {self.max_level}")
        return self.presentation(i)

    @classmethod
    def constant(cls, M: ModulePresentation, transition: Callable[[int], Matrix] | None = None) -> AdicSystem:
        """M_i = M / a^(i+1) M, with identity transitions unless given."""
        ident = [[Polynomial.constant(1 if r == c else 0, M.field) for c in range(M.rank)] for r in range(M.rank)]
        return cls(lambda i: M, transition or (lambda i: ident))


def _system_variables(system: AdicSystem, cap: int) -> frozenset[int]:
    vs = set()
    for i in range(cap + 1):
        P = system.module(i)
        vs |= P.relation_variables()
        if i < cap:
            for row in system.transition(i):
                for p in row:
                    vs |= p.variables()
        if isinstance(P.ideal, VariableIdeal) and not P.ideal.all_variables:
            vs |= P.ideal.variables
    return frozenset(vs)


def verify_transition(system: AdicSystem, i: int, variables) -> None:
    """Check that psi_i induces A_i (x) M_{i+1} ~= M_i."""
    src, dst = system.module(i + 1), system.module(i)
    psi = system.transition(i)
    if len(psi) != dst.rank or any(len(row) != src.rank for row in psi):
        raise NotAdicSystem(i, f"psi_{i} must be {dst.rank} x {src.rank}")
    qs = src.quotient(i, variables)
    qd = dst.quotient(i, variables)
    for r in src.relations:
        if not qd.is_zero(apply_matrix(psi, r)):
            raise NotAdicSystem(i, f"psi_{i} does not respect relation {vec_str(r)}")
    image = Echelon()
    for b in qs.basis_elements():
        image.add(qd.residue(apply_matrix(psi, b)))
    if image.rank != qd.dim or qs.dim != qd.dim:
        raise NotAdicSystem(i, f"A_{i} (x) M_{i + 1} -> M_{i} is not bijective "
                               f"(dims {qs.dim} -> {qd.dim}, image rank {image.rank})")


def _basis_check(vectors: list[Vector], P: ModulePresentation, level: int, variables):
    """Return (injective relation or None, surjective?) for delta_z -> vectors[z]."""
    q = P.quotient(level, variables)
    ech = Echelon(track=True)
    for z, v in enumerate(vectors):
        for mu in q.ring_basis:
            rel = ech.add(q.residue(tuple(p.mul_monomial(mu) for p in v)), (z, mu))
            if rel is not None:
                coeffs = [dict() for _ in vectors]
                for (zz, m), c in rel.items():
                    coeffs[zz][m] = c
                return tuple(Polynomial(d, P.field) for d in coeffs), False
    return None, ech.rank == q.dim


def truncated_inverse(C: Matrix, ideal, level: int) -> list[list[Polynomial]]:
    """Inverse of a square matrix over A_level whose constant part is invertible.

    C = C0 (1 + N) with N nilpotent mod a^(level+1); the inverse is
    sum_{k<=level} (-N)^k C0^{-1}.
    """
    n = len(C)
    field = C[0][0].field if n else None
    C0 = [[C[r][c].constant_term() for c in range(n)] for r in range(n)]
    C0inv = _field_inverse(C0, field)
    if C0inv is None:
        raise ValueError("constant part of the matrix is singular")

    def mul(A, B):
        return [[normal_form(sum((A[r][k] * B[k][c] for k in range(n)), Polynomial.zero(field)), ideal, level)
                 for c in range(n)] for r in range(n)]

    C0inv_p = [[Polynomial.constant(x, field) for x in row] for row in C0inv]
    ident = [[Polynomial.constant(1 if r == c else 0, field) for c in range(n)] for r in range(n)]
    N = mul(C0inv_p, C)
    N = [[N[r][c] - ident[r][c] for c in range(n)] for r in range(n)]
    minusN = [[-x for x in row] for row in N]
    term = ident
    total = ident
    for _ in range(level):
        term = mul(term, minusN)
        total = [[total[r][c] + term[r][c] for c in range(n)] for r in range(n)]
    return mul(total, C0inv_p)


def _field_inverse(A, field):
    n = len(A)
    M = [list(row) + [field(1 if r == c else 0) for c in range(n)] for r, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [a - factor * b for a, b in zip(M[r], M[col])]
    return [row[n:] for row in M]


@dataclass
class BasisLift:
    basis: list[list[Vector]]  # basis[z][i] is the z-th basis element of M_i
    report: LiftReport

    def tower(self, z: int) -> list[Vector]:
        return self.basis[z]


def basis_lift(system: AdicSystem, cap: int) -> BasisLift:
    """Lift a field basis of M_0 through the system to bases of every M_i, i <= cap.

    Raises NotFlat when some M_i is not free on the lifted elements.
    """
    P0 = system.module(0)
    _require_local(P0)
    variables = _system_variables(system, cap)
    for i in range(cap):
        verify_transition(system, i, variables)

    report = LiftReport(True, cap)
    q0 = P0.quotient(0, variables)
    ech = Echelon()
    for v in q0.relation_span.rows.values():
        ech.add(v)
    current: list[Vector] = []
    for k in range(P0.rank):
        e = P0.unit(k)
        before = ech.rank
        ech.add(q0.to_sparse(e))
        if ech.rank > before:
            current.append(e)
    basis = [[v] for v in current]
    report.residuals[0] = True
    for i in range(cap):
        src, dst = system.module(i + 1), system.module(i)
        cols = _columns(system.transition(i), src.rank)
        lifted = []
        for v in current:
            c = solve_at(v, cols, dst, i)
            if c is None:
                raise NotAdicSystem(i, f"psi_{i} is not surjective onto {vec_str(v)}")
            lifted.append(c)
        relation, surjective = _basis_check(lifted, src, i + 1, variables)
        if relation is not None:
            raise NotFlat(i + 1, relation)
        if not surjective:
            raise NotAdicSystem(i + 1, "lifted elements do not generate")
        report.residuals[i + 1] = True
        if src.is_free and len(lifted) == src.rank:
            C = [[lifted[z][r] for z in range(len(lifted))] for r in range(src.rank)]
            inv = truncated_inverse(C, src.ideal, i + 1)
            ok = all(
                normal_form(sum((C[r][k] * inv[k][c] for k in range(src.rank)), Polynomial.zero(src.field)),
                            src.ideal, i + 1) == (1 if r == c else 0)
                for r in range(src.rank) for c in range(src.rank)
            )
            report.notes.append(f"level {i + 1}: explicit inverse {'verified' if ok else 'FAILED'}")
            if not ok:
                report.success = False
                report.failure_level = i + 1
        for z, c in enumerate(lifted):
            basis[z].append(c)
        current = lifted
    return BasisLift(basis, report)


# ---------------------------------------------------------------- free covers


@dataclass
class FreeCover:
    module: ModulePresentation
    size: int
    surjective: dict[int, bool]
    isomorphism: dict[int, bool]
    kernel_samples: list[Vector]
    kernel_basis: list[Vector]

    def phi(self, g: DecayStream, cap: int) -> TowerElement:
        """Image of a decaying coefficient function: sum_z g(z) e_z."""
        M = self.module
        return hom_apply(g, lambda z: M.unit(z) if z < M.rank else M.zero(), cap, module=M)

    def in_kernel(self, v: Vector, level: int) -> bool:
        return is_zero_at(v, self.module, level)


def free_cover(M: ModulePresentation, cap: int) -> FreeCover:
    """The surjection F_dec(Z, A) -> M^ sending delta_k to the k-th generator."""
    _require_local(M)
    units = [M.unit(k) for k in range(M.rank)]
    surjective: dict[int, bool] = {}
    iso: dict[int, bool] = {}
    kernel_basis: list[Vector] = []
    variables = M.relation_variables()
    for i in range(cap + 1):
        q = M.quotient(i, variables)
        surjective[i] = all(solve_at(b, units, M, i) is not None for b in q.basis_elements())
        _, kernel = solve_at(M.zero(), units, M, i, with_kernel=True)
        iso[i] = not kernel
        if i == cap:
            kernel_basis = kernel
    samples = []
    for r in M.relations:
        trunc = tuple(normal_form(p, M.ideal, cap) for p in r)
        if not vec_is_zero(trunc) and is_zero_at(trunc, M, cap):
            samples.append(trunc)
    return FreeCover(M, M.rank, surjective, iso, samples, kernel_basis)
