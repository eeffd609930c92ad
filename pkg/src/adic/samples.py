"""Seeded random instances shared by the gallery and the test-suite."""

from __future__ import annotations

import random

from .coeffs import QQ
from .decay import DecayStream
from .ideals import variable_ideal
from .polyring import Polynomial, monomials_upto
from .tower import ring_module
from .truncate import ModulePresentation


def random_poly(rng: random.Random, variables, degree: int, terms: int = 3, coeff: int = 3,
                min_degree: int = 0) -> Polynomial:
    monos = [m for m in monomials_upto(variables, degree) if sum(e for _, e in m) >= min_degree]
    out = {}
    for _ in range(terms):
        c = rng.randint(-coeff, coeff)
        if c:
            m = rng.choice(monos)
            out[m] = out.get(m, 0) + c
    return Polynomial(out, QQ)


def thm6_presentations() -> list[ModulePresentation]:
    """Finitely presented modules over Q[t1,t2] with a = (t1, t2)."""
    a = variable_ideal(1, 2)
    p = Polynomial.var
    one = Polynomial.constant(1)
    zero = Polynomial.zero()
    specs = [
        (1, []),
        (2, []),
        (1, [(p(1),)]),
        (1, [(p(1) * p(2),)]),
        (1, [(p(1) ** 2 - p(2),)]),
        (1, [(p(1) + p(2) ** 2,)]),
        (1, [(p(1) ** 2,), (p(2) ** 3,)]),
        (2, [(p(1), -p(2))]),
        (2, [(p(1), zero)]),
        (2, [(one, p(1))]),
        (2, [(p(1) ** 2, p(2)), (p(2), zero)]),
        (3, [(p(1), p(2), zero), (zero, p(1), p(2))]),
        (1, [(one + p(1),)]),
    ]
    return [ModulePresentation(r, tuple(rels), a) for r, rels in specs]


def random_presentation(rng: random.Random, variables=(1, 2), max_rank: int = 2,
                        max_relations: int = 2, degree: int = 2) -> ModulePresentation:
    rank = rng.randint(1, max_rank)
    rels = []
    for _ in range(rng.randint(0, max_relations)):
        rels.append(tuple(random_poly(rng, variables, degree, terms=2) for _ in range(rank)))
    rels = [r for r in rels if any(not p.is_zero() for p in r)]
    return ModulePresentation(rank, tuple(rels), variable_ideal(*variables))


def random_decaying_stream(rng: random.Random, variables=(1, 2), length: int = 12) -> DecayStream:
    """A ring-valued stream whose z-th term lies in a^(z // 2) and vanishes past ``length``."""
    a = variable_ideal(*variables)
    R = ring_module(a)
    terms = {}
    for z in range(length):
        d = z // 2
        terms[z] = random_poly(rng, variables, d + 2, terms=3, min_degree=d)
    zero = Polynomial.zero()

    def term(z: int):
        return (terms.get(z, zero),)

    return DecayStream(R, term, lambda i: min(length, 2 * i + 2), "random")


def nakayama_instance(rng: random.Random):
    """A random presentation over Q[t1,t2] and a random finite family in it."""
    M = random_presentation(rng)
    vs = (1, 2)
    family = []
    for _ in range(rng.randint(1, 3)):
        # constant parts are sparse so that both outcomes occur
        min_degree = 0 if rng.random() < 0.5 else 1
        family.append(tuple(random_poly(rng, vs, 2, min_degree=min_degree) for _ in range(M.rank)))
    return M, family


def check_nakayama_equivalence(M: ModulePresentation, family, cap: int, rng: random.Random | None = None
                               ) -> tuple[bool, str]:
    """Level-0 generation holds iff nakayama_lift succeeds (with zero residuals)."""
    from .lift import NotGenerating, nakayama_lift
    from .tower import tower_from_element
    from .truncate import solve_at

    rng = rng or random.Random(0)
    generates = all(solve_at(M.unit(j), family, M, 0) is not None for j in range(M.rank))
    m = tuple(random_poly(rng, (1, 2), 2) for _ in range(M.rank))
    try:
        res = nakayama_lift(tower_from_element(m, M), family, cap)
    except NotGenerating:
        return not generates, f"generates={generates} lifted=False"
    if not res.report.success:
        return False, "nonzero residual"
    return generates, f"generates={generates} lifted=True"
