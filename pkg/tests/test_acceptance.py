"""Acceptance criteria 1-10.  Each test records one PASS/FAIL line; the lines
are printed in the pytest terminal summary and when run as a script.

All checks are exact (no tolerances); the only numeric limits are the runtime
bounds of criteria 2 and 3 (5 s each).
"""

from __future__ import annotations

import functools
import itertools
import random
import time
from fractions import Fraction

import pytest

from adic.decay import (
    from_level_stream,
    pairing,
    pullback,
    pushforward,
    stream_add,
    stream_scale,
    to_level_stream,
)
from adic.gallery import b_element, verify_example5, verify_example7
from adic.ideals import ALL_VARIABLES, DegreeCapError, DyadicDistance, Finite, groebner_basis, reduce_full, variable_ideal
from adic.lift import AdicSystem, NotFlat, apply_matrix, basis_lift
from adic.polyring import Polynomial, monomials_upto, t
from adic.samples import (
    check_nakayama_equivalence,
    nakayama_instance,
    random_decaying_stream,
    random_poly,
    thm6_presentations,
)
from adic.tower import CoherenceError, TowerElement, dist_prime, ord_adic_bounds, ring_module, theorem6_check, tower_zero
from adic.truncate import ModulePresentation, is_zero_at
from oracles import brute_membership, span_mod_p, to_dict

RUNTIME_LIMIT_S = 5.0
RESULTS: list[str] = []


def criterion(number: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                RESULTS.append(f"FAIL criterion {number}: {title} ({type(exc).__name__}: {exc})")
                raise
            RESULTS.append(f"PASS criterion {number}: {title}" + (f" ({detail})" if detail else ""))
        return run
    return wrap


@criterion(1, "metric discrepancy dist(b,0) = 1, dist'(b,0) = 1/2")
def test_criterion_01_metric_discrepancy():
    b = b_element(8)
    zero = tower_zero(b.module)
    d_prime = dist_prime(b, zero, 8)
    lower, upper = ord_adic_bounds(b, 8)
    assert d_prime.value == Fraction(1, 2)
    assert lower == upper == Finite(0)
    d_adic = DyadicDistance.from_order(upper)
    assert d_adic.value == 1
    return f"pair ({d_adic}, {d_prime})"


@criterion(2, "Example 7 refutations for n <= 6 at cap 8 in < 5 s")
def test_criterion_02_example7():
    start = time.perf_counter()
    r = verify_example7(6, 8)
    elapsed = time.perf_counter() - start
    assert r.passed, str(r)
    for n in range(1, 7):
        c = next(c for c in r.claims if c.claim == f"refute_n{n}")
        assert c.passed and c.witness == f"survivor t{n + 1}^{n + 1}"
    assert elapsed < RUNTIME_LIMIT_S
    return f"{elapsed:.3f} s"


@criterion(3, "Example 5 at cap 8: approximants, forced ones, decay failure, < 5 s")
def test_criterion_03_example5():
    start = time.perf_counter()
    r = verify_example5(8)
    elapsed = time.perf_counter() - start
    assert r.passed, str(r)
    names = {c.claim for c in r.claims if c.passed}
    assert {"a_closure", "b_forced", "c_not_decaying"} <= names
    c = next(c for c in r.claims if c.claim == "c_not_decaying")
    assert c.witness.startswith("threshold 0 witnesses [0, 1, 2, 3, 4, 5, 6, 7")
    assert elapsed < RUNTIME_LIMIT_S
    return f"{elapsed:.3f} s"


@criterion(4, "Theorem 6 checker and tau_{M,i} bijectivity on >= 10 modules, levels <= 4")
def test_criterion_04_theorem6():
    mods = thm6_presentations()
    assert len(mods) >= 10
    for M in mods:
        for i in range(5):
            r = theorem6_check(M, i)
            assert r.surjective_tau and r.kernel_equals_power, str(r)
            assert r.injective_tau and r.surjective_tau, str(r)
    return f"{len(mods)} modules"


@criterion(5, "Thm 7 round trip on 100 random decaying streams, levels <= 8")
def test_criterion_05_level_stream_roundtrip():
    rng = random.Random(5)
    for _ in range(100):
        f = random_decaying_stream(rng, length=rng.randint(1, 20))
        g = from_level_stream(to_level_stream(f, 8), 8)
        for i in range(9):
            for z in range(f.declared_bound(i) + 3):
                assert g.at_level(z, i) == f.at_level(z, i)
    return "100 streams"


@criterion(6, "Thm 8 equivalence on 50 random instances, residuals zero at levels <= 6")
def test_criterion_06_nakayama():
    rng = random.Random(6)
    outcomes = {True: 0, False: 0}
    for _ in range(50):
        M, family = nakayama_instance(rng)
        ok, detail = check_nakayama_equivalence(M, family, 6, rng)
        assert ok, detail
        outcomes["generates=True" in detail] += 1
    assert outcomes[True] > 0 and outcomes[False] > 0
    return f"{outcomes[True]} generating, {outcomes[False]} not"


def _unit_matrix(rng, rank, variables):
    """Random matrix whose constant part is invertible (upper unitriangular times diagonal)."""
    U = [[Polynomial.constant(rng.choice([1, 2, -1, 3]) if r == c else (rng.randint(-2, 2) if c > r else 0))
          + random_poly(rng, variables, 2, terms=2, min_degree=1)
          for c in range(rank)] for r in range(rank)]
    if rng.random() < 0.5:
        U = U[::-1]  # a row permutation keeps the constant part invertible
    return U


def _flat_system(rng):
    rank = rng.randint(1, 3)
    variables = (1,) if rng.random() < 0.5 else (1, 2)
    a = variable_ideal(*variables)
    if rng.random() < 0.7:
        M = ModulePresentation.free(rank, a)
    else:
        # A^(rank+1) modulo a relation with a unit entry is free of rank `rank`
        rel = (Polynomial.constant(1) + random_poly(rng, variables, 1, min_degree=1),) + tuple(
            random_poly(rng, variables, 2) for _ in range(rank))
        M = ModulePresentation(rank + 1, (rel,), a)
    mats = {}

    def psi(i):
        if i not in mats:
            if M.relations:
                # a scalar unit maps the relation to a multiple of itself
                u = Polynomial.constant(rng.choice([1, 2, -3])) + random_poly(rng, variables, 2, min_degree=1)
                mats[i] = [[u if r == c else Polynomial.zero() for c in range(M.rank)] for r in range(M.rank)]
            else:
                mats[i] = _unit_matrix(rng, M.rank, variables)
        return mats[i]

    return AdicSystem(lambda i: M, psi)


def _non_flat_system(rng):
    rank = rng.randint(1, 3)
    k = rng.randint(1, 6)
    a = variable_ideal(1)
    free = ModulePresentation.free(rank, a)
    e1 = (t(1) ** k,) + tuple(Polynomial.zero() for _ in range(rank - 1))
    bad = ModulePresentation(rank, (e1,), a)
    ident = [[Polynomial.constant(1 if r == c else 0) for c in range(rank)] for r in range(rank)]
    return AdicSystem(lambda i: free if i < k else bad, lambda i: ident), k


@criterion(7, "basis lifting on random flat systems (rank <= 3, cap 6); non-flat rejected")
def test_criterion_07_basis_lift():
    rng = random.Random(7)
    for _ in range(12):
        sys = _flat_system(rng)
        bl = basis_lift(sys, 6)
        assert bl.report.success and set(bl.report.residuals) == set(range(7))
        for z in range(len(bl.basis)):
            for i in range(6):
                img = apply_matrix(sys.transition(i), bl.basis[z][i + 1])
                assert is_zero_at(tuple(x - y for x, y in zip(img, bl.basis[z][i])), sys.module(i), i)
        if sys.module(0).is_free:
            assert all("verified" in n for n in bl.report.notes)
    for _ in range(8):
        sys, k = _non_flat_system(rng)
        with pytest.raises(NotFlat) as exc:
            basis_lift(sys, 6)
        assert exc.value.level == k
    return "12 flat, 8 injected non-flat"


@criterion(8, "pairing bilinearity, adjunction and functoriality on 100 instances")
def test_criterion_08_remark3():
    rng = random.Random(8)
    cap = 5
    for n in range(100):
        g1 = random_decaying_stream(rng, (1,), length=rng.randint(1, 12))
        g2 = random_decaying_stream(rng, (1,), length=rng.randint(1, 12))
        coeffs = [random_poly(rng, (1,), 2) for _ in range(8)]
        f = lambda z: coeffs[z % 8]
        m1, m2 = rng.randint(2, 4), rng.randint(2, 3)
        h1 = lambda y: y // m1
        h2 = lambda y: (y + 1) // m2
        c = random_poly(rng, (1,), 2)
        R = g1.module

        def eq(x, y):
            return is_zero_at((x.level(cap)[0] - y.level(cap)[0],), R, cap)

        both = pairing(f, stream_add(g1, g2), cap)
        split = pairing(f, g1, cap) + pairing(f, g2, cap)
        assert eq(both, split)
        assert eq(pairing(f, stream_scale(c, g1), cap), TowerElement(R, lambda i: (c * pairing(f, g1, cap).level(i)[0],)))
        assert eq(pairing(f, pushforward(h1, g1, cap), cap), pairing(pullback(h1, f), g1, cap))
        composed = pushforward(lambda y: h2(h1(y)), g1, cap)
        stepwise = pushforward(h2, pushforward(h1, g1, cap), cap)
        for z in range(6):
            for i in range(cap + 1):
                assert composed.at_level(z, i) == stepwise.at_level(z, i)
    return "100 instances"


@criterion(9, "Groebner vs brute-force membership; zero test vs span enumeration")
def test_criterion_09_oracles():
    from adic.coeffs import GF

    rng = random.Random(9)
    membership = 0
    for _ in range(30):
        gens = [g for g in (random_poly(rng, (1, 2), 2, terms=3) for _ in range(2)) if not g.is_zero()]
        if not gens:
            continue
        try:
            gb = groebner_basis(gens, 10)
        except DegreeCapError:
            continue
        gd = [to_dict(g, 2) for g in gens]
        for _ in range(4):
            if rng.random() < 0.5:
                f = sum((random_poly(rng, (1, 2), 2) * g for g in gens), Polynomial.zero())
            else:
                f = random_poly(rng, (1, 2), 4)
            if f.degree() > 6:
                continue
            assert reduce_full(f, gb).is_zero() == brute_membership(to_dict(f, 2), gd, 2, 10)
            membership += 1

    zero_tests = 0
    p = 3
    F = GF(p)
    a = variable_ideal(1, 2)
    for _ in range(20):
        rank = rng.randint(1, 2)
        rels = tuple(tuple(Polynomial(random_poly(rng, (1, 2), 1, terms=2).terms, F) for _ in range(rank))
                     for _ in range(rng.randint(1, 2)))
        M = ModulePresentation(rank, rels, a, F)
        for level in range(2):
            basis = monomials_upto((1, 2), level)
            index = {km: n for n, km in enumerate(itertools.product(range(rank), basis))}

            def coords(vec):
                out = [0] * len(index)
                for k, q in enumerate(vec):
                    for m, c in q.terms.items():
                        if sum(e for _, e in m) <= level:
                            out[index[(k, m)]] = int(c.value) % p
                return tuple(out)

            span = span_mod_p([coords(tuple(q.mul_monomial(mu) for q in r)) for r in rels for mu in basis], p)
            for _ in range(4):
                v = tuple(Polynomial(random_poly(rng, (1, 2), 1).terms, F) for _ in range(rank))
                if rng.random() < 0.5:
                    v = tuple(q * Polynomial.constant(rng.randint(1, p - 1), F) for q in rng.choice(rels))
                assert is_zero_at(v, M, level) == (coords(v) in span)
                zero_tests += 1
    assert membership >= 40
    return f"{membership} membership, {zero_tests} zero-test cases"


@criterion(10, "mutation sanity: false decay bound flips Example 5 (c); incoherent tower detected")
def test_criterion_10_mutation():
    mutated = verify_example5(8, bound=lambda i: 9, probe=0)
    c = next(c for c in mutated.claims if c.claim == "c_not_decaying")
    assert not c.passed and str(c).startswith("FAIL ex5.c_not_decaying")
    assert not mutated.passed
    R = ring_module(ALL_VARIABLES)
    b = b_element(8)
    corrupted = TowerElement(R, lambda i: b.level(i) if i != 3 else (b.level(3)[0] + t(1),))
    corrupted.level(2)
    with pytest.raises(CoherenceError):
        corrupted.level(3)
    return "both mutations detected"


def acceptance_lines() -> list[str]:
    return list(RESULTS)


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for test in tests:
        try:
            test()
        except BaseException:
            pass
    print("\n".join(RESULTS))
