"""Machine-checked verification of the worked examples and counterexamples at
finite truncation.  Every claim is an exact assertion; failed claims carry
witnesses."""

from __future__ import annotations

import random
from collections.abc import Callable
from dataclasses import dataclass, field

from .decay import (
    DecayStream,
    decay_check,
    delta_expansion,
    from_delta_expansion,
    from_level_stream,
    index_tuple,
    series_sum,
    to_level_stream,
    tuple_index,
    tuples_upto,
)
from .ideals import ALL_VARIABLES, Finite, groebner_basis, normal_form, reduce_full, variable_ideal
from .polyring import Polynomial, mono_key, mono_str
from .samples import (
    check_nakayama_equivalence,
    nakayama_instance,
    random_decaying_stream,
    random_poly,
    random_presentation,
    thm6_presentations,
)
from .tower import dist_prime, ord_adic_bounds, ring_module, theorem6_check, tower_zero
from .truncate import is_zero_at, solution_space, solve_at, truncate


class CapTooSmall(ValueError):
    pass


@dataclass
class Claim:
    example: str
    claim: str
    passed: bool
    witness: str = ""

    def __str__(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.example}.{self.claim} {self.witness}".rstrip()


@dataclass
class GalleryReport:
    example: str
    cap: int
    claims: list[Claim] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def add(self, claim: str, passed: bool, witness: str = ""):
        self.claims.append(Claim(self.example, claim, bool(passed), witness))

    def extend(self, other: GalleryReport):
        self.claims.extend(other.claims)

    def lines(self) -> list[str]:
        return [str(c) for c in self.claims] + [f"OVERALL {'PASS' if self.passed else 'FAIL'}"]

    def __str__(self):
        return "\n".join(self.lines())


def _lowest_term(p: Polynomial) -> str:
    m = min(p.terms, key=mono_key)
    return mono_str(m)


# ---------------------------------------------------------------- b = sum t_k^k


def b_stream() -> DecayStream:
    """k -> t_k^k over A = Q[t1, t2, ...] with a the ideal of all variables."""
    R = ring_module(ALL_VARIABLES)
    zero = Polynomial.zero()
    return DecayStream(R, lambda k: (Polynomial.var(k) ** k if k >= 1 else zero,), lambda i: i + 1, "b")


def b_element(cap: int):
    return series_sum(b_stream(), cap)


def verify_example7(n_max: int, cap: int) -> GalleryReport:
    if n_max < 1:
        raise CapTooSmall("n_max must be >= 1")
    if cap < n_max + 1:
        raise CapTooSmall(f"cap {cap} too small for n_max {n_max}: need cap >= {n_max + 1}")
    rep = GalleryReport("ex7", cap)
    b = b_element(cap)
    top = b.level(cap)[0]
    all_refuted = True
    for n in range(1, n_max + 1):
        rest = top.substitute_zero(range(1, n + 1))
        ok = not rest.is_constant()
        all_refuted &= ok
        rep.add(f"refute_n{n}", ok, f"survivor {_lowest_term(rest)}" if ok else f"rest {rest}")
    zero = tower_zero(b.module)
    d = dist_prime(b, zero, cap)
    rep.add("dist_prime", str(d) == "1/2", f"dist'(b,0) = {d}")
    lower, upper = ord_adic_bounds(b, cap, n_max=n_max)
    ok = lower == Finite(0) and upper == Finite(0)
    rep.add("ord_adic", ok, f"ord_adic(b) in [{lower}, {upper}], dist(b,0) = 1")
    rep.add("tau0_not_surjective", all_refuted and ok,
            f"b mod a not in image of M_0 (n <= {n_max})")
    return rep


# ---------------------------------------------------------------- Example 5


def verify_example5(cap: int, bound: Callable[[int], int] | None = None, probe: int | None = None,
                    seed: int = 0) -> GalleryReport:
    """phi(delta_i) = t^i delta_i on F_dec(N, A), A = Q[[t]], f = sum t^i delta_i.

    ``bound``/``probe`` set the declared decay bound and probe window used for
    the all-ones preimage in claim (c).
    """
    if cap < 2:
        raise CapTooSmall("cap must be >= 2")
    rep = GalleryReport("ex5", cap)
    a = variable_ideal(1)
    R = ring_module(a)
    t = Polynomial.var(1)
    one = Polynomial.constant(1)

    # (a) partial preimages g_j = sum_{i<=j} delta_i
    ok_a = True
    for j in range(cap + 1):
        for i in range(cap + 2):
            g = one if i <= j else Polynomial.zero()
            if not is_zero_at((t ** i * g - t ** i,), R, j):
                ok_a = False
                rep.add(f"approx_g{j}", False, f"index {i}")
    rep.add("a_closure", ok_a, f"phi(g_j) = f mod t^(j+1) for j <= {cap}")

    # (b) forced coefficients: a t^i = t^i mod t^(j+1) forces a = 1 mod t^(j+1-i)
    ok_b = True
    detail = ""
    for j in range(cap + 1):
        for i in range(j + 1):
            target = truncate((t ** i,), R, j)
            sol, kernel = solution_space(target, [target], R)
            if sol is None:
                ok_b, detail = False, f"no preimage at j={j}, i={i}"
                continue
            prec = j - i
            if not (is_zero_at((sol[0] - 1,), R, prec) and all(is_zero_at(k, R, prec) for k in kernel)):
                ok_b, detail = False, f"coefficient {i} not forced at j={j}"
    forced = [solve_at((t ** i,), [(t ** i,)], R, cap)[0].constant_term() for i in range(cap + 1)]
    ok_b &= all(c == 1 for c in forced)
    rep.add("b_forced", ok_b, detail or f"g(i) = 1 for i <= {cap}")

    # (c) the forced preimage z -> 1 is not decaying
    ones = DecayStream(R, lambda z: (one,), bound, "const 1")
    report = decay_check(ones, cap, cap if probe is None else probe)
    ok_c = not report.passed and report.failed_threshold == 0 and len(report.witnesses) >= cap
    rep.add("c_not_decaying", ok_c,
            f"threshold 0 witnesses {report.witnesses}" if not report.passed else "stream reported decaying")

    # (d) phi injective on finite-support polynomial inputs
    rng = random.Random(seed)
    ok_d = True
    for _ in range(20):
        g = {i: random_poly(rng, (1,), 3) for i in range(rng.randint(1, 5))}
        if all(v.is_zero() for v in g.values()):
            continue
        image = {i: t ** i * v for i, v in g.items()}
        if all(v.is_zero() for v in image.values()):
            ok_d = False
    rep.add("d_injective", ok_d, "no kernel on 20 random inputs")
    rep.add("f_in_closure_not_image", ok_a and ok_b and ok_c, "f in closure(L) \\ L")
    return rep


# ---------------------------------------------------------------- Example 6


def verify_example6(cap: int) -> GalleryReport:
    """K = Q[[t]][1/t] modelled as Q[t1, t2]/(t1*t2 - 1)."""
    if cap < 1:
        raise CapTooSmall("cap must be >= 1")
    rep = GalleryReport("ex6", cap)
    t, s = Polynomial.var(1), Polynomial.var(2)
    one = Polynomial.constant(1)
    ok = True
    for i in range(cap + 1):
        # 1 = t^(i+1) * t^-(i+1) in K, i.e. 1 lies in a^(i+1) K
        cert = (t ** (i + 1)) * (s ** (i + 1)) - one
        basis = groebner_basis([t ** (i + 1), t * s - one], degree_cap=2 * i + 4)
        vanishes = reduce_full(one, basis).is_zero() and reduce_full(cert, [t * s - one]).is_zero()
        ok &= vanishes
        rep.add(f"level{i}_zero", vanishes, f"t^{i + 1} * t^-{i + 1} = 1")
    R = ring_module(variable_ideal(1))
    control = all(not is_zero_at((one,), R, i) for i in range(cap + 1))
    rep.add("control_K_eq_A", control, "1 is nonzero in every A_i")
    rep.add("completion_not_injective", ok and control, "1 in A^ maps to 0 in K^ = 0")
    return rep


# ---------------------------------------------------------------- restricted power series


def _series_poly(f: DecayStream, n: int, level: int) -> Polynomial:
    """Level truncation of a coefficient stream as a polynomial in t1..tn."""
    total = Polynomial.zero()
    for z in range(f.declared_bound(level)):
        c = f.at_level(z, level)[0]
        if not c.is_zero():
            e = index_tuple(z, n)
            mono = tuple((k + 1, x) for k, x in enumerate(e) if x)
            total = total + c * Polynomial.monomial(mono)
    return total


def cauchy_product(f: DecayStream, g: DecayStream, n: int) -> DecayStream:
    R = f.module

    def term(z: int):
        e = index_tuple(z, n)
        total = Polynomial.zero()
        for z1 in range(z + 1):
            e1 = index_tuple(z1, n)
            if all(x <= y for x, y in zip(e1, e)):
                z2 = tuple_index(tuple(y - x for x, y in zip(e1, e)))
                total = total + f.value(z1).source[0] * g.value(z2).source[0]
        return (total,)

    def bound(i: int) -> int:
        bf, bg = f.declared_bound(i), g.declared_bound(i)
        top = -1
        for z1 in range(bf):
            for z2 in range(bg):
                top = max(top, tuple_index(tuple(x + y for x, y in zip(index_tuple(z1, n), index_tuple(z2, n)))))
        return top + 1

    return DecayStream(R, term, bound, "cauchy")


def _coefficient_stream(n: int, coeffs: dict[tuple, Polynomial] | Callable, bound) -> DecayStream:
    R = ring_module(variable_ideal(n + 1))
    zero = Polynomial.zero()
    if callable(coeffs):
        return DecayStream(R, lambda z: (coeffs(index_tuple(z, n)),), bound)
    table = {tuple_index(e): c for e, c in coeffs.items()}
    top = max(table, default=-1) + 1
    return DecayStream(R, lambda z: (table.get(z, zero),), lambda i: top)


def verify_restricted_series(n: int, cap: int) -> GalleryReport:
    """Series in t1..tn with coefficients in Q[[s]], s = t_(n+1), a = (s)."""
    if n < 1:
        raise CapTooSmall("n must be >= 1")
    rep = GalleryReport(f"restricted_n{n}", cap)
    s = Polynomial.var(n + 1)
    a = variable_ideal(n + 1)
    unit = tuple(0 for _ in range(n))

    # sum_k (s t1)^k: the coefficient s^k has order k, and tuples of degree <= i
    # come first in the enumeration
    geom = _coefficient_stream(n, lambda e: s ** e[0] if not any(e[1:]) else Polynomial.zero(),
                               lambda i: tuples_upto(n, i))
    e1 = tuple(1 if k == 0 else 0 for k in range(n))
    one_minus = _coefficient_stream(n, {unit: Polynomial.constant(1), e1: -s}, None)
    delta0 = _coefficient_stream(n, {unit: Polynomial.constant(1)}, None)
    cases = [("geom_x_linear", geom, one_minus), ("delta0_identity", delta0, geom)]
    if n >= 2:
        e2 = tuple(1 if k == 1 else 0 for k in range(n))
        cases.append(("monomials", _coefficient_stream(n, {e1: s}, None),
                      _coefficient_stream(n, {e2: Polynomial.constant(1)}, None)))
    for name, f, g in cases:
        h = cauchy_product(f, g, n)
        lhs = _series_poly(h, n, cap)
        rhs = normal_form(_series_poly(f, n, cap) * _series_poly(g, n, cap), a, cap)
        rep.add(name, lhs == rhs, f"level {cap}: {lhs}")
    # the geometric identity itself: sum (s t1)^k * (1 - s t1) = 1
    h = cauchy_product(geom, one_minus, n)
    rep.add("geometric_identity", _series_poly(h, n, cap) == 1, "product is 1")
    return rep


# ---------------------------------------------------------------- aggregate


def _thm6_suite(cap: int, rng: random.Random) -> GalleryReport:
    rep = GalleryReport("thm6", cap)
    modules = thm6_presentations() + [random_presentation(rng) for _ in range(3)]
    for k, M in enumerate(modules):
        for i in range(min(cap, 4) + 1):
            r = theorem6_check(M, i)
            rep.add(f"m{k}_level{i}", r.passed, str(r) if not r.passed else "")
            rep.add(f"m{k}_level{i}_idempotent", r.injective_tau and r.surjective_tau, "tau_{M,i} bijective")
    return rep


def _thm7_suite(cap: int, rng: random.Random) -> GalleryReport:
    rep = GalleryReport("thm7", cap)
    for k in range(10):
        f = random_decaying_stream(rng)
        g = from_level_stream(to_level_stream(f, cap), cap)
        ok = all(f.at_level(z, i) == g.at_level(z, i) for i in range(cap + 1) for z in range(f.declared_bound(i)))
        rep.add(f"roundtrip{k}", ok)
    return rep


def _thm8_suite(cap: int, rng: random.Random) -> GalleryReport:
    rep = GalleryReport("thm8", cap)
    for k in range(10):
        M, family = nakayama_instance(rng)
        ok, detail = check_nakayama_equivalence(M, family, cap, rng)
        rep.add(f"instance{k}", ok, detail)
    return rep


def _thm2_suite(cap: int, rng: random.Random) -> GalleryReport:
    rep = GalleryReport("thm2", cap)
    for k in range(5):
        f = random_decaying_stream(rng)
        L = to_level_stream(f, cap)
        ok = True
        for i in range(cap + 1):
            F = L.level(i)
            ok &= len(F.support) <= f.declared_bound(i)
            ok &= from_delta_expansion(delta_expansion(F), f.module, i).equals(F)
        rep.add(f"shadow{k}", ok)
    return rep


def run_all(cap: int = 8, seed: int = 0, only: str | None = None) -> GalleryReport:
    if cap < 2:
        raise CapTooSmall("cap must be >= 2")
    rng = random.Random(seed)
    items: dict[str, Callable[[], GalleryReport]] = {
        "ex7": lambda: verify_example7(min(6, cap - 1), cap),
        "ex5": lambda: verify_example5(cap, seed=seed),
        "ex6": lambda: verify_example6(cap),
        "restricted": lambda: _merge("restricted", cap,
                                     [verify_restricted_series(1, cap), verify_restricted_series(2, cap)]),
        "thm6": lambda: _thm6_suite(cap, rng),
        "thm7": lambda: _thm7_suite(cap, rng),
        "thm8": lambda: _thm8_suite(cap, rng),
        "thm2": lambda: _thm2_suite(cap, rng),
    }
    if only is not None and only not in items:
        raise KeyError(f"unknown example {only!r}; choose from {', '.join(items)}")
    report = GalleryReport("all", cap)
    for name, fn in items.items():
        if only is None or only == name:
            report.extend(fn())
    return report


def _merge(name: str, cap: int, reports: list[GalleryReport]) -> GalleryReport:
    out = GalleryReport(name, cap)
    for r in reports:
        out.extend(r)
    return out


GALLERY_ITEMS = ("ex7", "ex5", "ex6", "restricted", "thm6", "thm7", "thm8", "thm2")
