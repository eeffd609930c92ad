"""Decaying functions Z -> M^ with Z the naturals.

A ``DecayStream`` is a term oracle together with a declared support bound:
``bound(i)`` promises that every z >= bound(i) has a term of order > i, i.e.
vanishing at level i.  ``decay_check`` verifies the promise on a probe window
past the bound.  Finite-support functions at a fixed level are ``FinFn``s and
coherent sequences of them are ``LevelStream``s.
"""

from __future__ import annotations

import threading
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from math import comb

from .coeffs import QQ, Field
from .ideals import normal_form
from .polyring import Polynomial, Vector, vec_add, vec_is_zero, vec_scale, vec_str, vec_sub
from .tower import CoherenceError, TowerElement, ring_module, tower_from_element
from .truncate import ModulePresentation, is_zero_at


class DecayError(ValueError):
    def __init__(self, report: DecayReport):
        self.report = report
        super().__init__(str(report))


class OracleError(RuntimeError):
    pass


# ---------------------------------------------------------------- index sets


def _count(parts: int, total: int) -> int:
    """Number of tuples of ``parts`` naturals summing to ``total``."""
    if parts == 0:
        return 1 if total == 0 else 0
    return comb(total + parts - 1, parts - 1)


def tuple_index(e: Iterable[int]) -> int:
    """Position of e in the enumeration of N^n by total degree, then by
    descending first coordinate, descending second, ..."""
    e = tuple(e)
    n = len(e)
    if n == 0:
        return 0
    d = sum(e)
    rank = comb(d - 1 + n, n) if d > 0 else 0
    left = d
    for j, ej in enumerate(e[:-1]):
        rest = n - j - 1
        rank += sum(_count(rest, left - v) for v in range(ej + 1, left + 1))
        left -= ej
    return rank


def index_tuple(z: int, n: int) -> tuple[int, ...]:
    """Inverse of tuple_index on N^n."""
    if n == 0:
        if z != 0:
            raise ValueError("N^0 has a single element")
        return ()
    d = 0
    while comb(d + n, n) <= z:
        d += 1
    r = z - (comb(d - 1 + n, n) if d > 0 else 0)
    out = []
    left = d
    for j in range(n - 1):
        rest = n - j - 1
        for v in range(left, -1, -1):
            c = _count(rest, left - v)
            if r < c:
                out.append(v)
                left -= v
                break
            r -= c
    out.append(left)
    return tuple(out)


def tuples_upto(n: int, degree: int) -> int:
    """Number of elements of N^n of total degree <= degree."""
    return comb(degree + n, n)


# ---------------------------------------------------------------- finite-support functions


@dataclass
class FinFn:
    """A finite-support function Z -> M_level."""

    module: ModulePresentation
    level: int
    entries: dict[int, Vector] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for z, v in self.entries.items():
            if isinstance(v, Polynomial):
                v = (v,)
            v = tuple(normal_form(p, self.module.ideal, self.level) for p in v)
            if not is_zero_at(v, self.module, self.level):
                clean[z] = v
        self.entries = dict(sorted(clean.items()))

    def get(self, z: int) -> Vector:
        return self.entries.get(z, self.module.zero())

    @property
    def support(self) -> list[int]:
        return list(self.entries)

    def __add__(self, other: FinFn) -> FinFn:
        keys = set(self.entries) | set(other.entries)
        return FinFn(self.module, self.level, {z: vec_add(self.get(z), other.get(z)) for z in keys})

    def scale(self, c: Polynomial) -> FinFn:
        return FinFn(self.module, self.level, {z: vec_scale(c, v) for z, v in self.entries.items()})

    def project(self, level: int) -> FinFn:
        if level > self.level:
            raise ValueError("can only project to a lower level")
        return FinFn(self.module, level, dict(self.entries))

    def equals(self, other: FinFn) -> bool:
        if self.level != other.level:
            return False
        keys = set(self.entries) | set(other.entries)
        return all(is_zero_at(vec_sub(self.get(z), other.get(z)), self.module, self.level) for z in keys)

    def __str__(self):
        if not self.entries:
            return "0"
        return " + ".join(f"({vec_str(v)})*delta({z})" for z, v in self.entries.items())


def delta(z: int, module: ModulePresentation, level: int) -> FinFn:
    """delta_z as a finite-support function at the given level."""
    return FinFn(module, level, {z: module.unit(0)})


def delta_expansion(F: FinFn) -> list[tuple[int, Vector]]:
    """Write F as the finite combination sum_z F(z) delta_z."""
    return list(F.entries.items())


def from_delta_expansion(terms: list[tuple[int, Vector]], module: ModulePresentation, level: int) -> FinFn:
    total = FinFn(module, level)
    for z, v in terms:
        total = total + FinFn(module, level, {z: v})
    return total


class LevelStream:
    """A coherent sequence of finite-support functions, one per level."""

    def __init__(self, module: ModulePresentation, oracle: Callable[[int], FinFn | dict]):
        self.module = module
        self._oracle = oracle
        self._memo: dict[int, FinFn] = {}
        self._lock = threading.Lock()

    def level(self, i: int) -> FinFn:
        F = self._memo.get(i)
        if F is None:
            raw = self._oracle(i)
            F = raw if isinstance(raw, FinFn) else FinFn(self.module, i, dict(raw))
            if F.level != i:
                raise ValueError(f"oracle returned level {F.level} for level {i}")
            for j, other in self._memo.items():
                lo, hi = (F, other) if j > i else (other, F)
                if not hi.project(lo.level).equals(lo):
                    raise CoherenceError(min(i, j), max(i, j))
            with self._lock:
                F = self._memo.setdefault(i, F)
        return F


# ---------------------------------------------------------------- decaying streams


class DecayStream:
    """A function z -> M^ on the naturals with a declared support bound."""

    def __init__(
        self,
        module: ModulePresentation,
        term: Callable[[int], object],
        bound: Callable[[int], int] | None = None,
        label: str = "",
    ):
        self.module = module
        self._term = term
        self.bound = bound
        self.label = label
        self._values: dict[int, TowerElement] = {}
        self._lock = threading.Lock()

    def declared_bound(self, i: int) -> int:
        return 0 if self.bound is None else self.bound(i)

    def value(self, z: int) -> TowerElement:
        x = self._values.get(z)
        if x is None:
            try:
                raw = self._term(z)
            except (ArithmeticError, LookupError, ValueError, TypeError) as err:
                raise OracleError(f"term oracle failed at z={z}: {err}") from err
            x = raw if isinstance(raw, TowerElement) else tower_from_element(raw, self.module)
            with self._lock:
                x = self._values.setdefault(z, x)
        return x

    def at_level(self, z: int, i: int) -> Vector:
        return self.value(z).level(i)

    def nonzero_at(self, z: int, i: int) -> bool:
        """ord(f(z)) <= i, i.e. f(z) does not vanish in M_i."""
        return not is_zero_at(self.at_level(z, i), self.module, i)

    def support(self, i: int) -> list[int]:
        """The threshold-i support {z : ord(f(z)) <= i} within the declared bound."""
        return [z for z in range(self.declared_bound(i)) if self.nonzero_at(z, i)]

    def __repr__(self):
        return f"DecayStream({self.label or '<oracle>'})"


@dataclass
class DecayReport:
    passed: bool
    cap: int
    supports: dict[int, list[int]] = field(default_factory=dict)
    failed_threshold: int | None = None
    witnesses: list[int] = field(default_factory=list)

    def __str__(self):
        if self.passed:
            return f"decaying through threshold {self.cap}"
        return (f"not decaying: threshold {self.failed_threshold} has support beyond the declared "
                f"bound, witnesses {self.witnesses}")


def _threshold_witnesses(f: DecayStream, i: int, probe: int) -> list[int]:
    b = f.declared_bound(i)
    return [z for z in range(b, b + probe) if f.nonzero_at(z, i)]


def decay_check(f: DecayStream, cap: int, probe: int | None = None) -> DecayReport:
    """Verify, for each threshold i <= cap, that nothing past the declared bound
    has order <= i on a window of ``probe`` further indices."""
    probe = cap + 1 if probe is None else probe
    report = DecayReport(True, cap)
    for i in range(cap + 1):
        w = _threshold_witnesses(f, i, probe)
        if w:
            report.passed = False
            report.failed_threshold = i
            report.witnesses = w
            return report
        report.supports[i] = f.support(i)
    return report


def _require_decay(f: DecayStream, cap: int, probe: int | None = None):
    report = decay_check(f, cap, probe)
    if not report.passed:
        raise DecayError(report)


def series_sum(f: DecayStream, cap: int, probe: int | None = None) -> TowerElement:
    """Sum of a decaying stream; level i adds the level-i images over the support."""
    _require_decay(f, cap, probe)
    probe = cap + 1 if probe is None else probe

    def level(i: int) -> Vector:
        if i > cap and _threshold_witnesses(f, i, probe):
            raise DecayError(DecayReport(False, i, failed_threshold=i,
                                         witnesses=_threshold_witnesses(f, i, probe)))
        total = f.module.zero()
        for z in range(f.declared_bound(i)):
            total = vec_add(total, f.at_level(z, i))
        return total

    return TowerElement(f.module, level, label=f"sum {f.label}".strip())


def stream_add(f: DecayStream, g: DecayStream) -> DecayStream:
    if f.module != g.module:
        raise ValueError("streams over different modules")
    return DecayStream(
        f.module,
        lambda z: f.value(z) + g.value(z),
        lambda i: max(f.declared_bound(i), g.declared_bound(i)),
        f"({f.label}) + ({g.label})",
    )


def stream_scale(c, f: DecayStream) -> DecayStream:
    """Multiply every term by a ring element (Polynomial or ring tower)."""
    from .tower import tower_scale

    return DecayStream(f.module, lambda z: tower_scale(c, f.value(z)), f.bound, f"c*({f.label})")


def finite_stream(values: dict[int, object], module: ModulePresentation, label: str = "") -> DecayStream:
    """A stream with finite support given explicitly."""
    zero = module.zero()
    top = max(values, default=-1) + 1
    return DecayStream(module, lambda z: values.get(z, zero), lambda i: top, label)


def delta_stream(z: int, module: ModulePresentation) -> DecayStream:
    return finite_stream({z: module.unit(0)}, module, f"delta({z})")


def constant_stream(value, module: ModulePresentation, bound: Callable[[int], int] | None = None) -> DecayStream:
    """z -> value for every z; decaying only if value is zero."""
    return DecayStream(module, lambda z: value, bound, f"const {value}")


# ---------------------------------------------------------------- homomorphisms


def hom_apply(
    g: DecayStream,
    family: Callable[[int], object],
    cap: int,
    module: ModulePresentation | None = None,
    probe: int | None = None,
) -> TowerElement:
    """phi(g) = sum_z g(z) f(z) for a decaying ring-valued g."""
    if g.module.rank != 1:
        raise ValueError("coefficients must be ring-valued")
    if module is None:
        sample = family(0)
        if not isinstance(sample, TowerElement):
            raise ValueError("pass module= when the family does not return towers")
        module = sample.module
    _require_decay(g, cap, probe)

    def term(z: int) -> TowerElement:
        fz = family(z)
        fz = fz if isinstance(fz, TowerElement) else tower_from_element(fz, module)
        gz = g.value(z)
        return TowerElement(module, lambda i: vec_scale(gz.level(i)[0], fz.level(i)))

    product = DecayStream(module, term, g.bound, f"{g.label} * f")
    return series_sum(product, cap, probe)


def to_level_stream(f: DecayStream, cap: int, probe: int | None = None) -> LevelStream:
    """Image in lim_i F_fin(Z, M_i): level i is z -> pi_i(f(z)) on the threshold-i support."""
    _require_decay(f, cap, probe)
    return LevelStream(f.module, lambda i: FinFn(f.module, i, {z: f.at_level(z, i) for z in f.support(i)}))


def from_level_stream(s: LevelStream, cap: int) -> DecayStream:
    """Assemble term towers from a coherent level stream (checked through cap)."""
    for i in range(cap + 1):
        s.level(i)
    M = s.module

    def term(z: int) -> TowerElement:
        return TowerElement(M, lambda i: s.level(i).get(z))

    def bound(i: int) -> int:
        return max(s.level(i).support, default=-1) + 1

    return DecayStream(M, term, bound, "from level stream")


# ---------------------------------------------------------------- pairing and functoriality


def pairing(f: Callable[[int], Polynomial], g: DecayStream, cap: int, probe: int | None = None) -> TowerElement:
    """<f, g> = sum_z f(z) g(z) for a bounded family f and decaying g."""
    M = g.module

    def term(z: int) -> TowerElement:
        gz = g.value(z)
        fz = f(z)
        return TowerElement(M, lambda i: vec_scale(fz, gz.level(i)))

    return series_sum(DecayStream(M, term, g.bound, "f*g"), cap, probe)


def pullback(h: Callable[[int], int], f: Callable[[int], Polynomial]) -> Callable[[int], Polynomial]:
    """h^*(f) = f o h."""
    return lambda y: f(h(y))


def pushforward(h: Callable[[int], int], g: DecayStream, cap: int, probe: int | None = None) -> DecayStream:
    """h_*(g)(z) = sum of g over the fiber h^{-1}(z)."""
    _require_decay(g, cap, probe)
    M = g.module
    hcache: dict[int, int] = {}

    def hv(y: int) -> int:
        v = hcache.get(y)
        if v is None:
            v = hcache[y] = h(y)
        return v

    def term(z: int) -> TowerElement:
        def level(i: int) -> Vector:
            total = M.zero()
            for y in range(g.declared_bound(i)):
                if hv(y) == z:
                    total = vec_add(total, g.at_level(y, i))
            return total

        return TowerElement(M, level)

    def bound(i: int) -> int:
        return max((hv(y) for y in range(g.declared_bound(i))), default=-1) + 1

    return DecayStream(M, term, bound, f"h_*({g.label})")


def ring_stream(ideal, term: Callable[[int], Polynomial], bound: Callable[[int], int] | None,
                label: str = "", field: Field = QQ) -> DecayStream:
    return DecayStream(ring_module(ideal, field), term, bound, label)


def scanned_bound(term: Callable[[int], Polynomial], module: ModulePresentation, horizon: int,
                  start: int = 0) -> Callable[[int], int]:
    """A support bound read off by evaluating terms z < horizon; decay_check's
    probe then tests the promise past it."""
    memo: dict[int, int] = {}

    def bound(i: int) -> int:
        b = memo.get(i)
        if b is None:
            b = 0
            for z in range(start, horizon):
                v = term(z)
                v = (v,) if isinstance(v, Polynomial) else tuple(v)
                if not is_zero_at(v, module, i):
                    b = z + 1
            memo[i] = b
        return b

    return bound
