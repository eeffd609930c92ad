import random

import pytest

from adic.decay import DecayStream, decay_check, finite_stream, series_sum
from adic.ideals import normal_form, variable_ideal
from adic.lift import (
    AdicSystem,
    NotAdicSystem,
    NotFlat,
    NotGenerating,
    NotSurjective,
    apply_matrix,
    basis_lift,
    free_cover,
    lift_along_surjection,
    nakayama_lift,
    truncated_inverse,
)
from adic.polyring import Polynomial, t
from adic.samples import random_poly
from adic.tower import ord_prime, ring_module, tower_from_element
from adic.truncate import ModulePresentation, is_zero_at, ord_module
from oracles import geometric_inverse

A1 = variable_ideal(1)
R1 = ring_module(A1)
one = Polynomial.constant(1)
zero = Polynomial.zero()


def poly_from_coeffs(cs):
    return Polynomial({((1, k),) if k else (): c for k, c in enumerate(cs)})


def test_nakayama_geometric():
    res = nakayama_lift(tower_from_element((one,), R1), [(1 + t(1),)], 6)
    assert res.report.success
    g = res.coefficients
    for i in range(7):
        assert g.at_level(0, i)[0] == poly_from_coeffs(geometric_inverse(1, i))
    assert decay_check(g, 6).passed


def test_nakayama_identity_family():
    M = ModulePresentation.free(2, variable_ideal(1, 2))
    m = (1 + t(2), t(1) ** 2)
    res = nakayama_lift(tower_from_element(m, M), [M.unit(0), M.unit(1)], 4)
    for i in range(5):
        assert res.coefficients.at_level(0, i)[0] == normal_form(m[0], M.ideal, i)
        assert res.coefficients.at_level(1, i)[0] == normal_form(m[1], M.ideal, i)


def test_nakayama_not_generating():
    with pytest.raises(NotGenerating):
        nakayama_lift(tower_from_element((one,), R1), [(t(1),)], 3)


def test_nakayama_stream_family():
    fam = DecayStream(R1, lambda z: (1 + t(1) if z == 0 else t(1) ** z,), lambda i: i + 1)
    m = tower_from_element((1 + t(1) ** 2,), R1)
    res = nakayama_lift(m, fam, 5)
    assert res.report.success


def test_nakayama_coherent_coefficients():
    M = ModulePresentation(2, ((t(1), -t(2)),), variable_ideal(1, 2))
    fam = [(1 + t(1), t(2)), (t(1), 1 - t(2))]
    res = nakayama_lift(tower_from_element((t(2), one), M), fam, 5)
    assert res.report.success
    for z in range(2):
        x = res.coefficients.value(z)
        for i in range(5):
            assert normal_form(x.level(i + 1)[0], M.ideal, i) == x.level(i)[0]


def test_lift_along_projection():
    target = ModulePresentation(1, ((t(1) ** 2,),), A1)
    phi = [[one]]
    f = finite_stream({0: (t(1),), 2: (1 + t(1),)}, target)
    g = lift_along_surjection(phi, R1, f, 4)
    for z in range(3):
        for i in range(5):
            assert is_zero_at(tuple(a - b for a, b in zip(apply_matrix(phi, g.at_level(z, i)), f.at_level(z, i))),
                              target, i)
    assert g.at_level(0, 3) == (t(1),)


def test_lift_zero_stream():
    g = lift_along_surjection([[one]], R1, finite_stream({}, R1), 3)
    assert series_sum(g, 3).level(3)[0].is_zero()


def test_lift_not_surjective():
    with pytest.raises(NotSurjective):
        lift_along_surjection([[t(1)]], R1, finite_stream({0: (one,)}, R1), 3)


def test_lift_preserves_order_random():
    rng = random.Random(21)
    a = variable_ideal(1, 2)
    target = ModulePresentation(1, ((t(1) * t(2),),), a)
    source = ModulePresentation.free(2, a)
    for _ in range(10):
        phi = [[1 + random_poly(rng, (1, 2), 2, min_degree=1), random_poly(rng, (1, 2), 2)]]
        values = {z: (random_poly(rng, (1, 2), z + 2, min_degree=z),) for z in range(5)}
        f = finite_stream(values, target)
        g = lift_along_surjection(phi, source, f, 5)
        for z in range(5):
            for i in range(6):
                img = apply_matrix(phi, g.at_level(z, i))
                assert is_zero_at((img[0] - f.at_level(z, i)[0],), target, i)
            o_f = ord_prime(f.value(z), 5)
            assert ord_prime(g.value(z), 5).floor >= o_f.floor


def test_lift_phi_must_respect_relations():
    target = ModulePresentation.free(1, A1)
    source = ModulePresentation(1, ((t(1),),), A1)
    with pytest.raises(ValueError):
        lift_along_surjection([[one]], source, finite_stream({}, target), 2)


def test_basis_lift_identity():
    bl = basis_lift(AdicSystem.constant(ModulePresentation.free(1, A1)), 4)
    assert bl.report.success
    assert all(v == (one,) for v in bl.basis[0])


def twisted_system(rank=2):
    M = ModulePresentation.free(rank, A1)

    def psi(i):
        return [[one if r == c else (t(1) if c == r + 1 else zero) for c in range(rank)] for r in range(rank)]

    return AdicSystem(lambda i: M, psi)


def test_basis_lift_twisted():
    bl = basis_lift(twisted_system(), 5)
    assert bl.report.success
    assert all("verified" in n for n in bl.report.notes)
    # the lifts really are preimages: psi_i(b_(i+1)) = b_i in M_i
    sys = twisted_system()
    for z in range(2):
        for i in range(5):
            img = apply_matrix(sys.transition(i), bl.basis[z][i + 1])
            assert is_zero_at(tuple(a - b for a, b in zip(img, bl.basis[z][i])), sys.module(i), i)


def test_basis_lift_not_flat():
    K = ModulePresentation(1, ((t(1),),), A1)
    sys = AdicSystem(lambda i: K, lambda i: [[one]])
    with pytest.raises(NotFlat) as exc:
        basis_lift(sys, 3)
    assert exc.value.level == 1


def test_not_adic_system():
    M = ModulePresentation.free(1, A1)
    sys = AdicSystem(lambda i: M, lambda i: [[t(1)]])
    with pytest.raises(NotAdicSystem):
        basis_lift(sys, 2)


def test_truncated_inverse():
    C = [[1 + t(1), t(1)], [t(1) ** 2, 2 - t(1)]]
    inv = truncated_inverse(C, A1, 4)
    for r in range(2):
        for c in range(2):
            entry = normal_form(sum((C[r][k] * inv[k][c] for k in range(2)), zero), A1, 4)
            assert entry == (1 if r == c else 0)


def test_free_cover_examples():
    M = ModulePresentation(1, ((t(1) ** 2,),), A1)
    fc = free_cover(M, 4)
    assert fc.size == 1 and all(fc.surjective.values())
    assert fc.in_kernel((t(1) ** 2,), 4)
    free = free_cover(ModulePresentation.free(1, A1), 4)
    assert all(free.surjective.values()) and all(free.isomorphism.values())
    M2 = ModulePresentation(2, ((t(1), -t(2)),), variable_ideal(1, 2))
    fc2 = free_cover(M2, 3)
    assert all(fc2.surjective.values())
    assert (t(1), -t(2)) in fc2.kernel_samples
    assert fc2.kernel_basis


def test_free_cover_phi():
    M = ModulePresentation(1, ((t(1) ** 2,),), A1)
    fc = free_cover(M, 3)
    g = finite_stream({0: (1 + t(1),)}, R1)
    assert fc.phi(g, 3).level(3) == (1 + t(1),)
