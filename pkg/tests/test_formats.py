import pytest

from adic.coeffs import GF
from adic.formats import FormatError, format_module, parse_elements, parse_module, parse_system
from adic.ideals import variable_ideal
from adic.lift import basis_lift
from adic.polyring import t

MODULE = """# two generators
field: Q
ideal: vars t1 t2
gens: 2
rel: t1, -t2
"""


def test_parse_module():
    M = parse_module(MODULE)
    assert M.rank == 2 and M.ideal == variable_ideal(1, 2)
    assert M.relations == ((t(1), -t(2)),)
    assert parse_module(format_module(M)) == M


def test_prime_field_module():
    M = parse_module("field: Fp 5\nideal: vars t1\ngens: 1\nrel: 6*t1\n")
    assert M.field == GF(5) and str(M.relations[0][0]) == "t1"


@pytest.mark.parametrize("text, line", [
    ("gens: 2\nrel: t1\n", 2),
    ("gens: x\n", 1),
    ("rel: t1\n", 1),
    ("gens: 1\nrel: t1^\n", 2),
    ("foo: 1\ngens: 1\n", 1),
])
def test_module_errors(text, line):
    with pytest.raises(FormatError) as exc:
        parse_module(text)
    assert exc.value.line == line


def test_parse_elements():
    M = parse_module(MODULE)
    assert parse_elements("t1, 0\n\n1, t2  # comment\n", M) == [(t(1), 0 * t(1)), (1 + 0 * t(1), t(2))]


SYSTEM = """ideal: vars t1
level 0:
gens: 2
level 1:
gens: 2
psi: 1, t1; 0, 1
level 2:
gens: 2
psi: 1, 0; t1, 1
"""


def test_parse_system():
    sys = parse_system(SYSTEM)
    assert sys.max_level == 2
    assert basis_lift(sys, 2).report.success
    with pytest.raises(ValueError):
        sys.module(3)


@pytest.mark.parametrize("text", [
    "level 0:\ngens: 1\nlevel 2:\ngens: 1\npsi: 1\n",
    "level 0:\ngens: 1\nlevel 1:\ngens: 1\n",
    "level 0:\ngens: 1\npsi: 1\n",
    "gens: 1\n",
    "level 0:\ngens: 1\nlevel 1:\ngens: 1\npsi: 1; 1\n",
])
def test_system_errors(text):
    with pytest.raises(FormatError):
        parse_system(text)
