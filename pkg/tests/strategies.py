from fractions import Fraction

from hypothesis import strategies as st

from adic.coeffs import GF, QQ
from adic.polyring import Polynomial

small_fraction = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))


def monomial(max_var: int = 3, max_exp: int = 3):
    return st.dictionaries(st.integers(1, max_var), st.integers(1, max_exp), max_size=max_var).map(
        lambda d: tuple(sorted(d.items())))


def polynomial(max_var: int = 3, max_exp: int = 3, max_terms: int = 4, field=QQ):
    coeff = small_fraction if field == QQ else st.integers(0, field.p - 1)
    return st.dictionaries(monomial(max_var, max_exp), coeff, max_size=max_terms).map(
        lambda d: Polynomial(d, field))


GF5 = GF(5)
