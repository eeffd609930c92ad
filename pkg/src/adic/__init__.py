"""Exact computations with adic completions at finite truncation."""

from .coeffs import GF, QQ, Field
from .decay import DecayStream, decay_check, hom_apply, series_sum
from .ideals import ALL_VARIABLES, GeneralIdeal, VariableIdeal, normal_form, ord_ring, parse_ideal, variable_ideal
from .lift import AdicSystem, basis_lift, free_cover, lift_along_surjection, nakayama_lift
from .parsing import ParseError, parse_polynomial, parse_stream
from .polyring import Polynomial, t
from .tower import TowerElement, ord_adic_bounds, ord_prime, ring_module, theorem6_check, tower_from_element
from .truncate import ModulePresentation, truncate

__version__ = "0.1.0"
