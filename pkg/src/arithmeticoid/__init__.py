"""Adelic arithmeticoids: deformed local points on arithmetic curves and their heights.

The central names re-exported here cover the everyday workflow: build a number
field, pick a carrier of local points, deform or twist it, and measure.  The
heavier toolkits (tilt, cohomology, szpiro, cli) stay behind their own module
imports so that light uses do not pay for numpy or sympy warm-up.
"""

from .numfield import (
    FieldElement,
    NumberField,
    Place,
    archimedean_place,
    places_over,
    places_up_to,
    product_formula_check,
    roots_of_unity,
)
from .adelic import (
    Arithmeticoid,
    deform,
    distance,
    global_frobenius,
    lstar_act,
    make_arithmeticoid,
    normalization_coordinate,
    period_map,
    stabilizer_check,
    standard_arithmeticoid,
)
from .heights import (
    Frobenioid,
    arithmetic_degree,
    scalar_height,
    stabilized_height,
)

__version__ = "0.1.0"

__all__ = [
    "FieldElement",
    "NumberField",
    "Place",
    "archimedean_place",
    "places_over",
    "places_up_to",
    "product_formula_check",
    "roots_of_unity",
    "Arithmeticoid",
    "deform",
    "distance",
    "global_frobenius",
    "lstar_act",
    "make_arithmeticoid",
    "normalization_coordinate",
    "period_map",
    "stabilizer_check",
    "standard_arithmeticoid",
    "Frobenioid",
    "arithmetic_degree",
    "scalar_height",
    "stabilized_height",
    "__version__",
]
