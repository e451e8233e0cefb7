from .utils import (
    finite_difference_charge_element,
    finite_difference_spectrum,
    hermite_functions,
    lowering_operator,
    thermal_occupation,
)

__all__ = [
    "lowering_operator",
    "hermite_functions",
    "thermal_occupation",
    "finite_difference_spectrum",
    "finite_difference_charge_element",
]
