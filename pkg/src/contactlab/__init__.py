"""contactlab: a computational workbench for 3-dimensional contact geometry.

Verifies contact conditions symbolically and numerically, computes and
classifies characteristic foliations on parametrized surfaces, extracts
candidate dividing sets with certificates, and provides a combinatorial
engine for Legendrian front diagrams with classical invariants, moves,
and Bennequin-inequality checking.
"""

from . import approx, contact, dividing, foliation, forms, fronts, moves, seifert, spacecurve, surfaces

__all__ = [
    "approx",
    "contact",
    "dividing",
    "foliation",
    "forms",
    "fronts",
    "moves",
    "seifert",
    "spacecurve",
    "surfaces",
]

__version__ = "0.1.0"
