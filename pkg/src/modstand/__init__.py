"""modstand: a verification toolkit for modular theory at matrix scale.

Computes modular objects of standard subspaces of C^d, Tomita data of
finite-dimensional von Neumann algebras, exact fermionic and coherent-level
bosonic second quantization, Minkowski wedge geometry, and discretized
positive-energy models of the affine group of the real line, and checks the
defining identities of each construction as executable properties.
"""

from . import (
    affine,
    errors,
    fock,
    groupreps,
    realified,
    reporting,
    standard,
    vonneumann,
    wedges,
)

__all__ = [
    "affine",
    "errors",
    "fock",
    "groupreps",
    "realified",
    "reporting",
    "standard",
    "vonneumann",
    "wedges",
]

__version__ = "0.1.0"
