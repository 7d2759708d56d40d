"""Symmetry groups of the planar three-body action and equivariant minimizers."""

from .groups import (
    GroupElement,
    Masses,
    O2Elem,
    Perm3,
    SymmetryGroup,
    generate_closure,
    named_group,
)
from .loops import Loop
from .action import MinimizeResult, minimize

__all__ = [
    "GroupElement",
    "Masses",
    "O2Elem",
    "Perm3",
    "SymmetryGroup",
    "generate_closure",
    "named_group",
    "Loop",
    "MinimizeResult",
    "minimize",
]

__version__ = "0.1.0"
