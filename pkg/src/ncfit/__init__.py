"""Exact non-commutative Fitting invariants, characteristic elements and
higher special elements over p-local group rings."""

from .errors import ArtifactError
from .group_algebra import CentralElement, GroupAlgebra, GroupData, GroupRingElement
from .group_data import BUILTIN_GROUPS, builtin
from .scalars import CycloElement

__version__ = "0.1.0"

__all__ = ["ArtifactError", "BUILTIN_GROUPS", "CentralElement", "CycloElement",
           "GroupAlgebra", "GroupData", "GroupRingElement", "builtin"]
