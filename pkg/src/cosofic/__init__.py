"""Exact computations with subgroups of wreath products of abelian groups.

Goursat triplets, permutational modules, Chabauty-space statistics and the
finite-index approximation pipeline for the lamplighter and its relatives.
"""

from .fg_abelian import INFINITE, AbelianSubgroup, FgAbelianGroup
from .perm_module import FiniteX, LaurentIdeal, PermModule, QSet
from .wreath import GoursatTriplet, GroupElement, TransversalSpec, WreathGroup

__version__ = "0.1.0"

__all__ = ["INFINITE", "AbelianSubgroup", "FgAbelianGroup", "FiniteX", "LaurentIdeal",
           "PermModule", "QSet", "GoursatTriplet", "GroupElement", "TransversalSpec",
           "WreathGroup"]
