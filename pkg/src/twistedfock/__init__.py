"""Twisted vertex operator construction of the level-one A_{2l}^{(2)} modules."""

from .lattice import Lattice, LatticeVector, RootClass, lattice
from .scalar import Cyclo8
from .fock import FockMonomial, FockSpace, FockVector, fock_space
from .vertex import PhaseConvention, VertexEngine, engine

__all__ = [
    "Cyclo8", "FockMonomial", "FockSpace", "FockVector", "Lattice", "LatticeVector",
    "PhaseConvention", "RootClass", "VertexEngine", "engine", "fock_space", "lattice",
]
__version__ = "0.1.0"
