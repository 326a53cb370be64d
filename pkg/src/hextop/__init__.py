"""Compliance topology optimisation on regular hexagonal (honeycomb) meshes."""
from .config import RunConfig
from .element import MaterialModel, simp_dmodulus, simp_modulus, wachspress_k0
from .fea import InsufficientConstraintsError, LoadSet, assemble, element_energies, solve
from .filters import FilterMode, build_filter
from .honeymesh import HexMesh, MeshSpec, build_mesh
from .kernels import BACKEND as KERNEL_BACKEND
from .optimizer import DesignState, oc_update, optimize, run
from .problems import Problem, make_problem

__version__ = "0.1.0"

__all__ = [
    "DesignState", "FilterMode", "HexMesh", "InsufficientConstraintsError", "KERNEL_BACKEND",
    "LoadSet", "MaterialModel", "MeshSpec", "Problem", "RunConfig", "assemble", "build_filter",
    "build_mesh", "element_energies", "make_problem", "oc_update", "optimize", "run",
    "simp_dmodulus", "simp_modulus", "solve", "wachspress_k0",
]
