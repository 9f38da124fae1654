"""Quantized flag manifolds: representation theory of C_q[U/K_S] at desk scale."""
from __future__ import annotations

from .rootdata import RootSystem, Weight, build_root_system
from .uqmod import Backend, UqModule, build_irreducible, decompose_highest_weights, tensor
from .weyl import WeylWord

__version__ = "0.1.0"

__all__ = ["RootSystem", "Weight", "build_root_system", "Backend", "UqModule",
           "build_irreducible", "decompose_highest_weights", "tensor", "WeylWord", "__version__"]
