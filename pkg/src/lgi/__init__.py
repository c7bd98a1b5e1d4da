"""Symplectic invariants of rank 1 curves in Lagrange Grassmannians.

The main entry points are

* :func:`canonical_frame`, which takes a curve (graph, generator or frame
  jet) to its canonical moving frame and modified curvatures ``lam_i``;
* :func:`generating_function` and :func:`principal_curvatures`, the
  classical invariants ``beta_i``;
* :func:`synthesize_local` and :func:`synthesize_interval`, which build the
  curve with prescribed curvatures;
* :func:`roundtrip`, which composes the two directions.

Computations run on jets (truncated Taylor series) over either the float
ring or the exact rational ring, chosen with ``ring="float"`` or
``ring="rational"``.  ``BACKEND`` names the compiled or pure kernel set.
"""

from .curves import (
    ExprGeneratorCurve,
    ExprGraphCurve,
    FrameCurve,
    GeneratorCurve,
    GraphCurve,
    flag,
    graph_from_basis,
    graph_from_frame,
    to_graph,
    weight,
)
from .errors import (
    DomainError,
    LGIError,
    MathError,
    NotAmpleError,
    NotDivisibleError,
    ParseError,
    RankError,
    SpecError,
    StructureError,
    ToleranceError,
)
from .frame import canonical_frame
from .invariants import cross_ratio, generating_function, principal_curvatures, trace_asymptotic_check
from .kernels import BACKEND
from .rings import FLOAT, RATIONAL, get_ring
from .series import Jet, Jet2
from .symplectic import DarbouxFrame, random_symplectic, rational_symplectic, sigma
from .synthesis import CurvatureSpec, LambdaCurve, roundtrip, synthesize_interval, synthesize_local

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CurvatureSpec",
    "DarbouxFrame",
    "DomainError",
    "ExprGeneratorCurve",
    "ExprGraphCurve",
    "FLOAT",
    "FrameCurve",
    "GeneratorCurve",
    "GraphCurve",
    "Jet",
    "Jet2",
    "LGIError",
    "LambdaCurve",
    "MathError",
    "NotAmpleError",
    "NotDivisibleError",
    "ParseError",
    "RATIONAL",
    "RankError",
    "SpecError",
    "StructureError",
    "ToleranceError",
    "canonical_frame",
    "cross_ratio",
    "flag",
    "generating_function",
    "get_ring",
    "graph_from_basis",
    "graph_from_frame",
    "principal_curvatures",
    "random_symplectic",
    "rational_symplectic",
    "roundtrip",
    "sigma",
    "synthesize_interval",
    "synthesize_local",
    "to_graph",
    "trace_asymptotic_check",
    "weight",
]
