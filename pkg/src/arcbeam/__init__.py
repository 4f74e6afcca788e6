"""Geometrically exact planar curved beams by the shooting method.

Each element is integrated explicitly along its arc length from left-end
forces to right-end displacements; a Newton iteration on those forces
("shooting") turns the element into a displacement-based unit that a frame
solver assembles and drives along nonlinear equilibrium paths.
"""

from .element import (
    BeamElement,
    DivergedMarch,
    ElementError,
    MarchTrace,
    NoConvergence,
    ShootOptions,
    ShootResult,
    SingularJacobian,
)
from .geometry import (
    build_grid,
    parabola_from_span,
    parabola_pieces,
    shape_circle,
    shape_logspiral,
    shape_parabola,
    shape_straight,
    shape_zigzag,
)
from .model_io import SchemaError, build_structure, load_model, parse_model
from .section import Inertia, Law, SectionModel, straightening_moment
from .solver import (
    ArcLength,
    DisplacementControl,
    IndirectControl,
    LoadControl,
    PathFailure,
    SolverError,
    SolverOptions,
    StructureModel,
    initial_stiffness_ratio,
    solve_path,
    steps_to,
)

__version__ = "0.1.0"

__all__ = [
    "BeamElement", "DivergedMarch", "ElementError", "MarchTrace", "NoConvergence", "ShootOptions",
    "ShootResult", "SingularJacobian", "build_grid", "parabola_from_span", "parabola_pieces",
    "shape_circle", "shape_logspiral", "shape_parabola", "shape_straight", "shape_zigzag",
    "SchemaError", "build_structure", "load_model", "parse_model", "Inertia", "Law", "SectionModel",
    "straightening_moment", "ArcLength", "DisplacementControl", "IndirectControl", "LoadControl",
    "PathFailure", "SolverError", "SolverOptions", "StructureModel", "initial_stiffness_ratio",
    "solve_path", "steps_to",
]
