"""Numerical toolkit for minimal surfaces in the unit 5-sphere.

Implements adapted moving frames, the two normal-rotation transforms and
their sequences, integrability residuals, frame integration, the bipolar
construction from minimal surfaces in the 3-sphere, and the ruled
Lagrangian lift frame.
"""

from s5surf.errors import (
    CircularEllipse,
    DegenerateEllipse,
    GramDrift,
    InadmissibleT,
    NonconstantQ,
    PositivityViolation,
    SequenceBreak,
    StructureViolation,
    SubstitutionDomain,
)
from s5surf.grids import (
    Grid2,
    S3Surface,
    SampledSurface,
    adapt_coordinate,
    clifford_torus,
    lawson_torus,
    read_s3,
    read_surface,
    write_s3,
    write_surface,
)
from s5surf.frames import FrameField, build_frame, classify_ellipse, minimality_report
from s5surf.transforms import (
    EpsilonJet,
    epsilon_jet,
    gamma_invariant,
    sequence,
    sequence_coupling_residuals,
    transform,
)
from s5surf.integrability import (
    InvariantTriple,
    SymmetricInvariants,
    integrate_frame_F,
    integrate_s3_frame,
    residual_sinh_gordon,
    residual_system_B,
    residual_system_F,
    sinh_gordon_1d,
    substitute,
)
# the bipolar construction itself lives on the submodule (s5surf.bipolar.bipolar)
from s5surf.bipolar import (
    bipolar_complex_check,
    check_s3_minimal,
    verify_theorem7,
)
from s5surf.lift import (
    LiftFrame,
    bipolar_lift,
    build_U,
    horizontal_lift,
    lift_coefficients,
    omega_forms_and_Omega,
)

__all__ = [
    "CircularEllipse",
    "DegenerateEllipse",
    "EpsilonJet",
    "FrameField",
    "GramDrift",
    "Grid2",
    "InadmissibleT",
    "InvariantTriple",
    "LiftFrame",
    "NonconstantQ",
    "PositivityViolation",
    "S3Surface",
    "SampledSurface",
    "SequenceBreak",
    "StructureViolation",
    "SubstitutionDomain",
    "SymmetricInvariants",
    "adapt_coordinate",
    "bipolar_complex_check",
    "bipolar_lift",
    "build_U",
    "build_frame",
    "check_s3_minimal",
    "classify_ellipse",
    "clifford_torus",
    "epsilon_jet",
    "gamma_invariant",
    "horizontal_lift",
    "integrate_frame_F",
    "integrate_s3_frame",
    "lawson_torus",
    "lift_coefficients",
    "minimality_report",
    "omega_forms_and_Omega",
    "read_s3",
    "read_surface",
    "residual_sinh_gordon",
    "residual_system_B",
    "residual_system_F",
    "sequence",
    "sequence_coupling_residuals",
    "sinh_gordon_1d",
    "substitute",
    "transform",
    "verify_theorem7",
    "write_s3",
    "write_surface",
]

__version__ = "0.1.0"
