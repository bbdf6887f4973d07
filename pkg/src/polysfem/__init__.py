"""Polygonal and polyhedral elements for small-strain linear elasticity.

Strain-smoothed (SFEM), virtual (VEM), stabilized one-subcell and
scaled-boundary (SBFEM) element stiffnesses, with global assembly,
exact reference fields and the benchmark drivers used by the CLI.
"""
from ._kernels import BACKEND as KERNEL_BACKEND
from .element import ElementStiffness
from .errors import (
    ConstraintDeficiencyError,
    DegenerateElementError,
    FormulaRangeError,
    InvalidScalingCentreError,
    JacobianError,
    MeshLoadError,
    ModalSelectionError,
    NoSingularModeError,
    OutOfDomainError,
    PolySfemError,
    RankDeficientError,
    UnsupportedFaceError,
)
from .fea import (
    BoundaryConditions,
    Formulation,
    Material,
    analytical_field,
    assemble,
    assemble_and_solve,
    constitutive_matrix,
    convergence_rate,
    error_norms,
    reference_sif,
    stress_intensity_factors,
)
from .mesh import (
    PolyMesh2D,
    PolyMesh3D,
    generate_structured_hex_mesh,
    generate_structured_quad_mesh,
    load_mesh,
    save_mesh,
)
from .sbfem import sbfem_element, sbfem_modal_data, sbfem_stiffness
from .smoothing import sfem_stiffness_2d, sfem_stiffness_3d
from .stab import stabilized_stiffness, stabilized_stiffness_2d, stabilized_stiffness_3d
from .vem import vem_elasticity_2d_stiffness, vem_elasticity_3d_stiffness, vem_scalar_stiffness

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND", "ElementStiffness",
    "ConstraintDeficiencyError", "DegenerateElementError", "FormulaRangeError", "InvalidScalingCentreError",
    "JacobianError", "MeshLoadError", "ModalSelectionError", "NoSingularModeError", "OutOfDomainError",
    "PolySfemError", "RankDeficientError", "UnsupportedFaceError",
    "BoundaryConditions", "Formulation", "Material", "analytical_field", "assemble", "assemble_and_solve",
    "constitutive_matrix", "convergence_rate", "error_norms", "reference_sif", "stress_intensity_factors",
    "PolyMesh2D", "PolyMesh3D", "generate_structured_hex_mesh", "generate_structured_quad_mesh", "load_mesh",
    "save_mesh", "sbfem_element", "sbfem_modal_data", "sbfem_stiffness", "sfem_stiffness_2d", "sfem_stiffness_3d",
    "stabilized_stiffness", "stabilized_stiffness_2d", "stabilized_stiffness_3d", "vem_elasticity_2d_stiffness",
    "vem_elasticity_3d_stiffness", "vem_scalar_stiffness",
]
