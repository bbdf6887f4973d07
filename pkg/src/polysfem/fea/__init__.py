"""Materials, assembly, solution, error norms and exact fields."""
from .analytic import (
    FIELDS,
    FieldSample,
    analytical_field,
    edge_crack_correction,
    field_material,
    reference_sif,
    williams_eigenvalue,
)
from .assembly import (
    BoundaryConditions,
    Formulation,
    GlobalSystem,
    Solution,
    assemble,
    assemble_and_solve,
    element_stiffness,
    refine_crack_tips,
    solve,
    solve_system,
    stress_intensity_factors,
    tagged_nodes,
)
from .material import Material, constitutive_matrix
from .norms import convergence_rate, error_norms

__all__ = [
    "FIELDS", "FieldSample", "analytical_field", "edge_crack_correction", "field_material", "reference_sif",
    "williams_eigenvalue", "BoundaryConditions", "Formulation", "GlobalSystem", "Solution", "assemble",
    "assemble_and_solve", "element_stiffness", "refine_crack_tips", "solve", "solve_system",
    "stress_intensity_factors", "tagged_nodes", "Material", "constitutive_matrix", "convergence_rate",
    "error_norms",
]
