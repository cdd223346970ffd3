"""Matrix-free FFT-preconditioned FE homogenization on periodic grids."""

from homfe._core import (
    Grid,
    Material,
    NumericalSolverError,
    Preconditioner,
    ValidationError,
    apply_operator,
    apply_preconditioner,
    assemble_preconditioner,
    coated_sphere_phases,
    divergence_apply,
    eigenvalue_bounds,
    from_mandel,
    gamma_apply,
    gradient_apply,
    isotropic_stiffness,
    mandel_dim,
    mandel_identity,
    newton_solve,
    random_two_phase,
    run_problem,
    square_inclusion_phases,
    to_mandel,
    volume_average,
)

__all__ = [
    "Grid",
    "Material",
    "NumericalSolverError",
    "Preconditioner",
    "ValidationError",
    "apply_operator",
    "apply_preconditioner",
    "assemble_preconditioner",
    "coated_sphere_phases",
    "divergence_apply",
    "eigenvalue_bounds",
    "from_mandel",
    "gamma_apply",
    "gradient_apply",
    "isotropic_stiffness",
    "mandel_dim",
    "mandel_identity",
    "newton_solve",
    "random_two_phase",
    "run_problem",
    "square_inclusion_phases",
    "to_mandel",
    "volume_average",
]
