"""Fractional differentiation matrices on Jacobi-Gauss-Lobatto grids and collocation solvers."""

from .grids import AffineMap, Family, Grid, jgl_grid, make_grid
from .jacobi import JacobiParams, PoleError, jacobi_eval, jacobi_table
from .matrices import (
    DiffMatrix,
    Kind,
    OperatorSpec,
    caputo_matrix_left,
    caputo_matrix_right,
    classical_matrix,
    frac_integral_matrix,
    modal_map,
    operator_matrix,
    riesz_constant,
    riesz_matrix,
    rl_matrix,
)
from .radius import RadiusRecord, Variant, model_matrix, radius_sweep, spectral_radius
from .solvers import (
    BagleyTorvikProblem,
    DiffusionProblem,
    SingularSystemError,
    SolveReport,
    solve_bagley_torvik,
    solve_bagley_torvik_bvp,
    solve_bagley_torvik_ivp,
    solve_fractional_diffusion,
)

__version__ = "0.1.0"
