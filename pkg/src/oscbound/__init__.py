"""oscbound: numerical checks for an oscillation-vs-norm interpolation bound.

Library layout (one module per concern):

- geometry: domains, diameters, interior-sphere / cone / John certificates
- coefficients: elliptic coefficient fields with certified eigenvalue bounds
- meshing / solver: deterministic triangulation and the P1 Galerkin solve
- norms: Hölder seminorm, normalized L^p norms, boundary oscillation
- meanvalue: ball / ellipsoid mean-value families and their property checks
- inequality: explicit bound constants, optimal probe depth, verification,
  extremal search
- config / runner / cli: the `oscbound` command line harness
"""

from .coefficients import (CoefficientField, checkerboard_field, constant_field,
                           identity_field, make_field, matrix_sqrt, random_cell_field,
                           verify_ellipticity)
from .geometry import (ConeCertificate, Disk, Domain, Ellipse, JohnCertificate, Polygon,
                       boundary_sample, cone_parameters, diameter_and_measure,
                       interior_sphere_radius, john_parameters, unit_square,
                       validate_cone, validate_john)
from .inequality import (ExtremalResult, GeometryKind, InequalityReport, ball_kind,
                         cone_kind, extremal_search, john_kind, k_bound,
                         mean_value_constants, minimized_rhs, optimal_sigma,
                         rhs_of_sigma, smooth_kind, verify_inequality)
from .meanvalue import (MeanValueFamily, MeanValueReport, build_family,
                        check_mean_value_property, set_average)
from .meshing import Mesh, TriLocator, mesh_domain, read_mesh, write_mesh
from .norms import (NormReport, boundary_oscillation, compute_norm_report,
                    holder_seminorm, mean_value, normalized_lp_norm)
from .solver import (Provenance, ResidualReport, SolutionSample,
                     assemble_and_solve_dirichlet, assemble_stiffness, l2_error,
                     reference_solution, weak_subsolution_residual)

__version__ = "0.1.0"
