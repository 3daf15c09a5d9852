"""Numerical stability spectra of surfaces in the 3-sphere and warped products.

Pipeline: analytic charts over structured grids -> discrete surface
geometry (metric, second fundamental form, curvatures) -> symmetric
generalized eigenproblem for the stability operator -> eigenvalue bounds
(theorem checks), conformal balancing certificates, and refinement
studies with machine-readable reports.
"""

from .errors import (
    AssemblyError,
    ConfigError,
    DegenerateChartError,
    DomainError,
    HypothesisError,
    MeshTooCoarseError,
    NonConvergenceError,
    StabspecError,
    UnsupportedAmbientError,
)
from .warping import (
    AmbientCurvature,
    SliceData,
    WarpingFunction,
    ambient_ricci,
    builtin_warping,
    condition_strictness,
    convexity_condition,
    harmonic_multiplicity,
    polynomial_warping,
    ricci_direction,
    slice_data,
    slice_eigenvalue_band,
    slice_lambda2,
    slice_spectrum,
    space_form_defect,
    trigonometric_warping,
)
from .grids import Grid, sphere_grid, torus_grid
from .charts import NumericChart, SymbolicChart, real_sph_harm
from .surfaces import (
    GeometryFields,
    ImmersedSurface,
    Sphere3,
    WarpedProduct,
    area,
    compute_geometry,
    euler_characteristic,
    gauss_equation_residual,
    load_surface,
    save_surface,
    total_curvature,
)
from .catalog import (
    ShapeSpec,
    build,
    clifford_torus,
    exact_jacobi_spectrum,
    flat_torus,
    geodesic_sphere,
    graph_over_slice,
    perturbed_torus,
    registered_perturbations,
    slice_shape,
)
from .assembly import OperatorPencil, assemble, export_pencil, load_pencil, rayleigh
from .eigen import (
    Spectrum,
    cluster_indices,
    eigenvalue_multiplicity,
    lambda2,
    smallest_eigenpairs,
)
from .conformal import (
    MobiusParam,
    balanced_bound_report,
    balanced_rayleigh_bound,
    conformal_willmore_invariant,
    dirichlet_energy_check,
    hersch_balance,
    mobius_apply,
    mobius_image_surface,
    willmore_type_inequality_check,
)
from .harness import (
    ConvergenceStudy,
    ResolutionResult,
    TheoremReport,
    balance_bound_scenario,
    check_esi,
    check_theorem,
    check_theorem_11,
    check_theorem_12,
    check_theorem_13,
    convergence_study,
    observed_order,
    report_tolerance,
    richardson_extrapolate,
    slice_spectrum_report,
    sweep_flat_torus,
    sweep_graph_amplitude,
    write_csv_summary,
    write_json_report,
)

__version__ = "0.1.0"
