"""Численное ядро: сетка, потоки, шаги по времени, аудит массы."""

from .conservation import (
    CompensatedSum,
    DriftReport,
    ErrorMetrics,
    ExactSolution,
    FaceFluxes,
    InitialData,
    MassLedger,
    SummationMode,
    discretization_error,
    drift,
    error_metrics,
    exact_eval,
    face_fluxes,
    initial_library,
    initial_mass,
    mass,
    mass_fv,
    mass_nodal,
    side_masses,
    total_sum,
)
from .fluxes import (
    CouplingKind,
    CouplingSpec,
    FluxStencil,
    channel_flux,
    general_flux,
    heat_flux,
    membrane_flux,
)
from .grid import (
    BiDomainState,
    BoundaryKind,
    Grid,
    GridKind,
    SchemeConfig,
    build_grid,
    discretize_initial,
    grid_from_dx,
)
from .stepper import (
    CFLBound,
    RunResult,
    StepReport,
    advance,
    advance_single_domain,
    boundary_step_central,
    boundary_step_onesided,
    cfl_limit,
    couple_dirichlet_neumann,
    couple_flux_central,
    couple_flux_onesided,
    couple_fv_dirichlet_neumann,
    couple_fv_giles,
    couple_giles_correct,
    couple_giles_inconsistent,
    interior_step,
    run,
)
