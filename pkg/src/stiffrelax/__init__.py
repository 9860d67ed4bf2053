"""IMEX-BDF integrators for stiff hyperbolic relaxation systems.

Subpackage map:

- ``tableaux``    multistep coefficient tables and the IMEX-RK bootstrap
- ``multipliers`` stability-certificate quadratic forms and the energy functional
- ``spectral``    Fourier-Galerkin solver + exact per-mode flow (constant coefficients)
- ``varcoef``     first-order scheme for space-dependent coefficients
- ``weno``        finite-volume WENO solver for the quadratic relaxation system
- ``bgk``         kinetic BGK solver with the moment-first implicit update
- ``sweeps``      (eps, dt) sweep harness, CSV emission, order estimation
- ``cli``         the ``stiff-relax`` command line tool
"""

from .tableaux import BdfTableau, ImexRkTableau, ars443, bdf_from_polynomials, bdf_tableau, imex_rk_step
from .multipliers import (
    EnergyDiagnostic,
    MultiplierSet,
    energy_functional,
    multiplier_set,
    quadratic_form_extrema,
    solve_zstar,
    verify_identity_a,
    verify_identity_g,
)
from .spectral import (
    BdfHistory,
    LinearParams,
    SpectralField,
    bootstrap_linear,
    exact_solution,
    integrate_linear,
    l2_error,
    project,
    step_bdf_limit,
    step_bdf_linear,
)
from .varcoef import VarCoefEuler, VarCoefParams
from .weno import (
    CellField,
    NonlinearParams,
    bootstrap_nonlinear,
    cell_average_field,
    flux_divergence,
    integrate_nonlinear,
    step_bdf_nonlinear,
    weno5_reconstruct,
)
from .bgk import (
    KineticField,
    MomentVector,
    RealizabilityError,
    VelocityGrid,
    bootstrap_bgk,
    chapman_init,
    integrate_bgk,
    maxwellian,
    moments,
    step_bdf_bgk,
    transport_rhs,
)
from .sweeps import (
    ErrorRecord,
    OrderEstimate,
    SweepConfig,
    emit_csv,
    estimate_order,
    load_records,
    run_case,
    run_sweep,
)

__version__ = "0.1.0"
