"""Time-fractional diffusion with spatial involution.

Building blocks: Mittag-Leffler evaluation with error control, the staged
(Dzherbashian-Nersesian) fractional operator generalizing the
Riemann-Liouville, Caputo and Hilfer derivatives, the involution sine
eigenbasis, a direct series solver, and two inverse-source solvers (static
space profile from a final snapshot; time amplitude from the energy
observation), all backed by a verification layer that exercises every
identity the construction relies on.
"""

__version__ = "0.1.0"

from .errors import (
    BoundaryError,
    ContractionViolatedError,
    DenominatorUnderflowError,
    DomainError,
    FracdiffError,
    GridError,
    MassBoundViolationError,
    NoConvergenceError,
    NonConvergentError,
    ParseError,
    PoleError,
    PreconditionError,
    ResolutionError,
    SingularAtZeroError,
    TailError,
    TruncationWarning,
    ValidationError,
)
from .frac_calculus import (
    CaputoCase,
    FractionalSchedule,
    GeneralCase,
    HilferCase,
    LaplaceCheckReport,
    MLExponential,
    PowerFunction,
    PowerRuleResult,
    RiemannLiouvilleCase,
    dn_apply,
    dn_initial_values,
    dn_power_rule,
    dn_power_rule_partial,
    laplace_check,
    reduce_special_case,
    rl_derivative,
    rl_integral,
)
from .grids import SpaceGridFn, TimeGridFn, graded_time_grid, uniform_space_grid
from .mittag_leffler import (
    EvalReport,
    MLParams,
    MLTypeParams,
    check_ml_bound,
    conv_ml,
    conv_operator,
    ml_e_values,
    ml_eval,
    ml_neg_values,
    ml_type_eval,
)
from .spectral import (
    DecayReport,
    SineSeries,
    SpectralBasis,
    decay_check,
    eigenfunction_residual,
    eigenfunction_values,
    eigenvalue,
    gram_matrix,
    project,
    synthesize,
)
from .direct import (
    DirectSolution,
    ModalSolution,
    ProblemSpec,
    SeparableSource,
    SpaceOnlySource,
    pde_residual,
    solve_direct,
    solve_modal_ode,
)
from .inverse_space import (
    FinalData,
    SpaceReconstruction,
    SpaceSourceInverter,
    StabilityReport,
    recover_space_source,
    stability_probe,
)
from .inverse_time import (
    EnergyData,
    TimeAmplitudeInverter,
    TimeReconstruction,
    VolterraSystem,
    build_volterra,
    dn_of_energy,
    energy_from_solution,
    picard_solve,
    recover_time_amplitude,
)
from .config import RunConfig, parse_config

__all__ = [name for name in dir() if not name.startswith("_")]
