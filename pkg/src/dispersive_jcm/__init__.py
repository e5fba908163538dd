"""Numerical laboratory for the two-mode Jaynes-Cummings model in the dispersive regime."""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    DomainError,
    JCMError,
    NumericError,
    ResonanceError,
    TruncationError,
    UnsupportedStateError,
)
from .hilbert import (
    HilbertSpace,
    StateVector,
    atomic_ops,
    coherent_state,
    fock_state,
    ladder_a,
    ladder_b,
    make_space,
    total_excitation,
)
from .model import (
    DerivedQuantities,
    ModelParams,
    build_full,
    build_h0,
    build_v_int,
    derive,
    dispersive_check,
    rabi_splitting,
)
from .schrieffer_wolff import (
    Generator,
    build_generator,
    calibrate_sign,
    exact_transform,
    exchange_residual,
    first_order_transform,
)
from .effective import (
    BranchHamiltonian,
    BranchParams,
    branch_params,
    branch_reduce,
    build_heff,
    normal_modes,
    rotation_angle,
    rotation_operator,
    theta_sweep,
    verify_diagonal,
)
from .dynamics import (
    CoefficientSet,
    InitialState,
    Propagator,
    TimeSeries,
    closed_form_coherent,
    closed_form_fock,
    coefficients,
    compare_full_vs_effective,
    evolve_expectations,
    propagator,
)
