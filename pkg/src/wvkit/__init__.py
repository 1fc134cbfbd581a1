"""Weak values, their anomalous parts, and exact pointer simulation."""
from .errors import *  # noqa: F401,F403
from .hilbert import (
    Observable,
    State,
    commutator,
    eig,
    expectation,
    inner,
    normalize,
    pauli,
    random_hermitian,
    random_state,
    random_unitary,
    tensor,
    tensor_op,
    uncertainty,
)
from .meter_sim import (
    MeterConfig,
    PointerResult,
    build_meter,
    evolve_and_postselect,
    first_order_checks,
)
from .weakvalue import (
    BoundsReport,
    PpsEnsemble,
    WeakValueReport,
    anomaly_bounds,
    decompose_weak_value,
    equivalent_pps,
    identity_resolution_average,
    phase_analysis,
    tradeoff_check,
    vaidman_decompose,
    weak_value,
)

__version__ = "0.1.0"
