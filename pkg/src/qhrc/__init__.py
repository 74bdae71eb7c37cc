"""qhrc: partial-SWAP collision-model simulator and reservoir-computing harness."""

__version__ = "0.1.0"

from .states import (
    InvalidStateError,
    bloch_state,
    expectation,
    fidelity,
    kron,
    l2_distance,
    partial_trace,
    random_density,
    validate_density_matrix,
)
from .homogenizer import (
    CouplingSchedule,
    HomogenizerConfig,
    Trajectory,
    average_state,
    collide_joint,
    collision_channel_closed_form,
    partial_swap_unitary,
    run_homogenization,
    stochastic_swap_channel,
    swap_operator,
)

__all__ = [
    "__version__",
    "InvalidStateError",
    "bloch_state",
    "expectation",
    "fidelity",
    "kron",
    "l2_distance",
    "partial_trace",
    "random_density",
    "validate_density_matrix",
    "CouplingSchedule",
    "HomogenizerConfig",
    "Trajectory",
    "average_state",
    "collide_joint",
    "collision_channel_closed_form",
    "partial_swap_unitary",
    "run_homogenization",
    "stochastic_swap_channel",
    "swap_operator",
]
