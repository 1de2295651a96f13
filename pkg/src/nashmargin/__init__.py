"""Robustness of pure Nash equilibria in finite and network games."""

from .core import (
    FiniteGame,
    Perturbation,
    PotentialCertificate,
    check_potential,
    deviation_margin,
    deviation_margins,
    enumerate_nash,
    game_distance,
    is_nash,
)
from .errors import CapacityError, DomainError, InputError, InvariantViolation, ValidationError
from .network import (
    Graph,
    PairwiseNetworkGame,
    SpinAssignment,
    build_pairwise,
    construct_mixed_nash,
    coord_anticoord,
    coupling_condition,
    is_cohesive,
    maximize_restricted_potential,
)
from .robustness import (
    RobustnessReport,
    construct_breaking_perturbation,
    fuzz_margin,
    margin_of_robustness,
    persists_under,
    projection_check,
)
from .subgames import (
    PartitionContext,
    RestrictedGame,
    average_over_complement,
    freeze,
    uniform_nash_certificate,
)

__version__ = "0.1.0"
