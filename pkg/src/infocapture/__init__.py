"""Model how much social-network information a spreading agent captures,
and which infection rate maximizes it before the agent is detected."""

__version__ = "0.1.0"

from .complexity import (
    ComplexityEstimate,
    critical_threshold,
    estimate_kolmogorov,
    is_easily_learnable,
    protection_holds,
    social_essence,
)
from .detection import DetectionParams, detection_probability, expected_information
from .graph import (
    Graph,
    generate_cohort_network,
    generate_random_network,
    generate_scale_free,
    load_edge_list,
    read_edge_list,
)
from .learning import LearningParams, gompertz, lambda_e, lambda_v
from .optimizer import SweepResult, find_optima, sweep_rho
from .spread import (
    InfectionState,
    SimulationTrace,
    attack_probability,
    mean_field,
    monte_carlo_step,
    run_monte_carlo,
)
