"""Secrecy metrics for space-to-ground free-space optical links.

The package stacks a deterministic channel model (beam spreading and
pointing loss, molecular/aerosol extinction, cloud droplet extinction)
under Fisher-Snedecor F turbulence fading, and evaluates the standard
physical-layer secrecy quantities of the resulting wiretap channel:
average secrecy capacity, secrecy outage probability (exact and lower
bound) and the probability of strictly positive secrecy capacity.

Every metric is computable three independent ways: adaptive quadrature
of the defining integrals, closed forms built on a numerical Meijer-G
evaluator, and Monte Carlo simulation with a counter-based RNG.
"""

from .errors import ConfigError, FsosecError, NonConvergent, PoleCollision
from .fading import FFadingParams, SnrChannel
from .mc import McConfig, McEstimate
from .secrecy import SecrecyReport, WiretapScenario, evaluate_scenario

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "FFadingParams",
    "FsosecError",
    "McConfig",
    "McEstimate",
    "NonConvergent",
    "PoleCollision",
    "SecrecyReport",
    "SnrChannel",
    "WiretapScenario",
    "evaluate_scenario",
    "__version__",
]
