"""System-level simulator for downlink coordinated multi-point transmission.

Affinity-propagation clustering of cooperating base stations, bargaining
power control with a delay-aware utility, fixed-size and single-BS
baselines, and the metrics (SINR, rate, delay, Jain fairness) to compare
them at desk scale.
"""

from .affinity import BACKEND  # noqa: F401
from .config import ConfigurationError, ScenarioConfig  # noqa: F401

__version__ = "0.1.0"
