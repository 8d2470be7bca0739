"""Forest-fire process on Z+ with spread delays and burn times.

Simulation engine, analytic formulas, and Monte Carlo verification
experiments, plus a command-line front end (`zfire`).
"""

__version__ = "0.1.0"

from .distributions import DeltaSpec, DistSpec
from .engine import ModelConfig, RunSummary, simulate, simulate_sheared

__all__ = [
    "DeltaSpec",
    "DistSpec",
    "ModelConfig",
    "RunSummary",
    "simulate",
    "simulate_sheared",
    "__version__",
]
