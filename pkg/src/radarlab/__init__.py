"""Simulation laboratory for scalable decentralized search and response.

Submodules
----------
scaling     power laws, growth ODEs and log-log regression
immune      semi-modular lymph-node search model and its event simulation
ants        central-place foraging with pheromone recruitment
smallworld  lattice graphs with long-range contacts and greedy routing
experiments named, seeded experiments writing CSV, SVG and reports
cli         command-line front end
"""

from radarlab.errors import (
    ConfigurationError,
    DegenerateFitError,
    DomainError,
    InsufficientDataError,
    NoFiniteAsymptoteError,
    NumericalError,
    RadarError,
    UnsupportedExponentError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DegenerateFitError",
    "DomainError",
    "InsufficientDataError",
    "NoFiniteAsymptoteError",
    "NumericalError",
    "RadarError",
    "UnsupportedExponentError",
]
