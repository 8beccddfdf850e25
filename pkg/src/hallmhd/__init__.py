"""Pseudo-spectral incompressible Hall-MHD simulator and verification
suite on the periodic box: 3D physical and extended (u, B, v)
formulations, 2.5D flows, fractional Sobolev diagnostics, and the
certification harness around them."""

from .config import ConfigError, RunConfig
from .fields import SpectralField
from .grid import GridSpec
from .gronwall import GronwallTrace, gronwall_verify
from .params import CFLError, PhysicalParams, StepControl
from .runner import NumericsError, RunResult, run

__all__ = [
    "CFLError",
    "ConfigError",
    "GridSpec",
    "GronwallTrace",
    "NumericsError",
    "PhysicalParams",
    "RunConfig",
    "RunResult",
    "SpectralField",
    "StepControl",
    "gronwall_verify",
    "run",
]

__version__ = "0.1.0"
