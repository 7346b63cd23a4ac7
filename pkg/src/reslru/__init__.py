"""Numerical toolkit for a readout-resonator leakage-reduction unit.

Builds the driven transmon-resonator model, validates the analytic
effective-coupling stack against exact diagonalization, solves the
Lindblad dynamics of the removal pulse, optimizes the pulse over the
drive landscape, and models per-cycle leakage in a distance-3 surface
code with a seeded Monte Carlo layer.
"""

__version__ = "0.1.0"

from .crossing import AvoidedCrossing, find_avoided_crossing_exact
from .dressed import DressedFrame, diagonalize_static, to_dressed_frame
from .operators import OperatorMatrix, build_hamiltonian, build_ladder_ops
from .params import (
    DeviceParams,
    DrivePulse,
    ScheduleParams,
    operating_pulse,
    table1_device,
)

__all__ = [
    "AvoidedCrossing",
    "DeviceParams",
    "DressedFrame",
    "DrivePulse",
    "OperatorMatrix",
    "ScheduleParams",
    "build_hamiltonian",
    "build_ladder_ops",
    "diagonalize_static",
    "find_avoided_crossing_exact",
    "operating_pulse",
    "table1_device",
    "to_dressed_frame",
]
