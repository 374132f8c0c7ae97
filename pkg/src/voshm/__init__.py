"""Quantify the life-cycle value of vibration-based structural health monitoring.

The package simulates a deteriorating two-span bridge over its lifetime and
compares the expected discounted cost of managing it with intermittent visual
inspections against managing it with a continuous vibration monitoring system,
by paired preposterior Monte Carlo simulation.
"""

from voshm.structural import (
    BridgeConfig,
    BridgeModel,
    CapacityCurve,
    ModalResult,
    damaged_support_stiffness,
)

__all__ = [
    "BridgeConfig",
    "BridgeModel",
    "CapacityCurve",
    "ModalResult",
    "damaged_support_stiffness",
]

__version__ = "0.1.0"
