"""Quantum relative entropies of two types, entanglement-based mutual
information, and entangled channel capacities."""

from .matcore import ConsistencyError, InputError
from .qstate import DensityOperator, make_density, purify, von_neumann_entropy
from .entangle import (
    CompoundState,
    compose_entanglement,
    decompose_entanglement,
    make_compound,
    standard_compound,
)
from .divergence import (
    EntropyType,
    entangled_entropy,
    mutual_info,
    rel_entropy,
    rel_entropy_a,
    rel_entropy_b,
)
from .channel import QuantumChannel, make_channel, preset
from .capacity import (
    CapacityReport,
    OptimizerConfig,
    additivity_capacity_check,
    additivity_inputs_check,
    capacity,
    exchange_info,
)

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError", "InputError",
    "DensityOperator", "make_density", "purify", "von_neumann_entropy",
    "CompoundState", "compose_entanglement", "decompose_entanglement",
    "make_compound", "standard_compound",
    "EntropyType", "entangled_entropy", "mutual_info",
    "rel_entropy", "rel_entropy_a", "rel_entropy_b",
    "QuantumChannel", "make_channel", "preset",
    "CapacityReport", "OptimizerConfig", "additivity_capacity_check",
    "additivity_inputs_check", "capacity", "exchange_info",
]
