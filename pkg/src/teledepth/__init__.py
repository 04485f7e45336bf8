"""Teleportation-based synthesis of multi-controlled Toffoli gates at unit
Toffoli depth, with exact verification and a noisy trajectory simulator."""

__version__ = "0.1.0"

from .circuit import (
    Circuit,
    CircuitBuilder,
    Condition,
    Operation,
    OpKind,
    QubitKind,
    deserialize,
    resource_counts,
    serialize,
    toffoli_count,
    toffoli_depth,
)
from .decompose import decompose_mct, defer_corrections, neighbor_layout
from .fidelity import (
    FidelityEstimate,
    GridSpec,
    SweepGrid,
    classical_fidelity_c,
    classical_fidelity_z,
    hofmann_bounds,
    mct_oracle,
    run_sweep,
    verify_mct_circuit,
)
from .schedule import build_schedule, epr_and_ancilla, toffoli_count_formula
from .simulate import NOISELESS, NoiseModel, StateVector, run_trajectory

__all__ = [
    "Circuit", "CircuitBuilder", "Condition", "Operation", "OpKind",
    "QubitKind", "serialize", "deserialize", "toffoli_depth", "toffoli_count",
    "resource_counts", "decompose_mct", "defer_corrections", "neighbor_layout",
    "build_schedule", "toffoli_count_formula", "epr_and_ancilla",
    "NoiseModel", "NOISELESS", "StateVector", "run_trajectory",
    "mct_oracle", "verify_mct_circuit", "classical_fidelity_z",
    "classical_fidelity_c", "hofmann_bounds", "FidelityEstimate", "GridSpec",
    "SweepGrid", "run_sweep", "__version__",
]
