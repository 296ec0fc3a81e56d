"""Rank-reducing similarity transformations of second-quantized Hamiltonians.

Thin Python facade over the C++ core: operator text I/O, orbital
partitions, the generator solve, the transformed Hamiltonian G with its
qubit-locality census, and the full config-driven pipeline.
"""

from ._swrrst import (
    CapacityError,
    ConfigError,
    DivergenceError,
    FermionOperator,
    OrbitalPartition,
    SingularityError,
    StructureError,
    ValidationError,
    __version__,
    build_g,
    canonical_config,
    commutator,
    decompose,
    jw_text,
    load_integrals,
    locality_report,
    run_pipeline,
    solve,
)

__all__ = [
    "CapacityError",
    "ConfigError",
    "DivergenceError",
    "FermionOperator",
    "OrbitalPartition",
    "SingularityError",
    "StructureError",
    "ValidationError",
    "__version__",
    "build_g",
    "canonical_config",
    "commutator",
    "decompose",
    "jw_text",
    "load_integrals",
    "locality_report",
    "run_pipeline",
    "solve",
]
