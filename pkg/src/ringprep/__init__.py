"""ringprep: pulse-sequence compiler and spin-dynamics simulator for
ring cluster-state preparation under a global drive."""

__version__ = "0.1.0"

from .collective import collective_reduction, pulse_catalog, table_factor
from .lss import LSSLimits, lss_search
from .sequence import (
    PulseSegment,
    PulseSequence,
    build_factor_matrix,
    compile_sequence,
    general_four_spin_solution,
    modulation_factor,
    solve_exact,
)
from .spin_system import (
    LevelModel,
    SpinSystem,
    build_system,
    dipolar_coupling,
    hamiltonian_zz,
)

__all__ = [
    "LSSLimits",
    "LevelModel",
    "PulseSegment",
    "PulseSequence",
    "SpinSystem",
    "build_factor_matrix",
    "build_system",
    "collective_reduction",
    "compile_sequence",
    "dipolar_coupling",
    "general_four_spin_solution",
    "hamiltonian_zz",
    "lss_search",
    "modulation_factor",
    "pulse_catalog",
    "solve_exact",
    "table_factor",
]
