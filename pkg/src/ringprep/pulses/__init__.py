from .composite import CompositePulse, composite_unitary, pulse_from_json, pulse_to_json
from .fidelity import gate_fidelity, gate_infidelity
from .propagate import propagate_piecewise, slice_grid
from .scan import FidelityScan, robustness_scan
from .shaped import SelectiveRegions, ShapedPulse, selective_composite_unitary, shaped_envelope
from .vanloan import van_loan_derivatives

__all__ = [
    "CompositePulse",
    "FidelityScan",
    "SelectiveRegions",
    "ShapedPulse",
    "composite_unitary",
    "gate_fidelity",
    "gate_infidelity",
    "propagate_piecewise",
    "pulse_from_json",
    "pulse_to_json",
    "robustness_scan",
    "selective_composite_unitary",
    "shaped_envelope",
    "slice_grid",
    "van_loan_derivatives",
]
