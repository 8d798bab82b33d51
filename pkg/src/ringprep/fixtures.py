"""Bundled reference data: solvable-system matrices, registers, pulse sets."""

import json
from fractions import Fraction
from importlib import resources

import numpy as np

from .constants import TWO_PI
from .spin_system import LevelModel, NVPhysicalParams, build_system


def _load(name):
    with resources.files("ringprep.data").joinpath(name).open() as fh:
        return json.load(fh)


def solvable_systems():
    return _load("solvable_systems.json")


def pulse_library():
    return _load("pulse_library.json")


def nuclear_geometry():
    return _load("nuclear_geometry.json")


def register_config(n_spins):
    if n_spins == 4:
        return _load("four_spin_register.json")
    if n_spins == 6:
        return _load("six_spin_register.json")
    raise ValueError("bundled registers exist for 4 and 6 spins")


def reference_coupling(cfg):
    ref = cfg["reference_coupling"]
    return (float(ref["d_nm"]), TWO_PI * 1e3 * float(ref["g_kHz"]))


def load_register(n_spins, with_nuclei=False, B_z=None):
    """Build the bundled distorted register as a SpinSystem."""
    cfg = register_config(n_spins)
    params = NVPhysicalParams()
    model = LevelModel.TWO_LEVEL
    if with_nuclei:
        nuc = nuclear_geometry()
        params = NVPhysicalParams(
            B_z=float(B_z if B_z is not None else nuc["B_z_T"]),
            unit_vectors=tuple(tuple(v) for v in nuc["unit_vectors"]),
        )
        model = LevelModel.TWO_LEVEL_WITH_NUCLEI
    elif B_z is not None:
        params = NVPhysicalParams(B_z=float(B_z))
        model = LevelModel.TRIPLET
    return build_system(
        np.asarray(cfg["positions_nm"], float),
        TWO_PI * 1e6 * np.asarray(cfg["detunings_MHz"], float),
        level_model=model,
        reference=reference_coupling(cfg),
        params=params,
    )


def exact_inverse(entry):
    """Rational inverse matrix of a solvable-system entry."""
    den = entry["inverse_denominator"]
    return [
        [Fraction(int(v), den) for v in row] for row in entry["inverse_numerators"]
    ]


def inverse_as_float(entry):
    return np.asarray(entry["inverse_numerators"], float) / entry["inverse_denominator"]
