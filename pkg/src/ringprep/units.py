"""Unit helpers. Internally everything is SI with angular frequencies (rad/s).

Config files carry explicit unit suffixes (_MHz, _kHz, _us, _nm); a frequency
value x with a hertz-like suffix means the angular frequency 2*pi*x.
"""

import re

import numpy as np

from .constants import TWO_PI

_FREQ_SUFFIX = {"GHz": 1e9, "MHz": 1e6, "kHz": 1e3, "Hz": 1.0}
_TIME_SUFFIX = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9}


def mhz(x):
    """2*pi * x MHz in rad/s."""
    return TWO_PI * 1e6 * np.asarray(x, dtype=float)


def khz(x):
    """2*pi * x kHz in rad/s."""
    return TWO_PI * 1e3 * np.asarray(x, dtype=float)


def us(x):
    """x microseconds in seconds."""
    return 1e-6 * np.asarray(x, dtype=float)


def freq_from_key(mapping, stem):
    """Read `stem` with any frequency suffix from a config dict, as rad/s."""
    for suffix, scale in _FREQ_SUFFIX.items():
        key = f"{stem}_{suffix}"
        if key in mapping:
            return TWO_PI * scale * np.asarray(mapping[key], dtype=float)
    raise KeyError(f"no '{stem}_<unit>' frequency key in config")


def time_from_key(mapping, stem):
    """Read `stem` with any time suffix from a config dict, in seconds."""
    for suffix, scale in _TIME_SUFFIX.items():
        key = f"{stem}_{suffix}"
        if key in mapping:
            return scale * np.asarray(mapping[key], dtype=float)
    raise KeyError(f"no '{stem}_<unit>' time key in config")


def parse_duration(text, g1):
    """Parse a CLI duration: plain seconds, '<x>us'/'<x>ms', or '<n>pi' in 1/g1.

    '4pi' means 4*pi/g1, the convention used for total sequence times.
    """
    text = str(text).strip()
    m = re.fullmatch(r"([0-9.eE+-]+)\s*pi", text)
    if m:
        return float(m.group(1)) * np.pi / g1
    for suffix, scale in _TIME_SUFFIX.items():
        if text.endswith(suffix) and not text[: -len(suffix)].strip() == "":
            try:
                return float(text[: -len(suffix)]) * scale
            except ValueError:
                continue
    return float(text)
