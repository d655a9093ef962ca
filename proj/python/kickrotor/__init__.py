"""Quantum and classical kicked rotor with sign-modulated kicks.

Momentum-space arrays run over m in [-m_max, m_max); index 0 holds m = -m_max.
"""

from ._core import (
    NO_FLIP,
    FitError,
    NumericalError,
    RotorParams,
    Variant,
    __version__,
    apply_d_operator,
    apply_free,
    apply_kick,
    band_width,
    build_kr_matrix,
    build_mkr_matrix,
    detect_nonexponential,
    evolve,
    find_periodic_orbit,
    fit_localization_length,
    initial_state,
    island_drift,
    map_evolve,
    poincare_section,
    scaled_energy,
    shannon_entropy,
    spectrum_point,
)
from ._core import run as _run

import json as _json
import numpy as _np


def momenta(m_max):
    """The m values matching momentum-space arrays of half-width m_max."""
    return _np.arange(-m_max, m_max)


def run(config):
    """Run an experiment from a config dict (same keys as the CLI's --config file).

    Returns (exit_code, files, warnings).
    """
    return _run(_json.dumps(config))


__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
