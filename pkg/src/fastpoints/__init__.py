"""Fast points of Brownian paths with drift, on dyadic grids.

The modules are independent layers:

``paths``        seeded Brownian, fractional Brownian and drifted paths
``drift``        Cantor, Loud and tabulated drifts, Hölder probes
``detect``       per-level fast / near-zero interval flags and their exact means
``scaling``      exponent fits and closed-form dimensions
``measures``     discrete measures, energy, the J functional
``limsup``       nested counts and the limsup-fractal condition
``experiments``  presets and CSV output, driven by ``fastpoints.cli``
"""

from . import detect, drift, experiments, limsup, measures, paths, scaling
from .detect import (
    FlagKind,
    IntervalFlags,
    count,
    expected_l_count,
    holder_sandwich,
    intersect_flags,
    l_flags,
    sup_flags,
    zero_near_flags,
)
from .drift import Cantor, DriftSpec, Linear, Loud, Tabulated, Zero, parse_drift
from .errors import (
    ConfigurationError,
    DegenerateMeasureError,
    DomainError,
    FastpointsError,
    FitError,
    ResolutionError,
    UnsupportedKindError,
    UsageError,
)
from .experiments import ExperimentConfig, ResultRow
from .paths import PathKind, SamplePath, apply_drift, refine_bridge, sample_bm, sample_fbm
from .scaling import Correction, fit_exponent

__version__ = "0.1.0"

__all__ = [
    "detect",
    "drift",
    "experiments",
    "limsup",
    "measures",
    "paths",
    "scaling",
    "FlagKind",
    "IntervalFlags",
    "count",
    "expected_l_count",
    "holder_sandwich",
    "intersect_flags",
    "l_flags",
    "sup_flags",
    "zero_near_flags",
    "Cantor",
    "DriftSpec",
    "Linear",
    "Loud",
    "Tabulated",
    "Zero",
    "parse_drift",
    "ConfigurationError",
    "DegenerateMeasureError",
    "DomainError",
    "FastpointsError",
    "FitError",
    "ResolutionError",
    "UnsupportedKindError",
    "UsageError",
    "ExperimentConfig",
    "ResultRow",
    "PathKind",
    "SamplePath",
    "apply_drift",
    "refine_bridge",
    "sample_bm",
    "sample_fbm",
    "Correction",
    "fit_exponent",
]
