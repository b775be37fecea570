"""Spectral clear-sky radiance models with a shared evaluation harness."""

__version__ = "0.1.0"

from .errors import CapabilityError, ClearSkyError, InputError, NumericError
from .spectral import (
    ColorMatchingTable,
    ColorTriple,
    Spectrum,
    WavelengthGrid,
    canonical_grid,
    default_cmf,
    default_solar,
    luminance,
    spectrum_to_srgb,
    spectrum_to_xyz,
)

__all__ = [
    "CapabilityError", "ClearSkyError", "InputError", "NumericError",
    "ColorMatchingTable", "ColorTriple", "Spectrum", "WavelengthGrid",
    "canonical_grid", "default_cmf", "default_solar", "luminance",
    "spectrum_to_srgb", "spectrum_to_xyz",
]
