"""Spectral unit conversions.

All spectral quantities are handled internally in angular frequency
(rad/fs); wavelengths at the API boundary are vacuum wavelengths in nm.
This module is the single authority for the mapping between the two.
"""

from __future__ import annotations

import numpy as np

#: Speed of light in vacuum, nm/fs.
C_NM_PER_FS = 299.792458

#: Speed of light in vacuum, um/fs (wavenumber/group-delay unit system).
C_UM_PER_FS = 0.299792458

_TWO_PI_C = 2.0 * np.pi * C_NM_PER_FS


def nm_to_angular_frequency(wavelength_nm):
    """Vacuum wavelength (nm) to angular frequency (rad/fs)."""
    return _TWO_PI_C / np.asarray(wavelength_nm, dtype=float)


def angular_frequency_to_nm(omega_rad_fs):
    """Angular frequency (rad/fs) to vacuum wavelength (nm)."""
    return _TWO_PI_C / np.asarray(omega_rad_fs, dtype=float)


def fwhm_nm_to_fwhm_omega(fwhm_nm: float, center_nm: float) -> float:
    """First-order width conversion |dω/dλ|·Δλ at a carrier wavelength."""
    return _TWO_PI_C / center_nm**2 * fwhm_nm


def intensity_fwhm_to_amplitude_sigma(fwhm: float) -> float:
    """Gaussian intensity FWHM to the amplitude 1/e half width.

    For a field exp(-x²/σ²) the intensity exp(-2x²/σ²) has
    FWHM = σ·√(2 ln 2); this inverts that relation.
    """
    return fwhm / np.sqrt(2.0 * np.log(2.0))
