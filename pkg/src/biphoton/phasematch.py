"""Quasi-phase-matching: mismatch, poling periods, group-velocity geometry.

The collinear phase mismatch is ΔK = k_p − k_s − k_i ∓ 2π/Λ with the
first-order grating term taking the sign that compensates the unpoled
mismatch (a poled grating supplies ±2π/Λ; phase matching selects the
compensating order). ``solve_poling_period`` therefore always returns a
positive period, and a crystal poled at that period has ΔK = 0 at its
design point.

Root finding uses plain bisection on fixed, documented windows: the
dispersion curves are smooth and monotonic there and bisection needs no
derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dispersion import CrystalAxes, inverse_group_velocity, wavenumber
from .errors import (
    DegenerateInputError,
    InputError,
    NoSolutionError,
    UndefinedOrientationError,
)
from .units import angular_frequency_to_nm, nm_to_angular_frequency

#: Energy-conservation tolerance on 1/λp − 1/λs − 1/λi, 1/nm.
ENERGY_TOLERANCE_PER_NM = 1e-9

#: Search window for the GVM degenerate wavelength, nm.
GVM_SEARCH_WINDOW_NM = (1400.0, 1700.0)


@dataclass(frozen=True)
class PumpSpec:
    """Pulsed pump description; bandwidth is the intensity FWHM in nm."""

    center_wavelength_nm: float
    intensity_fwhm_bandwidth_nm: float
    repetition_rate_mhz: float = 81.0
    pulse_duration_fs: float | None = None

    def __post_init__(self):
        if self.center_wavelength_nm <= 0:
            raise InputError("pump center_wavelength_nm must be positive")
        if self.intensity_fwhm_bandwidth_nm <= 0:
            raise InputError("pump intensity_fwhm_bandwidth_nm must be positive")
        if self.intensity_fwhm_bandwidth_nm >= self.center_wavelength_nm:
            raise InputError("pump bandwidth must be smaller than the center wavelength")
        if self.repetition_rate_mhz <= 0:
            raise InputError("pump repetition_rate_mhz must be positive")
        if self.pulse_duration_fs is not None and self.pulse_duration_fs <= 0:
            raise InputError("pump pulse_duration_fs must be positive when given")

    @property
    def pulse_period_ns(self) -> float:
        return 1e3 / self.repetition_rate_mhz


@dataclass(frozen=True)
class CrystalSpec:
    """Poled crystal: geometry, operating temperature and axis binding.

    ``poling_period_um`` is the period at the pump set's reference
    temperature; the thermal expansion coefficient of the pump axis set
    rescales it at other temperatures.
    """

    axes: CrystalAxes
    length_mm: float
    poling_period_um: float
    temperature_c: float = 20.0

    def __post_init__(self):
        if self.length_mm <= 0:
            raise InputError("crystal length_mm must be positive")
        if self.poling_period_um <= 0:
            raise InputError("crystal poling_period_um must be positive")

    @property
    def length_um(self) -> float:
        return self.length_mm * 1000.0

    @property
    def expanded_poling_period_um(self) -> float:
        thermal = self.axes.pump.thermal
        if thermal is None:
            return self.poling_period_um
        dt = self.temperature_c - self.axes.pump.reference_temperature_c
        return self.poling_period_um * (1.0 + thermal.poling_expansion_per_c * dt)


def unpoled_mismatch(axes: CrystalAxes, omega_s, omega_i, temperature_c: float):
    """k_p(ωs+ωi) − k_s(ωs) − k_i(ωi) without the grating term, rad/µm."""
    lam_s = angular_frequency_to_nm(omega_s)
    lam_i = angular_frequency_to_nm(omega_i)
    lam_p = angular_frequency_to_nm(np.asarray(omega_s) + np.asarray(omega_i))
    return (
        wavenumber(axes.pump, lam_p, temperature_c)
        - wavenumber(axes.signal, lam_s, temperature_c)
        - wavenumber(axes.idler, lam_i, temperature_c)
    )


def phase_mismatch(crystal: CrystalSpec, omega_s, omega_i):
    """ΔK including the compensating first-order grating term, rad/µm.

    Accepts scalars or arrays in rad/fs; dispersion range errors
    propagate. In the Λ → ∞ limit the result reduces to the unpoled
    mismatch.
    """
    dk0 = unpoled_mismatch(crystal.axes, omega_s, omega_i, crystal.temperature_c)
    grating = 2.0 * np.pi / crystal.expanded_poling_period_um
    return dk0 - np.where(np.asarray(dk0) >= 0.0, 1.0, -1.0) * grating


def _check_energy_conservation(lambda_p_nm, lambda_s_nm, lambda_i_nm):
    residual = abs(1.0 / lambda_p_nm - 1.0 / lambda_s_nm - 1.0 / lambda_i_nm)
    if residual > ENERGY_TOLERANCE_PER_NM:
        raise InputError(
            "wavelength triple violates energy conservation: "
            f"|1/{lambda_p_nm} - 1/{lambda_s_nm} - 1/{lambda_i_nm}| = "
            f"{residual:.3e} 1/nm exceeds {ENERGY_TOLERANCE_PER_NM:.0e}"
        )


def solve_poling_period(
    lambda_p_nm: float,
    lambda_s_nm: float,
    lambda_i_nm: float,
    temperature_c: float,
    axes: CrystalAxes,
) -> float:
    """First-order poling period (µm) nulling ΔK at the given triple.

    The returned period refers to the pump set's reference temperature,
    so building a ``CrystalSpec`` from it at ``temperature_c`` round-trips
    ``phase_mismatch`` to zero. Unique because ΔK is monotonic in 1/Λ.

    Raises:
        InputError: energy conservation violated beyond 1e-9 1/nm.
        NoSolutionError: the unpoled mismatch vanishes (nothing to pole).
    """
    _check_energy_conservation(lambda_p_nm, lambda_s_nm, lambda_i_nm)
    omega_s = nm_to_angular_frequency(lambda_s_nm)
    omega_i = nm_to_angular_frequency(lambda_i_nm)
    dk0 = unpoled_mismatch(axes, omega_s, omega_i, temperature_c)
    if dk0 == 0.0:
        raise NoSolutionError(
            "unpoled mismatch vanishes at the requested triple; "
            "no finite poling period is required"
        )
    period_at_t = 2.0 * np.pi / abs(dk0)
    thermal = axes.pump.thermal
    if thermal is None:
        return period_at_t
    dt = temperature_c - axes.pump.reference_temperature_c
    return period_at_t / (1.0 + thermal.poling_expansion_per_c * dt)


def gvm_angle(
    lambda_p_nm: float,
    lambda_s_nm: float,
    lambda_i_nm: float,
    axes: CrystalAxes,
    temperature_c: float = 20.0,
) -> float:
    """Phase-matching ridge orientation θ in degrees, in (−180, 180].

    θ = atan2(k'_s − k'_p, k'_p − k'_i); θ = 45° marks group velocity
    matching and a circular joint amplitude.
    """
    kp_p = inverse_group_velocity(axes.pump, lambda_p_nm, temperature_c)
    kp_s = inverse_group_velocity(axes.signal, lambda_s_nm, temperature_c)
    kp_i = inverse_group_velocity(axes.idler, lambda_i_nm, temperature_c)
    num = kp_s - kp_p
    den = kp_p - kp_i
    # group delays carry finite-difference rounding noise around 1e-11;
    # snap differences below 1e-9 of the group-delay scale to exact zero
    floor = 1e-9 * max(abs(kp_p), abs(kp_s), abs(kp_i))
    num = 0.0 if abs(num) < floor else num
    den = 0.0 if abs(den) < floor else den
    if num == 0.0 and den == 0.0:
        raise UndefinedOrientationError(
            "k'_s = k'_p = k'_i: ridge orientation is undefined"
        )
    theta = float(np.degrees(np.arctan2(num, den)))
    if theta <= -180.0:
        theta += 360.0
    return theta


def _gvm_residual(axes: CrystalAxes, lambda_dc_nm: float, temperature_c: float) -> float:
    kp_p = inverse_group_velocity(axes.pump, lambda_dc_nm / 2.0, temperature_c)
    kp_s = inverse_group_velocity(axes.signal, lambda_dc_nm, temperature_c)
    kp_i = inverse_group_velocity(axes.idler, lambda_dc_nm, temperature_c)
    return kp_p - 0.5 * (kp_s + kp_i)


def gvm_degenerate_wavelength(
    axes: CrystalAxes,
    temperature_c: float = 20.0,
    window_nm: tuple[float, float] = GVM_SEARCH_WINDOW_NM,
    tolerance_nm: float = 0.01,
) -> float:
    """Degenerate downconversion wavelength where k'_p = (k'_s + k'_i)/2.

    Bracketed bisection of the residual over ``window_nm`` for a pump at
    half the downconversion wavelength; converges well below
    ``tolerance_nm``.

    Raises:
        DegenerateInputError: the residual vanishes identically
            (dispersionless axes satisfy the condition everywhere).
        NoSolutionError: no sign change inside the window.
    """
    lo, hi = window_nm
    probes = np.linspace(lo, hi, 5)
    residuals = [_gvm_residual(axes, lam, temperature_c) for lam in probes]
    # below the finite-difference noise floor the condition holds identically
    if all(abs(r) < 1e-9 for r in residuals):
        raise DegenerateInputError(
            "group velocity matching holds at every probe wavelength; "
            "the degenerate wavelength is not unique"
        )
    f_lo, f_hi = residuals[0], residuals[-1]
    if f_lo == 0.0:
        return float(lo)
    if f_hi == 0.0:
        return float(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSolutionError(
            f"no GVM sign change in [{lo:g}, {hi:g}] nm "
            f"(residuals {f_lo:.3e} and {f_hi:.3e} fs/um)"
        )
    a, b, f_a = lo, hi, f_lo
    # bisect far below the documented tolerance so the residual contract
    # (|residual| < 1e-8 fs/um) holds with margin
    while b - a > min(tolerance_nm, 1e-6):
        mid = 0.5 * (a + b)
        f_mid = _gvm_residual(axes, mid, temperature_c)
        if f_mid == 0.0:
            return float(mid)
        if np.sign(f_mid) == np.sign(f_a):
            a, f_a = mid, f_mid
        else:
            b = mid
    return float(0.5 * (a + b))
