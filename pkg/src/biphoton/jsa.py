"""Joint spectral amplitude construction, filtering and Schmidt analysis.

The two-photon amplitude is the product of a Gaussian pump envelope and
the sinc-shaped phase-matching amplitude of the poled crystal, discretised
on a signal × idler grid that is uniform in angular frequency. Schmidt
analysis of the discretised amplitude yields the heralded spectral purity.

Bandwidth convention: pump bandwidth is the intensity FWHM in nm; the
envelope exp(−(ωs+ωi−ωp)²/σ²) uses the amplitude 1/e half width
σ = FWHM_ω/√(2 ln 2) with FWHM_ω the first-order conversion of the nm
FWHM at the pump center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, EmptyResultError, InputError, SearchError
from .phasematch import CrystalSpec, PumpSpec, phase_mismatch
from .units import (
    angular_frequency_to_nm,
    fwhm_nm_to_fwhm_omega,
    intensity_fwhm_to_amplitude_sigma,
    nm_to_angular_frequency,
)

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class FrequencyGrid:
    """Signal × idler grid, uniform in angular frequency.

    The grid endpoints map exactly to center ± half_span in nm;
    points_per_axis must be a power of two, at least 16.
    """

    center_signal_nm: float = 1570.0
    center_idler_nm: float = 1570.0
    half_span_nm: float = 60.0
    points_per_axis: int = 512

    def __post_init__(self):
        n = self.points_per_axis
        if n < 16 or (n & (n - 1)) != 0:
            raise InputError("points_per_axis must be a power of two, at least 16")
        if self.half_span_nm <= 0:
            raise InputError("half_span_nm must be positive")
        for c in (self.center_signal_nm, self.center_idler_nm):
            if c - self.half_span_nm <= 0:
                raise InputError("grid extends to non-positive wavelengths")

    def _axis(self, center_nm: float) -> np.ndarray:
        lo = nm_to_angular_frequency(center_nm + self.half_span_nm)
        hi = nm_to_angular_frequency(center_nm - self.half_span_nm)
        return np.linspace(lo, hi, self.points_per_axis)

    @property
    def signal_omegas(self) -> np.ndarray:
        return self._axis(self.center_signal_nm)

    @property
    def idler_omegas(self) -> np.ndarray:
        return self._axis(self.center_idler_nm)

    @property
    def d_omega_signal(self) -> float:
        ax = self.signal_omegas
        return float(ax[1] - ax[0])

    @property
    def d_omega_idler(self) -> float:
        ax = self.idler_omegas
        return float(ax[1] - ax[0])

    @property
    def signal_wavelengths_nm(self) -> np.ndarray:
        return angular_frequency_to_nm(self.signal_omegas)

    @property
    def idler_wavelengths_nm(self) -> np.ndarray:
        return angular_frequency_to_nm(self.idler_omegas)

    @property
    def cell_area(self) -> float:
        return self.d_omega_signal * self.d_omega_idler


@dataclass(frozen=True)
class FilterSurvival:
    """Transmitted |f|² fractions recorded by apply_filter."""

    signal: float | None
    idler: float | None
    total: float


@dataclass
class JointAmplitude:
    """Discretised joint spectral amplitude f(ωs, ωi).

    ``amplitudes[j, k]`` is f at signal index j, idler index k. When
    ``normalized`` is set, Σ|f|²·Δωs·Δωi = 1 within 1e-9.
    """

    grid: FrequencyGrid
    amplitudes: np.ndarray
    normalized: bool = True
    survival: FilterSurvival | None = None

    def __post_init__(self):
        n = self.grid.points_per_axis
        if self.amplitudes.shape != (n, n):
            raise InputError(
                f"amplitude matrix shape {self.amplitudes.shape} does not match grid {n}x{n}"
            )
        if self.normalized:
            total = self.total_probability()
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise InputError(
                    f"normalized flag set but integral of |f|^2 is {total!r}"
                )

    def total_probability(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.cell_area)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class FilterSpec:
    """Bandpass filter acting on intensity; amplitudes see √T."""

    center_nm: float
    fwhm_nm: float
    shape: str = "gaussian"
    peak_transmission: float = 1.0

    def __post_init__(self):
        if self.fwhm_nm <= 0:
            raise InputError("filter fwhm_nm must be positive")
        if not 0.0 < self.peak_transmission <= 1.0:
            raise InputError("filter peak_transmission must be in (0, 1]")
        if self.shape not in ("gaussian", "rectangular"):
            raise InputError(f"unknown filter shape {self.shape!r}")

    def transmission(self, wavelength_nm) -> np.ndarray:
        lam = np.asarray(wavelength_nm, dtype=float)
        if self.shape == "gaussian":
            return self.peak_transmission * np.exp(
                -4.0 * np.log(2.0) * (lam - self.center_nm) ** 2 / self.fwhm_nm**2
            )
        inside = np.abs(lam - self.center_nm) <= self.fwhm_nm / 2.0
        return self.peak_transmission * inside.astype(float)


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Normalized Schmidt coefficients, descending, summing to one."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if abs(float(c.sum()) - 1.0) > NORMALIZATION_TOL:
            raise InputError("Schmidt coefficients must sum to 1")
        if np.any(c < -1e-15):
            raise InputError("Schmidt coefficients must be non-negative")
        object.__setattr__(self, "coefficients", c)

    @property
    def purity(self) -> float:
        return float(np.sum(self.coefficients**2))

    @property
    def schmidt_number(self) -> float:
        return 1.0 / self.purity


def pump_envelope(omega_s, omega_i, pump: PumpSpec):
    """Gaussian pump envelope α(ωs + ωi), real valued in (0, 1]."""
    omega_p = nm_to_angular_frequency(pump.center_wavelength_nm)
    sigma = pump_sigma(pump)
    detuning = np.asarray(omega_s) + np.asarray(omega_i) - omega_p
    return np.exp(-(detuning**2) / sigma**2)


def pump_sigma(pump: PumpSpec) -> float:
    """Amplitude 1/e half width of the envelope in rad/fs."""
    fwhm_omega = fwhm_nm_to_fwhm_omega(
        pump.intensity_fwhm_bandwidth_nm, pump.center_wavelength_nm
    )
    return intensity_fwhm_to_amplitude_sigma(fwhm_omega)


def phasematching_function(omega_s, omega_i, crystal: CrystalSpec):
    """sinc(LΔK/2)·exp(−iLΔK/2) on the given frequencies, |φ| ≤ 1."""
    x = crystal.length_um * phase_mismatch(crystal, omega_s, omega_i) / 2.0
    return np.sinc(x / np.pi) * np.exp(-1j * x)


def _check_grid_in_range(crystal: CrystalSpec, grid: FrequencyGrid) -> None:
    axes = crystal.axes
    s_lam = grid.signal_wavelengths_nm
    i_lam = grid.idler_wavelengths_nm
    axes.signal.check_range(s_lam)
    axes.idler.check_range(i_lam)
    w_sum_max = grid.signal_omegas[-1] + grid.idler_omegas[-1]
    w_sum_min = grid.signal_omegas[0] + grid.idler_omegas[0]
    axes.pump.check_range(angular_frequency_to_nm(np.array([w_sum_max, w_sum_min])))


def compute_jsa(pump: PumpSpec, crystal: CrystalSpec, grid: FrequencyGrid) -> JointAmplitude:
    """Normalized joint amplitude f = N·α·φ on the grid.

    The grid is validated against the dispersion ranges before any matrix
    work; accumulation order is fixed so repeated runs are bit-identical.
    """
    _check_grid_in_range(crystal, grid)
    ws, wi = np.meshgrid(grid.signal_omegas, grid.idler_omegas, indexing="ij")
    f = pump_envelope(ws, wi, pump) * phasematching_function(ws, wi, crystal)
    norm = np.sqrt(np.sum(np.abs(f) ** 2) * grid.cell_area)
    if norm == 0.0:
        raise DegenerateInputError("joint amplitude vanishes on the whole grid")
    return JointAmplitude(grid=grid, amplitudes=f / norm)


def apply_filter(
    jsa: JointAmplitude,
    signal_filter: FilterSpec | None = None,
    idler_filter: FilterSpec | None = None,
) -> JointAmplitude:
    """Apply amplitude √T bandpass filters and renormalize.

    Records the transmitted fraction of |f|² per filtered arm and for the
    pair (heralding-loss metadata consumed by the efficiency budget).

    Raises:
        EmptyResultError: a filter removes all spectral weight.
    """
    f = jsa.amplitudes
    base = np.sum(np.abs(f) ** 2)
    survival_s = survival_i = None
    if signal_filter is not None:
        amp_s = np.sqrt(signal_filter.transmission(jsa.grid.signal_wavelengths_nm))
        survival_s = float(np.sum(np.abs(f * amp_s[:, None]) ** 2) / base)
        f = f * amp_s[:, None]
    if idler_filter is not None:
        amp_i = np.sqrt(idler_filter.transmission(jsa.grid.idler_wavelengths_nm))
        survival_i = float(np.sum(np.abs(jsa.amplitudes * amp_i[None, :]) ** 2) / base)
        f = f * amp_i[None, :]
    total = float(np.sum(np.abs(f) ** 2) / base)
    if total <= 0.0:
        raise EmptyResultError("filter pass-band does not overlap the grid")
    norm = np.sqrt(np.sum(np.abs(f) ** 2) * jsa.grid.cell_area)
    return JointAmplitude(
        grid=jsa.grid,
        amplitudes=f / norm,
        survival=FilterSurvival(signal=survival_s, idler=survival_i, total=total),
    )


def schmidt_decompose(jsa: JointAmplitude) -> SchmidtSpectrum:
    """Schmidt coefficients λ_k = σ_k²/Σσ² from the singular values.

    numpy returns singular values in descending order; ties keep their
    original index, which makes golden tests deterministic.
    """
    if not np.any(jsa.amplitudes):
        raise DegenerateInputError("all-zero joint amplitude has no Schmidt spectrum")
    if not jsa.normalized:
        raise InputError("schmidt_decompose requires a normalized joint amplitude")
    singular = np.linalg.svd(jsa.amplitudes, compute_uv=False)
    weights = singular**2
    return SchmidtSpectrum(coefficients=weights / weights.sum())


@dataclass(frozen=True)
class MarginalSpectrum:
    """Single-arm intensity spectrum on an ascending nm axis."""

    wavelengths_nm: np.ndarray
    intensity: np.ndarray
    fwhm_nm: float


def _interp_crossing(x0, x1, y0, y1, level):
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def _fwhm_linear(x: np.ndarray, y: np.ndarray) -> float:
    level = float(y.max()) / 2.0
    above = np.flatnonzero(y >= level)
    i0, i1 = int(above[0]), int(above[-1])
    left = x[i0] if i0 == 0 else _interp_crossing(x[i0 - 1], x[i0], y[i0 - 1], y[i0], level)
    right = x[i1] if i1 == len(x) - 1 else _interp_crossing(
        x[i1], x[i1 + 1], y[i1], y[i1 + 1], level
    )
    return float(right - left)


def marginal_spectrum(jsa: JointAmplitude, arm: str) -> MarginalSpectrum:
    """Row/column sums of |f|² for one arm, mapped to nm.

    The returned intensity sums to one; the FWHM is linearly interpolated
    between samples.
    """
    if not jsa.normalized:
        raise InputError("marginal_spectrum requires a normalized joint amplitude")
    if arm == "signal":
        weights = np.sum(jsa.intensity, axis=1)
        lam = jsa.grid.signal_wavelengths_nm
    elif arm == "idler":
        weights = np.sum(jsa.intensity, axis=0)
        lam = jsa.grid.idler_wavelengths_nm
    else:
        raise InputError(f"arm must be 'signal' or 'idler', got {arm!r}")
    weights = weights / weights.sum()
    order = np.argsort(lam)
    lam_sorted = lam[order]
    weights_sorted = weights[order]
    return MarginalSpectrum(
        wavelengths_nm=lam_sorted,
        intensity=weights_sorted,
        fwhm_nm=_fwhm_linear(lam_sorted, weights_sorted),
    )


def support_span(marginal: MarginalSpectrum, fraction: float = 0.05) -> float:
    """Contiguous span (nm) around the peak above fraction·peak.

    The 5% default recovers the appreciable extent of the central lobe
    including its pump-smoothed shoulders.
    """
    y = marginal.intensity / marginal.intensity.max()
    peak = int(np.argmax(y))
    lo = peak
    while lo > 0 and y[lo - 1] >= fraction:
        lo -= 1
    hi = peak
    while hi < len(y) - 1 and y[hi + 1] >= fraction:
        hi += 1
    return float(marginal.wavelengths_nm[hi] - marginal.wavelengths_nm[lo])


def optimize_pump_bandwidth(
    crystal: CrystalSpec,
    pump_center_nm: float,
    search_window_nm: tuple[float, float],
    grid: FrequencyGrid,
    repetition_rate_mhz: float = 81.0,
    tolerance_nm: float = 0.02,
) -> tuple[float, float]:
    """Golden-section maximization of unfiltered Schmidt purity.

    Returns (best intensity FWHM in nm, purity there). A five-point
    coarse scan must place the maximum strictly inside the window,
    otherwise a SearchError carrying the scan trace is raised.
    """
    lo, hi = search_window_nm
    if not 0.0 < lo < hi:
        raise InputError("search window must be a positive, increasing interval")

    def purity_at(fwhm_nm: float) -> float:
        pump = PumpSpec(
            center_wavelength_nm=pump_center_nm,
            intensity_fwhm_bandwidth_nm=fwhm_nm,
            repetition_rate_mhz=repetition_rate_mhz,
        )
        return schmidt_decompose(compute_jsa(pump, crystal, grid)).purity

    scan_points = np.linspace(lo, hi, 5)
    trace = [(float(x), purity_at(float(x))) for x in scan_points]
    best_idx = int(np.argmax([p for _, p in trace]))
    if best_idx in (0, len(trace) - 1):
        raise SearchError(
            f"no interior purity maximum bracketed in [{lo:g}, {hi:g}] nm", trace=trace
        )

    a, b = trace[best_idx - 1][0], trace[best_idx + 1][0]
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    f_c, f_d = purity_at(c), purity_at(d)
    while b - a > tolerance_nm:
        if f_c > f_d:
            b, d, f_d = d, c, f_c
            c = b - inv_phi * (b - a)
            f_c = purity_at(c)
        else:
            a, c, f_c = c, d, f_d
            d = a + inv_phi * (b - a)
            f_d = purity_at(d)
    best = c if f_c >= f_d else d
    return float(best), float(max(f_c, f_d))


def separable_gaussian_jsa(
    grid: FrequencyGrid, sum_sigma: float, diff_sigma: float
) -> JointAmplitude:
    """Synthetic Gaussian(sum)·Gaussian(difference) amplitude.

    With matched widths the cross term cancels and the amplitude is
    factorable by construction (purity → 1).
    """
    ws, wi = np.meshgrid(grid.signal_omegas, grid.idler_omegas, indexing="ij")
    center_sum = nm_to_angular_frequency(grid.center_signal_nm) + nm_to_angular_frequency(
        grid.center_idler_nm
    )
    center_diff = nm_to_angular_frequency(grid.center_signal_nm) - nm_to_angular_frequency(
        grid.center_idler_nm
    )
    f = np.exp(
        -((ws + wi - center_sum) ** 2) / sum_sigma**2
        - ((ws - wi - center_diff) ** 2) / diff_sigma**2
    ).astype(complex)
    norm = np.sqrt(np.sum(np.abs(f) ** 2) * grid.cell_area)
    return JointAmplitude(grid=grid, amplitudes=f / norm)
