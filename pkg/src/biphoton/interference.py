"""Two-source Hong-Ou-Mandel interference from heralded spectral states.

Heralding one arm of a joint amplitude and tracing the other leaves a
mixed single-photon spectral state ρ; the interference visibility between
two independently heralded photons is the state overlap Tr(ρ_a ρ_b), and
the coincidence dip is traced out by a relative-delay phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AxisMismatchError, DegenerateInputError, InputError, StateError
from .jsa import FilterSpec, JointAmplitude

_HERMITICITY_TOL = 1e-10
_TRACE_TOL = 1e-9
_EIGENVALUE_FLOOR = -1e-10


@dataclass
class SpectralState:
    """Single-photon spectral density matrix on a shared frequency axis."""

    omegas: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        n = len(self.omegas)
        if self.density.shape != (n, n):
            raise StateError(
                f"density shape {self.density.shape} does not match axis length {n}"
            )
        if np.max(np.abs(self.density - self.density.conj().T)) > _HERMITICITY_TOL:
            raise StateError("density matrix is not Hermitian")
        trace = complex(np.trace(self.density))
        if abs(trace - 1.0) > _TRACE_TOL:
            raise StateError(f"density matrix trace is {trace!r}, expected 1")
        smallest = float(np.linalg.eigvalsh(self.density)[0])
        if smallest < _EIGENVALUE_FLOOR:
            raise StateError(f"density matrix has negative eigenvalue {smallest:.3e}")

    @property
    def purity(self) -> float:
        return float(np.real(np.vdot(self.density, self.density)))


@dataclass(frozen=True)
class HomCurve:
    """Coincidence probability versus relative delay.

    visibility = 1 − min/baseline with the ideal 0.5 large-delay baseline.
    """

    delays_fs: np.ndarray
    coincidence_probability: np.ndarray
    visibility: float

    def __post_init__(self):
        if len(self.delays_fs) != len(self.coincidence_probability):
            raise InputError("delays and probabilities must have equal length")


def heralded_spectral_state(
    jsa: JointAmplitude,
    heralded_arm: str = "signal",
    herald_filter: FilterSpec | None = None,
) -> SpectralState:
    """Reduced state of one arm after detecting its partner.

    ρ(ω, ω') = Σ_h f(ω, ω_h) f*(ω', ω_h) Δω_h with any herald filter
    applied to the traced arm first; Tr(ρ²) equals the Schmidt purity of
    the correspondingly filtered joint amplitude.
    """
    if not jsa.normalized:
        raise InputError("heralded_spectral_state requires a normalized joint amplitude")
    grid = jsa.grid
    if heralded_arm == "signal":
        f = jsa.amplitudes
        herald_lam = grid.idler_wavelengths_nm
        omegas = grid.signal_omegas
        d_herald = grid.d_omega_idler
    elif heralded_arm == "idler":
        f = jsa.amplitudes.T
        herald_lam = grid.signal_wavelengths_nm
        omegas = grid.idler_omegas
        d_herald = grid.d_omega_signal
    else:
        raise InputError(f"heralded_arm must be 'signal' or 'idler', got {heralded_arm!r}")
    if herald_filter is not None:
        f = f * np.sqrt(herald_filter.transmission(herald_lam))[None, :]
    rho = (f @ f.conj().T) * d_herald
    trace = float(np.real(np.trace(rho)))
    if trace <= 0.0:
        raise DegenerateInputError("herald filter removed all spectral weight")
    return SpectralState(omegas=omegas, density=rho / trace)


def _check_shared_axis(a: SpectralState, b: SpectralState) -> None:
    if a.omegas.shape != b.omegas.shape or not np.array_equal(a.omegas, b.omegas):
        raise AxisMismatchError(
            "spectral states live on different grids; recompute on a shared axis "
            "(no implicit resampling)"
        )


def hom_visibility(a: SpectralState, b: SpectralState) -> float:
    """Interference visibility Tr(ρ_a ρ_b), clamped to [0, 1]."""
    _check_shared_axis(a, b)
    overlap = float(np.real(np.vdot(b.density, a.density)))
    return min(1.0, max(0.0, overlap))


def hom_curve(a: SpectralState, b: SpectralState, delays_fs) -> HomCurve:
    """Coincidence probability P(τ) = ½[1 − Re Tr(ρ_a D ρ_b D†)].

    D(τ) = diag(e^{iωτ}); the baseline is ½ for delays far beyond the
    coherence time (and below the discrete-grid revival 2π/Δω), and the
    τ = 0 value is ½(1 − visibility).
    """
    _check_shared_axis(a, b)
    delays = np.asarray(delays_fs, dtype=float)
    overlap_matrix = a.density * b.density.T
    probabilities = np.empty(len(delays))
    for idx, tau in enumerate(delays):
        phase = np.exp(1j * a.omegas * tau)
        term = np.real(phase.conj() @ overlap_matrix @ phase)
        probabilities[idx] = 0.5 * (1.0 - term)
    visibility = 1.0 - float(probabilities.min()) / 0.5
    return HomCurve(
        delays_fs=delays,
        coincidence_probability=probabilities,
        visibility=min(1.0, max(0.0, visibility)),
    )


def multipair_visibility_bound(pair_probability: float) -> float:
    """First-order multi-pair ceiling 1 − 2·p on the visibility."""
    if not 0.0 <= pair_probability < 0.25:
        raise InputError(
            f"pair probability must be in [0, 0.25), got {pair_probability!r}"
        )
    return 1.0 - 2.0 * pair_probability


@dataclass(frozen=True)
class VisibilityPrediction:
    """Itemized two-source visibility prediction."""

    spectral: float
    multipair_bound: float

    @property
    def total(self) -> float:
        return self.spectral * self.multipair_bound


def predict_visibility(
    spectral_visibility: float, pair_probability: float
) -> VisibilityPrediction:
    """Combine the spectral overlap with the multi-pair bound."""
    return VisibilityPrediction(
        spectral=spectral_visibility,
        multipair_bound=multipair_visibility_bound(pair_probability),
    )
