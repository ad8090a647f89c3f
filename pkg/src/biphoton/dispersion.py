"""Crystal dispersion from configurable Sellmeier coefficient sets.

Refractive index, wavenumber and inverse group velocity are evaluated from
named coefficient sets with optional temperature corrections. Coefficient
sets are data, not code: the shipped KTP registry lives in
``data/ktp_dispersion.yaml`` and users may register their own sets or load
a registry file (CLI flag ``--dispersion-file``).

Supported formula variants (wavelength λ in µm):

``sellmeier_poles_quadratic``
    n² = c₀ + Σₖ Bₖ/(1 − Cₖ/λ²) − D·λ² with coefficients laid out as
    [c₀, B₁, C₁, ..., Bₘ, Cₘ, D].
``constant``
    n = c₀, dispersionless (synthetic/test sets).

Thermal model: Δn(λ, T) = n₁(λ)·ΔT + n₂(λ)·ΔT² with n₁, n₂ polynomials in
inverse powers of λ (µm) and ΔT relative to the set's reference
temperature. A linear poling-expansion coefficient rides along for use by
the phase-matching layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, InputError, WavelengthRangeError
from .units import angular_frequency_to_nm, nm_to_angular_frequency

#: Default finite-difference step for group-delay derivatives, rad/fs.
DEFAULT_FD_STEP = 1e-4

_FORMULAS = ("sellmeier_poles_quadratic", "constant")


@dataclass(frozen=True)
class ThermalModel:
    """Temperature correction polynomials for one coefficient set.

    ``first_order`` and ``second_order`` hold aₘ with
    nᵢ(λ) = Σₘ aₘ·λ⁻ᵐ (λ in µm), in 1/°C and 1/°C² respectively.
    """

    first_order: tuple[float, ...] = ()
    second_order: tuple[float, ...] = ()
    poling_expansion_per_c: float = 0.0

    def index_correction(self, wavelength_um, delta_t):
        inv = 1.0 / np.asarray(wavelength_um, dtype=float)
        n1 = _inverse_poly(self.first_order, inv)
        n2 = _inverse_poly(self.second_order, inv)
        return n1 * delta_t + n2 * delta_t**2


def _inverse_poly(coeffs, inv_lambda):
    total = np.zeros_like(inv_lambda)
    for m, a in enumerate(coeffs):
        total = total + a * inv_lambda**m
    return total


@dataclass(frozen=True)
class SellmeierSet:
    """A named dispersion formula with validity range and thermal data."""

    name: str
    formula: str
    coefficients: tuple[float, ...]
    valid_range_nm: tuple[float, float]
    thermal: ThermalModel | None = None
    reference_temperature_c: float = 20.0
    source: str = ""

    def __post_init__(self):
        if self.formula not in _FORMULAS:
            raise InputError(
                f"unknown formula variant {self.formula!r}; expected one of {_FORMULAS}"
            )
        lo, hi = self.valid_range_nm
        if not lo < hi:
            raise InputError(f"set {self.name!r}: empty valid range [{lo}, {hi}] nm")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "valid_range_nm", (float(lo), float(hi)))

    def check_range(self, wavelength_nm):
        lo, hi = self.valid_range_nm
        w = np.asarray(wavelength_nm, dtype=float)
        if np.min(w) < lo or np.max(w) > hi:
            raise WavelengthRangeError(
                f"wavelength outside validity range of set {self.name!r}: "
                f"requested {np.min(w):.6g}..{np.max(w):.6g} nm, valid [{lo:g}, {hi:g}] nm"
            )


def _index_at_reference(sset: SellmeierSet, wavelength_um):
    c = sset.coefficients
    if sset.formula == "constant":
        return np.broadcast_to(c[0], np.shape(wavelength_um)).astype(float) \
            if np.ndim(wavelength_um) else c[0]
    # sellmeier_poles_quadratic: [c0, B1, C1, ..., Bm, Cm, D]
    lam2 = np.asarray(wavelength_um, dtype=float) ** 2
    n2 = c[0] + np.zeros_like(lam2)
    for b, pole in zip(c[1:-1:2], c[2:-1:2]):
        n2 = n2 + b / (1.0 - pole / lam2)
    n2 = n2 - c[-1] * lam2
    return np.sqrt(n2)


def refractive_index(sset: SellmeierSet, wavelength_nm, temperature_c: float = 20.0):
    """Refractive index n(λ, T) for one coefficient set.

    Thermal correction is applied relative to the set's reference
    temperature when thermal data are present; at the reference
    temperature it vanishes exactly.

    Raises:
        WavelengthRangeError: wavelength outside the set's validity range.
    """
    sset.check_range(wavelength_nm)
    lam_um = np.asarray(wavelength_nm, dtype=float) / 1000.0
    n = _index_at_reference(sset, lam_um)
    if sset.thermal is not None and temperature_c != sset.reference_temperature_c:
        n = n + sset.thermal.index_correction(
            lam_um, temperature_c - sset.reference_temperature_c
        )
    return n if np.ndim(wavelength_nm) else float(n)


def wavenumber(sset: SellmeierSet, wavelength_nm, temperature_c: float = 20.0):
    """Wavenumber k = 2π·n(λ, T)/λ in rad/µm."""
    n = refractive_index(sset, wavelength_nm, temperature_c)
    return 2.0 * np.pi * n / (np.asarray(wavelength_nm, dtype=float) / 1000.0)


def inverse_group_velocity(
    sset: SellmeierSet,
    wavelength_nm,
    temperature_c: float = 20.0,
    step_rad_fs: float = DEFAULT_FD_STEP,
):
    """Group delay per unit length k' = ∂k/∂ω in fs/µm.

    Central finite difference in angular frequency with the documented
    default step; positive for normal dispersion. The ±step neighbourhood
    must stay inside the set's validity range.
    """
    omega = nm_to_angular_frequency(wavelength_nm)
    k_hi = wavenumber(sset, angular_frequency_to_nm(omega + step_rad_fs), temperature_c)
    k_lo = wavenumber(sset, angular_frequency_to_nm(omega - step_rad_fs), temperature_c)
    return (k_hi - k_lo) / (2.0 * step_rad_fs)


def group_velocity(sset: SellmeierSet, wavelength_nm, temperature_c: float = 20.0):
    """Group velocity 1/k' in µm/fs."""
    return 1.0 / inverse_group_velocity(sset, wavelength_nm, temperature_c)


def constant_index_set(
    name: str, index: float, valid_range_nm: tuple[float, float] = (100.0, 10000.0)
) -> SellmeierSet:
    """Synthetic dispersionless set with n = index (k' = n/c exactly)."""
    return SellmeierSet(
        name=name,
        formula="constant",
        coefficients=(index,),
        valid_range_nm=valid_range_nm,
    )


@dataclass(frozen=True)
class CrystalAxes:
    """Coefficient sets bound to the pump, signal and idler polarizations.

    For type-II configurations signal and idler ride orthogonal axes
    (different sets); equal sets model a type-I-like synthetic process.
    """

    pump: SellmeierSet
    signal: SellmeierSet
    idler: SellmeierSet

    @property
    def is_type_ii(self) -> bool:
        return self.signal.name != self.idler.name


class DispersionRegistry:
    """Named collection of Sellmeier sets."""

    def __init__(self, sets=()):
        self._sets: dict[str, SellmeierSet] = {}
        for s in sets:
            self.register(s)

    def register(self, sset: SellmeierSet) -> None:
        if sset.name in self._sets:
            raise InputError(f"duplicate set name {sset.name!r} in registry")
        self._sets[sset.name] = sset

    def get(self, name: str) -> SellmeierSet:
        try:
            return self._sets[name]
        except KeyError:
            raise InputError(
                f"unknown dispersion set {name!r}; registry has {sorted(self._sets)}"
            ) from None

    def names(self) -> list[str]:
        return sorted(self._sets)

    def axes(self, pump: str, signal: str, idler: str) -> CrystalAxes:
        return CrystalAxes(self.get(pump), self.get(signal), self.get(idler))


def _thermal_from_dict(d: dict) -> ThermalModel:
    return ThermalModel(
        first_order=tuple(d.get("first_order", ())),
        second_order=tuple(d.get("second_order", ())),
        poling_expansion_per_c=float(d.get("poling_expansion_per_c", 0.0)),
    )


def load_registry(path: str | Path) -> DispersionRegistry:
    """Load a registry from a YAML file (schema documented in the data dir)."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"failed to parse dispersion file {path}: {exc}") from exc
    return _registry_from_dict(raw, origin=str(path))


def _registry_from_dict(raw: dict, origin: str) -> DispersionRegistry:
    if not isinstance(raw, dict) or "sets" not in raw:
        raise ConfigError(f"{origin}: expected a mapping with a 'sets' list")
    registry = DispersionRegistry()
    for entry in raw["sets"]:
        try:
            thermal = entry.get("thermal")
            registry.register(
                SellmeierSet(
                    name=entry["name"],
                    formula=entry["formula"],
                    coefficients=tuple(entry["coefficients"]),
                    valid_range_nm=tuple(entry["valid_range_nm"]),
                    thermal=_thermal_from_dict(thermal) if thermal else None,
                    reference_temperature_c=float(entry.get("reference_temperature_c", 20.0)),
                    source=entry.get("source", ""),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{origin}: bad set entry {entry!r}: {exc}") from exc
    return registry


_builtin_cache: DispersionRegistry | None = None


def builtin_registry() -> DispersionRegistry:
    """The shipped KTP registry (cached)."""
    global _builtin_cache
    if _builtin_cache is None:
        text = resources.files("biphoton.data").joinpath("ktp_dispersion.yaml").read_text()
        _builtin_cache = _registry_from_dict(yaml.safe_load(text), origin="builtin registry")
    return _builtin_cache


def ktp_axes(registry: DispersionRegistry | None = None) -> CrystalAxes:
    """Default type-II KTP axis binding: pump/idler on y, signal on z."""
    reg = registry if registry is not None else builtin_registry()
    return reg.axes(pump="ktp_y", signal="ktp_z", idler="ktp_y")
