"""Run configuration: YAML schema, validation, defaults and digests.

One versioned YAML document drives every pipeline run; the shipped
default profile encodes the reference source parameters (785 nm pump,
5.35 nm bandwidth, 2 mm crystal, 46.15 µm poling, 81 MHz, 512² grid).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from .dispersion import CrystalAxes, DispersionRegistry, builtin_registry, load_registry
from .errors import ConfigError
from .jsa import FilterSpec, FrequencyGrid
from .phasematch import CrystalSpec, PumpSpec
from .spectrometer import DEFAULT_BIN_NS, DcfSpec

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Fully validated inputs for one reproducible pipeline run."""

    pump: PumpSpec
    crystal: CrystalSpec
    grid: FrequencyGrid
    signal_filter: FilterSpec | None
    idler_filter: FilterSpec | None
    signal_dcf: DcfSpec
    idler_dcf: DcfSpec
    bin_size_ns: float
    seed: int
    output_dir: str
    dispersion_file: str | None = None


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"missing required field {context}.{key}")
    return mapping[key]


def _filter_from_dict(d: dict | None, context: str) -> FilterSpec | None:
    if d is None:
        return None
    try:
        return FilterSpec(
            center_nm=float(_require(d, "center_nm", context)),
            fwhm_nm=float(_require(d, "fwhm_nm", context)),
            shape=d.get("shape", "gaussian"),
            peak_transmission=float(d.get("peak_transmission", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad filter spec at {context}: {exc}") from exc


def _dcf_from_dict(d: dict, context: str) -> DcfSpec:
    try:
        return DcfSpec(
            total_dispersion_ps_per_nm=float(
                _require(d, "total_dispersion_ps_per_nm", context)
            ),
            reference_wavelength_nm=float(d.get("reference_wavelength_nm", 1570.0)),
            insertion_delay_ns=float(d.get("insertion_delay_ns", 0.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad DCF spec at {context}: {exc}") from exc


def _config_from_dict(raw: dict, registry: DispersionRegistry, origin: str) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError(f"{origin}: top level must be a mapping")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"{origin}: unsupported schema_version {version!r} (expected {SCHEMA_VERSION})"
        )

    pump_raw = _require(raw, "pump", origin)
    crystal_raw = _require(raw, "crystal", origin)
    grid_raw = raw.get("grid", {})
    spectro_raw = raw.get("spectrometer", {})
    filters_raw = raw.get("filters", {}) or {}

    try:
        pump = PumpSpec(
            center_wavelength_nm=float(_require(pump_raw, "center_wavelength_nm", "pump")),
            intensity_fwhm_bandwidth_nm=float(
                _require(pump_raw, "intensity_fwhm_bandwidth_nm", "pump")
            ),
            repetition_rate_mhz=float(pump_raw.get("repetition_rate_mhz", 81.0)),
            pulse_duration_fs=(
                float(pump_raw["pulse_duration_fs"])
                if pump_raw.get("pulse_duration_fs") is not None
                else None
            ),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{origin}: bad pump section: {exc}") from exc

    try:
        axes = CrystalAxes(
            pump=registry.get(crystal_raw.get("pump_axis", "ktp_y")),
            signal=registry.get(crystal_raw.get("signal_axis", "ktp_z")),
            idler=registry.get(crystal_raw.get("idler_axis", "ktp_y")),
        )
        crystal = CrystalSpec(
            axes=axes,
            length_mm=float(_require(crystal_raw, "length_mm", "crystal")),
            poling_period_um=float(_require(crystal_raw, "poling_period_um", "crystal")),
            temperature_c=float(crystal_raw.get("temperature_c", 20.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{origin}: bad crystal section: {exc}") from exc

    try:
        grid = FrequencyGrid(
            center_signal_nm=float(grid_raw.get("center_signal_nm", 1570.0)),
            center_idler_nm=float(grid_raw.get("center_idler_nm", 1570.0)),
            half_span_nm=float(grid_raw.get("half_span_nm", 60.0)),
            points_per_axis=int(grid_raw.get("points_per_axis", 512)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{origin}: bad grid section: {exc}") from exc

    signal_dcf = _dcf_from_dict(
        spectro_raw.get(
            "signal_dcf",
            {
                "total_dispersion_ps_per_nm": -413.0,
                "reference_wavelength_nm": 1570.0,
                "insertion_delay_ns": 6.173,
            },
        ),
        "spectrometer.signal_dcf",
    )
    idler_dcf = _dcf_from_dict(
        spectro_raw.get(
            "idler_dcf",
            {
                "total_dispersion_ps_per_nm": -388.0,
                "reference_wavelength_nm": 1570.0,
                "insertion_delay_ns": 6.173,
            },
        ),
        "spectrometer.idler_dcf",
    )

    return RunConfig(
        pump=pump,
        crystal=crystal,
        grid=grid,
        signal_filter=_filter_from_dict(filters_raw.get("signal"), "filters.signal"),
        idler_filter=_filter_from_dict(filters_raw.get("idler"), "filters.idler"),
        signal_dcf=signal_dcf,
        idler_dcf=idler_dcf,
        bin_size_ns=float(spectro_raw.get("bin_size_ns", DEFAULT_BIN_NS)),
        seed=int(raw.get("seed", 0)),
        output_dir=str(raw.get("output_dir", "out")),
        dispersion_file=raw.get("dispersion_file"),
    )


def load_config(path: str | Path, dispersion_file: str | Path | None = None) -> RunConfig:
    """Load and validate a YAML run configuration.

    ``dispersion_file`` (CLI ``--dispersion-file``) overrides the file
    named inside the config; the shipped registry is the fallback.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"failed to parse {path}: {exc}") from exc
    registry_source = dispersion_file or (raw or {}).get("dispersion_file")
    if registry_source is not None:
        registry_path = Path(registry_source)
        if not registry_path.is_absolute():
            registry_path = path.parent / registry_path
        if not registry_path.exists():
            raise ConfigError(f"dispersion file does not exist: {registry_path}")
        registry = load_registry(registry_path)
    else:
        registry = builtin_registry()
    return _config_from_dict(raw, registry, origin=str(path))


def default_config(dispersion_file: str | Path | None = None) -> RunConfig:
    """The shipped default profile (reference source parameters)."""
    text = resources.files("biphoton.data").joinpath("default_profile.yaml").read_text()
    if dispersion_file is not None:
        registry_path = Path(dispersion_file)
        if not registry_path.exists():
            raise ConfigError(f"dispersion file does not exist: {registry_path}")
        registry = load_registry(registry_path)
    else:
        registry = builtin_registry()
    return _config_from_dict(yaml.safe_load(text), registry, origin="default profile")


def config_to_dict(config: RunConfig) -> dict:
    """Serializable mapping mirroring the YAML schema."""
    d: dict = {
        "schema_version": SCHEMA_VERSION,
        "pump": {
            "center_wavelength_nm": config.pump.center_wavelength_nm,
            "intensity_fwhm_bandwidth_nm": config.pump.intensity_fwhm_bandwidth_nm,
            "repetition_rate_mhz": config.pump.repetition_rate_mhz,
            "pulse_duration_fs": config.pump.pulse_duration_fs,
        },
        "crystal": {
            "length_mm": config.crystal.length_mm,
            "poling_period_um": config.crystal.poling_period_um,
            "temperature_c": config.crystal.temperature_c,
            "pump_axis": config.crystal.axes.pump.name,
            "signal_axis": config.crystal.axes.signal.name,
            "idler_axis": config.crystal.axes.idler.name,
        },
        "grid": {
            "center_signal_nm": config.grid.center_signal_nm,
            "center_idler_nm": config.grid.center_idler_nm,
            "half_span_nm": config.grid.half_span_nm,
            "points_per_axis": config.grid.points_per_axis,
        },
        "spectrometer": {
            "signal_dcf": {
                "total_dispersion_ps_per_nm": config.signal_dcf.total_dispersion_ps_per_nm,
                "reference_wavelength_nm": config.signal_dcf.reference_wavelength_nm,
                "insertion_delay_ns": config.signal_dcf.insertion_delay_ns,
            },
            "idler_dcf": {
                "total_dispersion_ps_per_nm": config.idler_dcf.total_dispersion_ps_per_nm,
                "reference_wavelength_nm": config.idler_dcf.reference_wavelength_nm,
                "insertion_delay_ns": config.idler_dcf.insertion_delay_ns,
            },
            "bin_size_ns": config.bin_size_ns,
        },
        "seed": config.seed,
        "output_dir": config.output_dir,
        "dispersion_file": config.dispersion_file,
    }
    filters = {}
    for arm, spec in (("signal", config.signal_filter), ("idler", config.idler_filter)):
        if spec is not None:
            filters[arm] = {
                "center_nm": spec.center_nm,
                "fwhm_nm": spec.fwhm_nm,
                "shape": spec.shape,
                "peak_transmission": spec.peak_transmission,
            }
    if filters:
        d["filters"] = filters
    return d


def save_config(config: RunConfig, path: str | Path) -> None:
    """Write a config back to YAML (round-trips through load_config)."""
    Path(path).write_text(yaml.safe_dump(config_to_dict(config), sort_keys=True))


def config_digest(config: RunConfig) -> str:
    """Short provenance digest embedded in every output file.

    Hashes the scientific content only; the output directory is where
    results land, not part of what was computed.
    """
    payload = config_to_dict(config)
    payload.pop("output_dir")
    canonical = yaml.safe_dump(payload, sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]
