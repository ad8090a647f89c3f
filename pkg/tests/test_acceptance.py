"""Acceptance suite: one test per criterion, tolerances pinned as stated.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass/fail
line per criterion.
"""

import time

import numpy as np
import pytest

import biphoton as bp


def report(number, detail):
    print(f"[acceptance] criterion {number} PASS: {detail}")


@pytest.fixture(scope="module")
def config():
    return bp.default_config()


@pytest.fixture(scope="module")
def default_jsa(config):
    return bp.compute_jsa(config.pump, config.crystal, config.grid)


@pytest.fixture(scope="module")
def default_purity(default_jsa):
    return bp.schmidt_decompose(default_jsa).purity


def test_criterion_1_gvm_wavelength(config):
    started = time.perf_counter()
    wavelength = bp.gvm_degenerate_wavelength(config.crystal.axes, config.crystal.temperature_c)
    elapsed = time.perf_counter() - started
    assert wavelength == pytest.approx(1582.0, abs=3.0)
    assert elapsed < 1.0
    report(1, f"GVM degenerate wavelength {wavelength:.2f} nm in {elapsed:.3f} s")


def test_criterion_2_poling_period(config):
    started = time.perf_counter()
    period = bp.solve_poling_period(785.0, 1570.0, 1570.0, 20.0, config.crystal.axes)
    elapsed = time.perf_counter() - started
    assert period == pytest.approx(46.15, abs=0.4)
    assert elapsed < 1.0
    report(2, f"poling period {period:.3f} um in {elapsed:.3f} s")


def test_criterion_3_unfiltered_purity(config):
    started = time.perf_counter()
    base = bp.schmidt_decompose(
        bp.compute_jsa(config.pump, config.crystal, config.grid)
    ).purity
    doubled_grid = bp.FrequencyGrid(
        center_signal_nm=config.grid.center_signal_nm,
        center_idler_nm=config.grid.center_idler_nm,
        half_span_nm=config.grid.half_span_nm,
        points_per_axis=config.grid.points_per_axis * 2,
    )
    doubled = bp.schmidt_decompose(
        bp.compute_jsa(config.pump, config.crystal, doubled_grid)
    ).purity
    elapsed = time.perf_counter() - started
    assert base == pytest.approx(0.84, abs=0.03)
    assert abs(doubled - base) < 0.002
    assert elapsed < 30.0
    report(
        3,
        f"purity {base:.4f} at 512^2, grid-doubling shift {abs(doubled - base):.5f}, "
        f"{elapsed:.1f} s",
    )


def test_criterion_4_pump_bandwidth_optimum(config):
    started = time.perf_counter()
    best, purity = bp.optimize_pump_bandwidth(
        config.crystal, config.pump.center_wavelength_nm, (2.0, 12.0), config.grid
    )
    elapsed = time.perf_counter() - started
    assert best == pytest.approx(5.35, abs=0.8)
    assert elapsed < 300.0
    report(4, f"optimal pump bandwidth {best:.2f} nm (purity {purity:.4f}) in {elapsed:.1f} s")


def test_criterion_5_hom_visibilities(default_jsa, default_purity):
    state = bp.heralded_spectral_state(default_jsa, "signal")
    visibility = bp.hom_visibility(state, state)
    assert visibility == pytest.approx(default_purity, abs=1e-6)

    spec = bp.FilterSpec(center_nm=1570.0, fwhm_nm=8.0, shape="gaussian")
    filtered = bp.apply_filter(default_jsa, spec, spec)
    filtered_state = bp.heralded_spectral_state(filtered, "signal")
    filtered_visibility = bp.hom_visibility(filtered_state, filtered_state)
    assert filtered_visibility >= 0.98

    assert bp.multipair_visibility_bound(0.0015) == 0.997
    report(
        5,
        f"identity visibility {visibility:.4f}, filtered {filtered_visibility:.4f}, "
        f"multipair bound 0.997 exact",
    )


def test_criterion_6_tomography_round_trip():
    target_fidelity = 0.979
    depolarization = 4.0 * (1.0 - target_fidelity) / 3.0
    truth = bp.model_state(depolarization=depolarization)
    closed_purity = 1.0 - 1.5 * depolarization + 0.75 * depolarization**2
    closed_tangle = max(0.0, (3.0 * (1.0 - depolarization) - 1.0) / 2.0) ** 2
    assert bp.fidelity_singlet(truth) == pytest.approx(target_fidelity, abs=1e-12)

    fidelity_errors, purity_errors, tangle_errors = [], [], []
    for seed in range(20):
        records = bp.simulate_tomography(truth, bp.full_settings(), 10_000, seed=seed)
        recovered = bp.reconstruct_mle(records)
        fidelity_errors.append(abs(bp.fidelity_singlet(recovered) - target_fidelity))
        purity_errors.append(abs(bp.state_purity(recovered) - closed_purity))
        tangle_errors.append(abs(bp.tangle(recovered) - closed_tangle))

    assert np.median(fidelity_errors) < 0.01
    assert np.median(purity_errors) < 0.01
    assert np.median(tangle_errors) < 0.02
    report(
        6,
        f"median |dF| {np.median(fidelity_errors):.4f}, |dP| {np.median(purity_errors):.4f}, "
        f"|dT| {np.median(tangle_errors):.4f} over 20 seeds",
    )


def test_criterion_7_spectrometer(config, default_jsa):
    started = time.perf_counter()
    window = config.pump.pulse_period_ns
    assert window == pytest.approx(12.35, abs=0.005)

    resolution_signal = bp.resolution_estimate(config.signal_dcf, config.bin_size_ns)
    resolution_idler = bp.resolution_estimate(config.idler_dcf, config.bin_size_ns)
    assert resolution_signal == pytest.approx(0.31, rel=0.10)
    assert resolution_idler == pytest.approx(0.33, rel=0.10)

    # separable case: the rank-1 factorization of the default amplitude
    u, s, vt = np.linalg.svd(default_jsa.amplitudes)
    f = s[0] * np.outer(u[:, 0], vt[0, :])
    f /= np.sqrt(np.sum(np.abs(f) ** 2) * default_jsa.grid.cell_area)
    separable = bp.JointAmplitude(grid=default_jsa.grid, amplitudes=f)
    histogram = bp.simulate_jsi_histogram(
        separable,
        config.signal_dcf,
        config.idler_dcf,
        config.pump,
        bin_size_ns=config.bin_size_ns,
        total_pairs=10**6,
        seed=config.seed,
    )
    _, dof, p_value = bp.chi2_independence(histogram.counts)
    assert p_value > 0.01
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    report(
        7,
        f"window {window:.4f} ns, resolutions {resolution_signal:.3f}/{resolution_idler:.3f} nm, "
        f"chi2 p={p_value:.3f} (dof {dof}) in {elapsed:.1f} s",
    )


def test_criterion_8_property_suites(config):
    instances = 100
    rng = np.random.default_rng(20260811)
    axes = config.crystal.axes

    # normalization and Schmidt sum on randomized small amplitudes
    for _ in range(instances):
        bandwidth = rng.uniform(2.0, 10.0)
        length = rng.uniform(0.5, 6.0)
        pump = bp.PumpSpec(center_wavelength_nm=785.0, intensity_fwhm_bandwidth_nm=bandwidth)
        crystal = bp.CrystalSpec(
            axes=axes, length_mm=length, poling_period_um=config.crystal.poling_period_um
        )
        grid = bp.FrequencyGrid(points_per_axis=32, half_span_nm=rng.uniform(30.0, 80.0))
        jsa = bp.compute_jsa(pump, crystal, grid)
        assert abs(jsa.total_probability() - 1.0) < 1e-9
        spectrum = bp.schmidt_decompose(jsa)
        assert abs(spectrum.coefficients.sum() - 1.0) < 1e-9

    # solver round trips at 1e-10
    for _ in range(instances):
        signal = rng.uniform(1450.0, 1620.0)
        idler = 1.0 / (1.0 / 785.0 - 1.0 / signal)
        period = bp.solve_poling_period(785.0, signal, idler, 20.0, axes)
        crystal = bp.CrystalSpec(axes=axes, length_mm=2.0, poling_period_um=period)
        mismatch = bp.phase_mismatch(
            crystal,
            bp.units.nm_to_angular_frequency(signal),
            bp.units.nm_to_angular_frequency(idler),
        )
        assert abs(mismatch) < 1e-10

    # PSD, trace and Hermiticity of the polarization model
    for _ in range(instances):
        state = bp.model_state(
            depolarization=rng.uniform(0.0, 1.0),
            amplitude_imbalance=rng.uniform(0.0, 1.0),
            phase_error_rad=rng.uniform(-np.pi, np.pi),
        )
        rho = state.rho
        assert np.max(np.abs(rho - rho.conj().T)) < 1e-10
        assert abs(np.trace(rho).real - 1.0) < 1e-9
        assert np.linalg.eigvalsh(rho)[0] > -1e-9

    # seeded determinism: byte-equal histograms and tomography records
    grid = bp.FrequencyGrid(points_per_axis=32)
    pump = config.pump
    crystal = bp.CrystalSpec(
        axes=axes, length_mm=2.0, poling_period_um=config.crystal.poling_period_um
    )
    jsa = bp.compute_jsa(pump, crystal, grid)
    truth = bp.model_state(depolarization=0.028)
    for _ in range(instances):
        seed = int(rng.integers(0, 2**31))
        h1 = bp.simulate_jsi_histogram(
            jsa, config.signal_dcf, config.idler_dcf, pump, total_pairs=2000, seed=seed
        )
        h2 = bp.simulate_jsi_histogram(
            jsa, config.signal_dcf, config.idler_dcf, pump, total_pairs=2000, seed=seed
        )
        assert h1.counts.tobytes() == h2.counts.tobytes()
        r1 = bp.simulate_tomography(truth, bp.full_settings(), 100, seed=seed)
        r2 = bp.simulate_tomography(truth, bp.full_settings(), 100, seed=seed)
        assert r1 == r2

    report(8, f"{instances} randomized instances per invariant family, all within bounds")
