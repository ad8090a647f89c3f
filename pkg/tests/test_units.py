import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from biphoton import units


@given(st.floats(min_value=300.0, max_value=4000.0))
def test_nm_omega_roundtrip(wavelength):
    omega = units.nm_to_angular_frequency(wavelength)
    assert abs(units.angular_frequency_to_nm(omega) - wavelength) < 1e-9


def test_known_conversion():
    # 1570 nm corresponds to 2*pi*c/1570 rad/fs
    omega = units.nm_to_angular_frequency(1570.0)
    assert np.isclose(omega, 2 * np.pi * 299.792458 / 1570.0, rtol=0, atol=1e-15)


def test_intensity_fwhm_to_sigma():
    sigma = units.intensity_fwhm_to_amplitude_sigma(1.0)
    # intensity exp(-2 x^2 / sigma^2) must hit 1/2 at x = 1/2
    assert np.isclose(np.exp(-2 * 0.25 / sigma**2), 0.5, atol=1e-12)


def test_width_conversion_first_order():
    fwhm_omega = units.fwhm_nm_to_fwhm_omega(5.35, 785.0)
    direct = units.nm_to_angular_frequency(785.0 - 2.675) - units.nm_to_angular_frequency(
        785.0 + 2.675
    )
    assert np.isclose(fwhm_omega, direct, rtol=1e-4)
