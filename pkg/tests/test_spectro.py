import numpy as np
import pytest

import lamtrans as lt
from lamtrans import spectro
from lamtrans.spectro import Spectrum, fit_lorentzian

SIGMA0 = 1.0742958658702937e-12


def lorentz(x, offset, amplitude, center, fwhm):
    return offset + amplitude * (fwhm / 2) ** 2 / ((x - center) ** 2
                                                   + (fwhm / 2) ** 2)


def test_fit_recovers_exact_samples():
    x = np.linspace(-4e8, 4e8, 201)
    cases = [(0.1, 2.0, 2.5e7, 1.2e8),
             (0.0, 0.013, -4.0e6, 1.19e8),
             (3.0, 11.0, 8.0e7, 2.4e8)]
    for offset, amplitude, center, fwhm in cases:
        fit = fit_lorentzian(Spectrum(x, lorentz(x, offset, amplitude,
                                                 center, fwhm)))
        assert fit.fwhm == pytest.approx(fwhm, rel=1e-9)
        assert fit.amplitude == pytest.approx(amplitude, rel=1e-9)
        assert fit.offset == pytest.approx(offset, abs=1e-9 * amplitude)
        assert fit.center == pytest.approx(center, abs=1e-9 * fwhm)
        assert fit.residual_norm < 1e-9 * amplitude


def test_fit_idempotent_on_own_curve():
    x = np.linspace(-4e8, 4e8, 161)
    y = lorentz(x, 0.23, 1.7, 3.1e7, 1.4e8) \
        + 0.01 * 1.7 * np.sin(x / 2.3e7)
    y -= min(0.0, y.min())
    first = fit_lorentzian(Spectrum(x, y))
    resampled = Spectrum(x, first(x))
    second = fit_lorentzian(resampled)
    assert second.fwhm == pytest.approx(first.fwhm, rel=1e-12)
    assert second.amplitude == pytest.approx(first.amplitude, rel=1e-12)
    assert second.center == pytest.approx(first.center,
                                          abs=1e-12 * first.fwhm)


def test_fit_survives_one_percent_perturbation():
    x = np.linspace(-4e8, 4e8, 201)
    fwhm = 1.19e8
    y = lorentz(x, 0.05, 1.0, 0.0, fwhm)
    y = y + 0.01 * np.sin(x / 3.7e7)     # deterministic 1% corruption
    y -= min(0.0, y.min())
    fit = fit_lorentzian(Spectrum(x, y))
    assert abs(fit.fwhm - fwhm) / fwhm < 0.03


def test_fit_flat_spectrum_degenerate():
    x = np.linspace(-1e8, 1e8, 101)
    y = np.full_like(x, 0.4)
    try:
        fit = fit_lorentzian(Spectrum(x, y))
        assert abs(fit.amplitude) < 1e-6
    except spectro.FitDiverged:
        pass


def test_spectrum_type_validation():
    x = np.linspace(-1.0, 1.0, 41)
    with pytest.raises(ValueError):
        Spectrum(x, -np.ones_like(x))
    with pytest.raises(ValueError):
        Spectrum(x[::-1], np.ones_like(x))
    flat = Spectrum(x, np.zeros_like(x))
    with pytest.raises(ValueError):
        flat.normalize()


def test_grid_needs_41_points(paper_setup):
    with pytest.raises(ValueError):
        spectro.excitation_spectrum(1e-6, 0.92e-6, np.linspace(-1e8, 1e8, 21),
                                    paper_setup)


def test_spectrum_zero_power_is_zero(paper_setup, ba_sink):
    grid = spectro.detuning_grid(ba_sink, points=41)
    spec = spectro.excitation_spectrum(0.0, 0.92e-6, grid, paper_setup)
    assert np.all(spec.response == 0.0)


def test_spectrum_symmetric_and_peaked(paper_setup, ba_sink):
    half = np.linspace(0.0, 4 * ba_sink.gamma_total, 21)
    grid = np.concatenate([-half[::-1], half[1:]])
    spec = spectro.excitation_spectrum(2e-6, 0.92e-6, grid, paper_setup)
    asym = np.max(np.abs(spec.response - spec.response[::-1]))
    assert asym < 1e-9 * spec.response.max()
    assert np.argmax(spec.response) == len(grid) // 2
    norm = spec.normalize()
    assert norm.response.max() == 1.0


def test_fitted_curve_half_maximum_property():
    x = np.linspace(-4e8, 4e8, 201)
    fit = fit_lorentzian(Spectrum(x, lorentz(x, 0.2, 1.4, 1e7, 1.3e8)))
    half_point = fit.offset + fit.amplitude / 2.0
    assert fit(fit.center + fit.fwhm / 2) == pytest.approx(half_point,
                                                           rel=1e-9)
    assert fit(fit.center - fit.fwhm / 2) == pytest.approx(half_point,
                                                           rel=1e-9)


def test_bandwidth_orderings(paper_setup, ba_sink):
    powers = [1e-6, 1e-4]
    fast = spectro.bandwidth_vs_power(powers, 0.92e-6, paper_setup,
                                      points=41)
    slow = spectro.bandwidth_vs_power(powers, 2.34e-6, paper_setup,
                                      points=41)
    for rows in (fast, slow):
        fwhms = [f for _, f, _ in rows]
        assert fwhms[1] >= fwhms[0]                      # power broadening
        assert fwhms[0] >= 0.95 * ba_sink.gamma_total    # linewidth floor
    for (pf, ff, _), (ps, fs, _) in zip(fast, slow):
        assert ff >= fs                                  # shorter transit


def test_bandwidth_rejects_bad_powers(paper_setup):
    with pytest.raises(ValueError):
        spectro.bandwidth_vs_power([], 0.92e-6, paper_setup)
    with pytest.raises(ValueError):
        spectro.bandwidth_vs_power([1e-4, 1e-6], 0.92e-6, paper_setup)


def test_energy_scaling(ba):
    rows = lt.energy_scaling_check([1e-6, 2e-6, 4e-6], 1e-3, ba, 750.0)
    taus = [r[0] for r in rows]
    photons = [r[2] for r in rows]
    assert photons[0] == pytest.approx(2 * photons[1], rel=1e-12)
    assert photons[1] == pytest.approx(2 * photons[2], rel=1e-12)
    # energy * tau is the scale-invariant combination
    products = [t * p for t, p in zip(taus, photons)]
    assert np.ptp(products) < 1e-12 * products[0]


def test_cross_section_points(ba):
    assert spectro.sigma0(ba) == pytest.approx(SIGMA0, rel=1e-12)
    assert spectro.sigma_at(ba, 0.0) == pytest.approx(SIGMA0, rel=1e-12)
    assert spectro.sigma_at(ba, ba.gamma_ac / 2) \
        == pytest.approx(SIGMA0 / 2, rel=1e-12)
