"""Excitation spectroscopy of the transduction stage.

Sweeping the input-laser detuning and fitting the detected response
with a Lorentzian yields the transduction bandwidth; repeating over
input power maps out the power broadening, whose floor is the total
decay rate of the excited state.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import pipeline
from .physcore import (PLANCK_H, SPEED_OF_LIGHT, AtomSpecies, BeamField,
                       detuned_cross_section, resonant_cross_section)


class FitDiverged(RuntimeError):
    """The damped least-squares iteration kept increasing the residual."""


@dataclass(frozen=True)
class Spectrum:
    """Detected response versus input detuning."""
    detunings: np.ndarray        # rad/s, ascending
    response: np.ndarray         # detected photons per atom
    normalized: bool = False

    def __post_init__(self):
        if np.any(np.diff(self.detunings) <= 0):
            raise ValueError("detunings must be strictly ascending")
        if np.any(self.response < 0):
            raise ValueError("response must be non-negative")

    def normalize(self) -> "Spectrum":
        peak = float(np.max(self.response))
        if peak <= 0:
            raise ValueError("cannot normalize an identically zero spectrum")
        return Spectrum(self.detunings, self.response / peak,
                        normalized=True)


@dataclass(frozen=True)
class LorentzianFit:
    center: float        # rad/s
    fwhm: float          # rad/s
    amplitude: float
    offset: float
    residual_norm: float

    def __call__(self, x):
        half_sq = (self.fwhm / 2.0) ** 2
        return self.offset + self.amplitude * half_sq / (
            (np.asarray(x) - self.center) ** 2 + half_sq)


def _lorentz_model(x, offset, amplitude, center, fwhm):
    half_sq = (fwhm / 2.0) ** 2
    return offset + amplitude * half_sq / ((x - center) ** 2 + half_sq)


def _lorentz_jacobian(x, offset, amplitude, center, fwhm):
    d = x - center
    u = (fwhm / 2.0) ** 2
    denom = d * d + u
    lor = u / denom
    j = np.empty((x.size, 4))
    j[:, 0] = 1.0
    j[:, 1] = lor
    j[:, 2] = amplitude * u * 2.0 * d / denom**2
    j[:, 3] = amplitude * (fwhm / 2.0) * d * d / denom**2
    return j


def _initial_guess(x, y):
    offset = float(np.min(y))
    i_peak = int(np.argmax(y))
    amplitude = float(y[i_peak] - offset)
    center = float(x[i_peak])
    if amplitude <= 0:
        return offset, 0.0, center, float(x[-1] - x[0]) / 4.0
    half = offset + amplitude / 2.0
    above = y >= half
    idx = np.nonzero(above)[0]
    lo, hi = idx[0], idx[-1]

    def crossing(i0, i1):
        y0, y1 = y[i0], y[i1]
        if y1 == y0:
            return x[i0]
        return x[i0] + (half - y0) * (x[i1] - x[i0]) / (y1 - y0)

    left = crossing(lo - 1, lo) if lo > 0 else x[0]
    right = crossing(hi, hi + 1) if hi < len(x) - 1 else x[-1]
    fwhm = max(float(right - left), float(x[1] - x[0]))
    return offset, amplitude, center, fwhm


def fit_lorentzian(spectrum: Spectrum, max_iter: int = 200,
                   step_tol: float = 1e-10) -> LorentzianFit:
    """Damped Gauss-Newton least-squares fit of a Lorentzian peak.

    The fit runs in rescaled coordinates (peak height and width of
    order one) so angular-frequency axes pose no conditioning problem;
    parameters are mapped back afterwards.  Converged when the relative
    parameter step drops below ``step_tol`` (or after ``max_iter``
    iterations); raises :class:`FitDiverged` after ten consecutive
    damped steps that still increase the residual.
    """
    x_raw = np.asarray(spectrum.detunings, dtype=float)
    y_raw = np.asarray(spectrum.response, dtype=float)
    if x_raw.size < 5:
        raise ValueError("need at least 5 samples to fit")
    guess = _initial_guess(x_raw, y_raw)
    x_mid = guess[2]
    x_scale = guess[3] if guess[3] > 0 else (x_raw[-1] - x_raw[0]) / 4.0
    y_shift = float(np.min(y_raw))
    y_span = float(np.max(y_raw) - y_shift)
    y_scale = y_span if y_span > 0 else 1.0
    x = (x_raw - x_mid) / x_scale
    y = (y_raw - y_shift) / y_scale
    p = np.array([(guess[0] - y_shift) / y_scale, guess[1] / y_scale,
                  0.0, 1.0])
    resid = _lorentz_model(x, *p) - y
    cost = float(resid @ resid)
    lam = 1e-3
    bad_steps = 0
    for _ in range(max_iter):
        jac = _lorentz_jacobian(x, *p)
        jtj = jac.T @ jac
        grad = jac.T @ resid
        damp = np.diag(jtj).copy()
        damp[damp <= 0] = 1.0
        try:
            step = np.linalg.solve(jtj + lam * np.diag(damp), -grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jtj + lam * np.diag(damp), -grad,
                                   rcond=None)[0]
        p_new = p + step
        p_new[3] = abs(p_new[3])     # width stays positive
        resid_new = _lorentz_model(x, *p_new) - y
        cost_new = float(resid_new @ resid_new)
        # all parameters are O(1) in the rescaled coordinates
        rel_step = np.max(np.abs(step) / np.maximum(np.abs(p_new), 1.0))
        if cost_new <= cost * (1.0 + 1e-10):
            p, resid, cost = p_new, resid_new, cost_new
            lam = max(lam / 3.0, 1e-14)
            bad_steps = 0
            if rel_step < step_tol:
                break
        else:
            if rel_step < step_tol:
                break                # stationary to within step_tol
            lam *= 3.0
            bad_steps += 1
            if bad_steps >= 10:
                raise FitDiverged(
                    "residual increased for 10 consecutive damped steps")
    offset, amplitude, center, fwhm = p
    if fwhm <= 0:
        raise FitDiverged("fit collapsed to zero width")
    return LorentzianFit(center=float(x_mid + center * x_scale),
                         fwhm=float(fwhm * x_scale),
                         amplitude=float(amplitude * y_scale),
                         offset=float(offset * y_scale + y_shift),
                         residual_norm=float(np.sqrt(cost) * y_scale))


def input_beam_for_tau(tau_input: float, velocity: float,
                       detuning: float = 0.0) -> BeamField:
    """Square-profile input beam whose transit time is ``tau_input``.

    Both transverse dimensions scale with the transit length, so at
    fixed power the intensity falls as 1/tau^2.
    """
    width = tau_input * velocity
    return BeamField(power=0.0, waist_along_beam=width,
                     waist_transverse=width, detuning=detuning)


def excitation_spectrum(input_power: float, tau_input: float,
                        grid: np.ndarray,
                        setup: pipeline.PipelineSetup) -> Spectrum:
    """One full pipeline run per detuning point.

    The response is the detected signal attributable to the input
    beam: the input-off fluorescence of imperfectly pumped atoms is
    measured once and subtracted, so zero input power gives an
    identically zero spectrum.  The grid must be ascending with at
    least 41 points; symmetric grids produce symmetric spectra.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 41:
        raise ValueError("detuning grid needs at least 41 points")
    beam = input_beam_for_tau(tau_input, setup.atomic_beam.velocity)
    setup = replace(setup, input_beam=beam)
    prepared = pipeline.prepare(setup)
    background = pipeline.run_chain(setup, 0.0,
                                    prepared=prepared).detected_photons
    response = np.empty(grid.size)
    for i, det in enumerate(grid):
        res = pipeline.run_chain(setup, input_power, det,
                                 prepared=prepared)
        response[i] = max(res.detected_photons - background, 0.0)
    return Spectrum(detunings=grid, response=response)


def _fwhm_estimate(atom: AtomSpecies, omega_ac: float, tau: float) -> float:
    """Analytic saturated-linewidth estimate used to size detuning grids."""
    gtot = atom.gamma_total
    rate_tau = omega_ac**2 / gtot * tau
    return gtot * np.sqrt(1.0 + rate_tau / np.log(2.0))


def detuning_grid(atom: AtomSpecies, span_factor: float = 8.0,
                  points: int = 161, fwhm_scale: float = 1.0) -> np.ndarray:
    """Linear symmetric grid spanning span_factor x the linewidth floor."""
    half = span_factor * atom.gamma_total * fwhm_scale / 2.0
    return np.linspace(-half, half, points)


def bandwidth_vs_power(powers, tau_input: float,
                       setup: pipeline.PipelineSetup,
                       points: int = 161):
    """Fitted transduction bandwidth for each input power.

    Returns a list of (power, fwhm rad/s, fit) tuples; the grid span
    follows an analytic broadening estimate so the fitted peak always
    sits well inside it.
    """
    powers = np.asarray(powers, dtype=float)
    if powers.size == 0 or np.any(powers <= 0):
        raise ValueError("powers must be positive")
    if np.any(np.diff(powers) <= 0):
        raise ValueError("powers must be strictly ascending")
    from .physcore import rabi_from_power
    atom = setup.atom.with_sink(setup.sink_transduction)
    beam = input_beam_for_tau(tau_input, setup.atomic_beam.velocity)
    rows = []
    for power in powers:
        om = rabi_from_power(replace(beam, power=power), atom, "ac")
        est = _fwhm_estimate(atom, om, tau_input)
        scale = max(1.0, 3.5 * est / (8.0 * atom.gamma_total))
        grid = detuning_grid(atom, points=points, fwhm_scale=scale)
        spec = excitation_spectrum(power, tau_input, grid, setup)
        fit = fit_lorentzian(spec)
        rows.append((float(power), fit.fwhm, fit))
    return rows


def energy_scaling_check(tau_values, fixed_power: float,
                         atom: AtomSpecies, velocity: float,
                         detuning: float = 0.0):
    """Energy absorbed per atom, sigma*I*tau/(h c/lambda), versus tau.

    With both transverse beam dimensions tied to the transit length the
    area grows as tau^2, so the absorbed energy falls as 1/tau at fixed
    power.  Returns (tau, intensity, photons) rows.
    """
    photon_energy = PLANCK_H * SPEED_OF_LIGHT / atom.lambda_ac
    sigma = detuned_cross_section(atom, detuning)
    rows = []
    for tau in np.asarray(tau_values, dtype=float):
        if tau <= 0:
            raise ValueError("tau values must be positive")
        width = tau * velocity
        intensity = fixed_power / (np.pi * width * width)
        photons = sigma * intensity * tau / photon_energy
        rows.append((float(tau), float(intensity), float(photons)))
    return rows


def sigma_at(atom: AtomSpecies, detuning: float) -> float:
    """Unsaturated weak-leg cross-section at the given detuning."""
    return detuned_cross_section(atom, detuning)


def sigma0(atom: AtomSpecies) -> float:
    return resonant_cross_section(atom)
