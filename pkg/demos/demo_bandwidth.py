"""Transduction bandwidth: excitation spectroscopy plus Lorentzian fits.

Scanning the input-laser detuning and fitting the detected response
gives the transduction bandwidth.  It power-broadens, and broadens
faster for shorter input transits (at fixed power the intensity grows
as 1/tau^2); toward zero power it converges to the total decay rate of
the excited state, 18.97 MHz for barium with the D-state channel.
"""
import numpy as np

import lamtrans as lt
from lamtrans import spectro

atom = lt.barium138()
setup = lt.PipelineSetup(
    atom=atom,
    atomic_beam=lt.AtomicBeam(velocity=750.0, density=2.82e6),
    pump=lt.BeamField(power=0.1, waist_along_beam=3.62e-6 * 750.0,
                      waist_transverse=2.55e-3, stretch_factor=20.0),
    input_beam=lt.input_beam_for_tau(0.92e-6, 750.0),
    probe=lt.BeamField(power=6.893e-3, waist_along_beam=0.94e-3,
                       waist_transverse=0.94e-3),
    chain=lt.DetectionChain(),
)

# %% one spectrum, fitted
grid = spectro.detuning_grid(atom.with_sink(True), points=61)
spec = spectro.excitation_spectrum(1e-5, 0.92e-6, grid, setup)
fit = spectro.fit_lorentzian(spec)
print(f"single spectrum at 10 uW, 0.92 us transit:")
print(f"  fitted FWHM     : {fit.fwhm / (2 * np.pi * 1e6):.2f} MHz")
print(f"  fitted centre   : {fit.center / (2 * np.pi * 1e6):+.3f} MHz")
print(f"  residual norm   : {fit.residual_norm:.2e}")

# %% bandwidth vs power for both input transits
powers = [1e-6, 1e-5, 1e-4, 3e-4]
print("\npower broadening (FWHM in MHz):")
print("  power    0.92 us   2.34 us")
table = {}
for tau in (0.92e-6, 2.34e-6):
    table[tau] = spectro.bandwidth_vs_power(powers, tau, setup, points=61)
for i, p in enumerate(powers):
    f1 = table[0.92e-6][i][1] / (2 * np.pi * 1e6)
    f2 = table[2.34e-6][i][1] / (2 * np.pi * 1e6)
    print(f"  {p * 1e6:5.0f} uW  {f1:6.2f}   {f2:6.2f}")
floor = atom.with_sink(True).gamma_total / (2 * np.pi * 1e6)
print(f"  (decay-rate floor: {floor:.2f} MHz)")

# %% the 1/tau energy argument behind the transit-time ordering
rows = lt.energy_scaling_check([0.92e-6, 1.84e-6, 3.68e-6], 1e-4, atom,
                               750.0)
print("\nenergy absorbed per atom at fixed power, area ~ tau^2:")
for tau, intensity, photons in rows:
    print(f"  tau {tau * 1e6:.2f} us -> {photons:.3e} photons"
          f"  (photons x tau = {photons * tau:.3e})")
