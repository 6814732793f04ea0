"""Per-atom photon budget of the full transduction chain.

One barium atom flies through pump, input and probe beams.  The run
reports how much population is prepared in the metastable state, how
many infrared photons are absorbed, how many visible photons the
cycling transition emits, and what survives the detection chain.
"""
from dataclasses import replace

import lamtrans as lt

atom = lt.barium138()
beam = lt.AtomicBeam(velocity=750.0, density=2.82e6)

# reference free-space geometry: 100 mW pump stretched 20x (72.4 us),
# input beam sized for a 2.34 us transit, ~1 mm probe inside the
# 2.92 us field of view of the collection objective
setup = lt.PipelineSetup(
    atom=atom,
    atomic_beam=beam,
    pump=lt.BeamField(power=0.1, waist_along_beam=3.62e-6 * 750.0,
                      waist_transverse=2.55e-3, stretch_factor=20.0),
    input_beam=lt.input_beam_for_tau(2.34e-6, 750.0),
    probe=lt.BeamField(power=6.893e-3, waist_along_beam=0.94e-3,
                       waist_transverse=0.94e-3),
    chain=lt.DetectionChain(),
)

# %% one pass at a saturating input power
prepared = lt.prepare(setup)
res = lt.run_chain(setup, input_power=1e-3, prepared=prepared)
probe_sat = setup.probe.intensity / lt.saturation_intensity(atom, "ab")
print(f"pump transfer to metastable state : {res.preparation.pumping_efficiency:.4f}")
print(f"infrared photons absorbed per atom: {res.transduction.absorbed_photons:.4f}")
print(f"probe saturation parameter I/Isat : {probe_sat:.1f}")
print(f"visible photons emitted per atom  : {res.detection.emitted_photons:.1f}")
print(f"photons at the counter per atom   : {res.detected_photons:.3f}")
print(f"amplified internal efficiency     : {res.internal_efficiency:.3f}")
print(f"counter rate                      : {res.count_rate:.3e} /s")

# %% a 100x weaker probe amplifies far less
weak = replace(setup, probe=replace(setup.probe, power=6.893e-5))
res_w = lt.run_chain(weak, input_power=1e-3, prepared=prepared)
print(f"\nweak probe (I/Isat ~ 0.17): eta = {res_w.internal_efficiency:.3f}")

# %% free-space absorption probability scale for one input photon
rsc = lt.scattering_ratio(atom, setup.input_beam.area)
print(f"\nfree-space scattering ratio sigma0/A: {rsc:.2e}"
      " (why a cavity helps, see demo_cavity.py)")
