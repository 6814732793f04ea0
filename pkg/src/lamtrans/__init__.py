"""Deterministic simulator of lambda-system infrared-to-visible
frequency transduction with amplified detection."""

from .physcore import (AtomSpecies, AtomicBeam, BeamField, barium138,
                       detuned_cross_section, linewidth_mhz_from_rate,
                       rabi_from_power, rate_from_linewidth_mhz,
                       resonant_cross_section, saturation_intensity,
                       scaled_lambda_atom, scattering_ratio, transit_time)
from .integrate import StepSizeUnderflow, integrate_ode
from .liouville import (DegenerateKernel, DensityMatrix, DriveConfig,
                        Trajectory, build_liouvillian, evolve, expm_oracle,
                        steady_state)
from .pipeline import (ChainResult, DetectionChain, DivisionByZeroAbsorption,
                       PipelineSetup, StageResult, apply_detection_chain,
                       count_rate, internal_efficiency, prepare,
                       run_chain, run_detection, run_preparation,
                       run_transduction)
from .spectro import (FitDiverged, LorentzianFit, Spectrum,
                      bandwidth_vs_power, energy_scaling_check,
                      excitation_spectrum, fit_lorentzian,
                      input_beam_for_tau)
from .cavity import (AbsorbResult, CavityConfig, CollectResult,
                     CutoffNotConverged, absorb_sim, collect_sim)

__version__ = "0.1.0"

__all__ = [
    "AtomSpecies", "AtomicBeam", "BeamField", "barium138",
    "detuned_cross_section", "linewidth_mhz_from_rate", "rabi_from_power",
    "rate_from_linewidth_mhz", "resonant_cross_section",
    "saturation_intensity", "scaled_lambda_atom", "scattering_ratio",
    "transit_time",
    "StepSizeUnderflow", "integrate_ode",
    "DegenerateKernel", "DensityMatrix", "DriveConfig", "Trajectory",
    "build_liouvillian", "evolve", "expm_oracle", "steady_state",
    "ChainResult", "DetectionChain", "DivisionByZeroAbsorption",
    "PipelineSetup", "StageResult", "apply_detection_chain", "count_rate",
    "internal_efficiency", "prepare", "run_chain", "run_detection",
    "run_preparation", "run_transduction",
    "FitDiverged", "LorentzianFit", "Spectrum", "bandwidth_vs_power",
    "energy_scaling_check", "excitation_spectrum", "fit_lorentzian",
    "input_beam_for_tau",
    "AbsorbResult", "CavityConfig", "CollectResult", "CutoffNotConverged",
    "absorb_sim", "collect_sim",
    "__version__",
]
