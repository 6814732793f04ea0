"""Physical constants, unit conventions and lab <-> model conversions.

Every rate, Rabi frequency and detuning in this package is stored in
angular units (rad/s).  Laboratory inputs are usually quoted as
linewidths in MHz or Hz; use :func:`rate_from_linewidth_mhz` and its
inverse at the boundary and keep everything angular inside.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

# CODATA-2018, 9 significant digits
PLANCK_H = 6.62607015e-34       # J s (exact)
SPEED_OF_LIGHT = 2.99792458e8   # m/s (exact)
TWO_PI = 2.0 * np.pi


def rate_from_linewidth_mhz(linewidth_mhz: float) -> float:
    """Linewidth in MHz -> angular rate in rad/s."""
    return TWO_PI * linewidth_mhz * 1e6


def linewidth_mhz_from_rate(rate: float) -> float:
    """Angular rate in rad/s -> linewidth in MHz."""
    return rate / (TWO_PI * 1e6)


@dataclass(frozen=True)
class AtomSpecies:
    """Three-level lambda atom, optionally with a fourth D-state sink level.

    Rates are angular (rad/s); the sink level collects the weak decay
    branch out of the excited state and is only active when
    ``sink_enabled`` is set.
    """
    name: str
    lambda_ab: float        # m, strong (visible) transition
    lambda_ac: float        # m, weak (infrared) transition
    gamma_ab: float         # rad/s
    gamma_ac: float         # rad/s
    gamma_sink: float = 0.0  # rad/s, auxiliary D-state channel
    sink_enabled: bool = False

    def __post_init__(self):
        if not (self.lambda_ab > 0 and self.lambda_ac > 0):
            raise ValueError("wavelengths must be positive")
        # gamma_ac = 0 is allowed so the two-level limit stays reachable
        if not (self.gamma_ab > self.gamma_ac >= 0):
            raise ValueError("need gamma_ab > gamma_ac >= 0")
        if self.gamma_sink < 0:
            raise ValueError("gamma_sink must be >= 0")

    @property
    def gamma_total(self) -> float:
        """Total decay rate of the excited state (rad/s)."""
        g = self.gamma_ab + self.gamma_ac
        if self.sink_enabled:
            g += self.gamma_sink
        return g

    @property
    def dim(self) -> int:
        return 4 if self.sink_enabled else 3

    def with_sink(self, enabled: bool) -> "AtomSpecies":
        return replace(self, sink_enabled=enabled)


def barium138(sink_enabled: bool = False) -> AtomSpecies:
    """Ba-138 preset: 553 nm / 18.9 MHz strong leg, 1.5 um / 40 kHz weak
    leg, 28 kHz decay into the metastable sink level."""
    return AtomSpecies(
        name="Ba-138",
        lambda_ab=553e-9,
        lambda_ac=1.5e-6,
        gamma_ab=rate_from_linewidth_mhz(18.9),
        gamma_ac=rate_from_linewidth_mhz(0.040),
        gamma_sink=rate_from_linewidth_mhz(0.028),
        sink_enabled=sink_enabled,
    )


def scaled_lambda_atom(ratio: float, sink_enabled: bool = False) -> AtomSpecies:
    """Dimensionless atom with gamma_ab = 1 and gamma_ab/gamma_ac = ratio.

    Convenient for population-dynamics runs quoted in units of the
    strong-transition lifetime.
    """
    return AtomSpecies(
        name=f"scaled(ratio={ratio:g})",
        lambda_ab=553e-9,
        lambda_ac=1.5e-6,
        gamma_ab=1.0,
        gamma_ac=1.0 / ratio,
        gamma_sink=0.0,
        sink_enabled=sink_enabled,
    )


@dataclass(frozen=True)
class BeamField:
    """One laser beam in the top-hat model.

    ``waist_along_beam`` is the extent the atom traverses (sets the
    interaction time), ``waist_transverse`` the perpendicular extent;
    the uniform intensity is power / (pi * w_along * w_trans).
    ``stretch_factor`` models cylindrical-lens expansion along the
    atomic path: at fixed power it divides the intensity by k and
    multiplies the transit time by k.
    """
    power: float                 # W
    waist_along_beam: float      # m
    waist_transverse: float      # m
    detuning: float = 0.0        # rad/s
    stretch_factor: float = 1.0
    gaussian_profile: bool = False

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("power must be >= 0")
        if not (self.waist_along_beam > 0 and self.waist_transverse > 0):
            raise ValueError("beam extents must be positive")
        if self.stretch_factor < 1:
            raise ValueError("stretch_factor must be >= 1")

    @property
    def area(self) -> float:
        """Effective top-hat area (m^2), including the stretch."""
        return (np.pi * self.waist_along_beam * self.waist_transverse
                * self.stretch_factor)

    @property
    def intensity(self) -> float:
        """Uniform intensity over the effective area (W/m^2)."""
        return self.power / self.area


@dataclass(frozen=True)
class AtomicBeam:
    """Collimated atomic beam crossing the lasers at right angles."""
    velocity: float          # m/s
    density: float           # atoms/cm^3

    def __post_init__(self):
        if self.velocity <= 0:
            raise ValueError("velocity must be positive")
        if self.density <= 0:
            raise ValueError("density must be positive")


def saturation_intensity(atom: AtomSpecies, which_transition: str) -> float:
    """Two-level saturation intensity pi*h*c*Gamma/(3*lambda^3) in W/m^2.

    ``which_transition`` selects the strong leg (``"ab"``) or the weak
    leg (``"ac"``).
    """
    if which_transition == "ab":
        gamma, lam = atom.gamma_ab, atom.lambda_ab
    elif which_transition == "ac":
        gamma, lam = atom.gamma_ac, atom.lambda_ac
    else:
        raise ValueError("which_transition must be 'ab' or 'ac'")
    return np.pi * PLANCK_H * SPEED_OF_LIGHT * gamma / (3.0 * lam**3)


def rabi_from_power(beam: BeamField, atom: AtomSpecies,
                    which_transition: str) -> float:
    """Rabi frequency (rad/s) of a top-hat beam on the selected transition.

    Omega = Gamma * sqrt(I / (2 I_sat)); zero power gives exactly zero.
    """
    if beam.power == 0.0:
        return 0.0
    isat = saturation_intensity(atom, which_transition)
    gamma = atom.gamma_ab if which_transition == "ab" else atom.gamma_ac
    return gamma * np.sqrt(beam.intensity / (2.0 * isat))


def transit_time(beam: BeamField, atomic_beam: AtomicBeam) -> float:
    """Interaction time (s): traversed extent over velocity, times stretch."""
    return beam.waist_along_beam * beam.stretch_factor / atomic_beam.velocity


def resonant_cross_section(atom: AtomSpecies) -> float:
    """Resonant absorption cross-section 3*lambda_ac^2/(2 pi) in m^2."""
    return 3.0 * atom.lambda_ac**2 / TWO_PI


def scattering_ratio(atom: AtomSpecies, effective_area: float) -> float:
    """Free-space absorption probability scale sigma0 / A_eff."""
    if effective_area <= 0:
        raise ValueError("effective_area must be positive")
    return resonant_cross_section(atom) / effective_area


def detuned_cross_section(atom: AtomSpecies, detuning: float) -> float:
    """Unsaturated absorption cross-section of the weak leg at a given
    input detuning: sigma0 * (G/2)^2 / (D^2 + (G/2)^2) with G = gamma_ac."""
    half = atom.gamma_ac / 2.0
    return resonant_cross_section(atom) * half**2 / (detuning**2 + half**2)
