"""Dissipative dynamics of the driven lambda system.

The optical Bloch equations are generated from the stage Hamiltonian
plus the radiative decay channels of the excited state (strong leg,
weak leg and, when enabled, the D-state sink).  For the stage drives
used throughout -- where at most one leg is driven at a time -- the
generator reproduces the textbook three-level Bloch equations term by
term; for free-form drives it keeps the full Lindblad structure so that
positivity survives arbitrary parameter draws.

States are propagated in a real vectorization (populations first, then
re/im parts of each coherence), so hermiticity is exact by
construction and the generator is a real matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm, null_space

from .integrate import integrate_ode
from .physcore import AtomSpecies


class DegenerateKernel(RuntimeError):
    """The generator has more than one steady state (e.g. both drives
    zero, where every mixture of the two lower states is stationary)."""


@dataclass(frozen=True)
class DriveConfig:
    """The four drive parameters of the stage Hamiltonian (rad/s)."""
    delta_ab: float = 0.0
    delta_ac: float = 0.0
    omega_ab: float = 0.0
    omega_ac: float = 0.0

    @classmethod
    def preparation(cls, omega_ab: float, delta_ab: float = 0.0):
        """Stage (i): pump on the strong leg only."""
        return cls(delta_ab=delta_ab, omega_ab=omega_ab)

    @classmethod
    def transduction(cls, omega_ac: float, delta_ac: float = 0.0):
        """Stage (ii): input on the weak leg only."""
        return cls(delta_ac=delta_ac, omega_ac=omega_ac)

    @classmethod
    def detection(cls, omega_ab: float, delta_ab: float = 0.0):
        """Stage (iii): probe on the strong leg only."""
        return cls(delta_ab=delta_ab, omega_ab=omega_ab)

    @classmethod
    def free(cls):
        return cls()


# basis order: a (excited), b (ground), c (metastable), s (sink)
A, B, C, S = 0, 1, 2, 3


class DensityMatrix:
    """Trace-one Hermitian state of the 3- or 4-level atom."""

    def __init__(self, entries):
        entries = np.asarray(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("entries must be a square matrix")
        if entries.shape[0] not in (3, 4):
            raise ValueError("dimension must be 3 or 4")
        self.entries = entries

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()

    @classmethod
    def pure(cls, dim: int, level: int) -> "DensityMatrix":
        m = np.zeros((dim, dim), dtype=complex)
        m[level, level] = 1.0
        return cls(m)

    @classmethod
    def mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    def validate(self, trace_tol=1e-9, herm_tol=1e-12, pop_tol=1e-9):
        m = self.entries
        if np.max(np.abs(m - m.conj().T)) > herm_tol:
            raise ValueError("state is not Hermitian")
        if abs(np.trace(m).real - 1.0) > trace_tol:
            raise ValueError("trace deviates from one")
        if np.min(m.diagonal().real) < -pop_tol:
            raise ValueError("negative population")
        return self

    def expand_with_sink(self) -> "DensityMatrix":
        """Embed a 3-level state into the 4-level space (empty sink)."""
        if self.dim == 4:
            return self
        m = np.zeros((4, 4), dtype=complex)
        m[:3, :3] = self.entries
        return DensityMatrix(m)


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled evolution: one state per time point."""
    times: np.ndarray            # s, ascending
    states: np.ndarray           # (n, dim, dim) complex

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.einsum("nii->ni", self.states))

    @property
    def final(self) -> DensityMatrix:
        return DensityMatrix(self.states[-1])

    def __len__(self):
        return len(self.times)


# ------------------------------------------------------------------ vectorize
def _coherence_pairs(dim):
    return [(i, j) for i in range(dim) for j in range(i + 1, dim)]


def real_dim(dim: int) -> int:
    """9 for the three-level system, 16 with the sink level."""
    return dim * dim


def matrix_to_real(rho: np.ndarray) -> np.ndarray:
    """Hermitian matrix -> [populations, (Re, Im) of upper coherences]."""
    dim = rho.shape[0]
    out = np.empty(real_dim(dim))
    out[:dim] = rho.diagonal().real
    k = dim
    for i, j in _coherence_pairs(dim):
        out[k] = rho[i, j].real
        out[k + 1] = rho[i, j].imag
        k += 2
    return out


def real_to_matrix(vec: np.ndarray, dim: int) -> np.ndarray:
    rho = np.zeros((dim, dim), dtype=complex)
    rho[np.diag_indices(dim)] = vec[:dim]
    k = dim
    for i, j in _coherence_pairs(dim):
        rho[i, j] = vec[k] + 1j * vec[k + 1]
        rho[j, i] = vec[k] - 1j * vec[k + 1]
        k += 2
    return rho


def _hamiltonian(atom: AtomSpecies, drive: DriveConfig, dim: int):
    h = np.zeros((dim, dim), dtype=complex)
    h[B, B] = -drive.delta_ab
    h[C, C] = -drive.delta_ac
    h[A, B] = h[B, A] = drive.omega_ab / 2.0
    h[A, C] = h[C, A] = drive.omega_ac / 2.0
    return h


def _collapse_ops(atom: AtomSpecies, dim: int):
    ops = []
    for rate, lower in ((atom.gamma_ab, B), (atom.gamma_ac, C)):
        if rate > 0:
            c = np.zeros((dim, dim), dtype=complex)
            c[lower, A] = np.sqrt(rate)
            ops.append(c)
    if atom.sink_enabled and atom.gamma_sink > 0:
        c = np.zeros((dim, dim), dtype=complex)
        c[S, A] = np.sqrt(atom.gamma_sink)
        ops.append(c)
    return ops


def _apply_generator(rho, h, cops):
    out = -1j * (h @ rho - rho @ h)
    for c in cops:
        cdc = c.conj().T @ c
        out += c @ rho @ c.conj().T - 0.5 * (cdc @ rho + rho @ cdc)
    return out


@lru_cache(maxsize=256)
def build_liouvillian(atom: AtomSpecies, drive: DriveConfig) -> np.ndarray:
    """Real matrix generating d(vec)/dt on the real vectorization.

    Columns of the population block sum to zero (the dissipators only
    move probability between levels).
    """
    dim = atom.dim
    h = _hamiltonian(atom, drive, dim)
    cops = _collapse_ops(atom, dim)
    n = real_dim(dim)
    gen = np.empty((n, n))
    for col in range(n):
        e = np.zeros(n)
        e[col] = 1.0
        gen[:, col] = matrix_to_real(_apply_generator(
            real_to_matrix(e, dim), h, cops))
    return gen


def propagate_vector(gen, vec0, duration, rtol=1e-9, atol=1e-12,
                     dense=False):
    """Integrate the vectorized linear ODE with the adaptive RK pair."""
    return integrate_ode(lambda t, y: gen @ y, (0.0, duration), vec0,
                         rtol=rtol, atol=atol, dense=dense)


def evolve(rho0: DensityMatrix, atom: AtomSpecies, drive: DriveConfig,
           duration: float, rtol=1e-9, atol=1e-12,
           num_points: int = 201) -> Trajectory:
    """Propagate the state and sample it uniformly over the duration.

    Duration zero returns the initial state unchanged.  The terminal
    state keeps all density-matrix invariants at the integration
    tolerance.
    """
    if duration < 0:
        raise ValueError("duration must be >= 0")
    dim = atom.dim
    if rho0.dim != dim:
        rho0 = rho0.expand_with_sink() if dim == 4 else rho0
        if rho0.dim != dim:
            raise ValueError("state dimension does not match the atom")
    if duration == 0.0:
        return Trajectory(times=np.zeros(1),
                          states=rho0.entries[None, :, :].copy())
    gen = build_liouvillian(atom, drive)
    sol = propagate_vector(gen, matrix_to_real(rho0.entries), duration,
                           rtol=rtol, atol=atol, dense=True)
    times = np.linspace(0.0, duration, num_points)
    vecs = sol(times)
    states = np.stack([real_to_matrix(v, dim) for v in vecs])
    return Trajectory(times=times, states=states)


def expm_oracle(rho0: DensityMatrix, atom: AtomSpecies, drive: DriveConfig,
                t: float) -> DensityMatrix:
    """Independent propagation by scaling-and-squaring matrix exponential.

    Verification path for :func:`evolve`: agreement within ten times
    the integration tolerance is the integrator correctness criterion.
    """
    dim = atom.dim
    if rho0.dim != dim and dim == 4:
        rho0 = rho0.expand_with_sink()
    gen = build_liouvillian(atom, drive)
    vec = expm(gen * t) @ matrix_to_real(rho0.entries)
    return DensityMatrix(real_to_matrix(vec, dim))


def steady_state(atom: AtomSpecies, drive: DriveConfig,
                 residual_tol=1e-10) -> DensityMatrix:
    """Trace-one kernel vector of the generator.

    Raises :class:`DegenerateKernel` when the stationary subspace has
    more than one dimension (both drives zero leaves every mixture of
    the lower states stationary).
    """
    gen = build_liouvillian(atom, drive)
    scale = np.max(np.abs(gen))
    kernel = null_space(gen / scale, rcond=1e-10)
    if kernel.shape[1] != 1:
        raise DegenerateKernel(
            f"stationary subspace has dimension {kernel.shape[1]}")
    vec = kernel[:, 0]
    trace = vec[:atom.dim].sum()
    if abs(trace) < 1e-12:
        raise DegenerateKernel("kernel vector is traceless")
    vec = vec / trace
    residual = np.max(np.abs(gen @ vec)) / scale
    if residual > residual_tol:
        raise DegenerateKernel(f"kernel residual {residual:.2e} too large")
    return DensityMatrix(real_to_matrix(vec, atom.dim))
