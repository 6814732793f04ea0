import numpy as np
import pytest

import lamtrans as lt


@pytest.fixture(scope="session")
def ba():
    return lt.barium138()


@pytest.fixture(scope="session")
def ba_sink():
    return lt.barium138(sink_enabled=True)


@pytest.fixture(scope="session")
def atomic_beam():
    return lt.AtomicBeam(velocity=750.0, density=2.82e6)


@pytest.fixture(scope="session")
def paper_setup(ba, atomic_beam):
    """Reference free-space configuration used throughout."""
    pump = lt.BeamField(power=0.1, waist_along_beam=3.62e-6 * 750.0,
                        waist_transverse=2.55e-3, stretch_factor=20.0)
    probe = lt.BeamField(power=6.893e-3, waist_along_beam=0.94e-3,
                         waist_transverse=0.94e-3)
    input_beam = lt.input_beam_for_tau(2.34e-6, 750.0)
    return lt.PipelineSetup(atom=ba, atomic_beam=atomic_beam, pump=pump,
                            input_beam=input_beam, probe=probe,
                            chain=lt.DetectionChain())


@pytest.fixture(scope="session")
def prepared(paper_setup):
    return lt.prepare(paper_setup)


def random_density_matrix(rng: np.random.Generator, dim: int):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    rho /= np.trace(rho).real
    return lt.DensityMatrix(rho)


def check_state_invariants(entries, trace_tol=1e-9, herm_tol=1e-12,
                           pop_tol=1e-9):
    assert abs(np.trace(entries).real - 1.0) < trace_tol
    assert np.max(np.abs(entries - entries.conj().T)) <= herm_tol
    diag = entries.diagonal().real
    assert np.min(diag) >= -pop_tol
    assert np.max(diag) <= 1.0 + pop_tol
