import numpy as np
import pytest

import lamtrans as lt
from lamtrans.liouville import (A, B, C, build_liouvillian, matrix_to_real,
                                real_to_matrix)

from conftest import check_state_invariants, random_density_matrix

BRANCHING = 0.9978880675818373        # gamma_ab / (gamma_ab + gamma_ac)


def rhs_of(atom, drive, rho):
    gen = build_liouvillian(atom, drive)
    return real_to_matrix(gen @ matrix_to_real(rho), atom.dim)


def test_vectorization_roundtrip():
    rng = np.random.default_rng(3)
    for dim in (3, 4):
        rho = random_density_matrix(rng, dim).entries
        back = real_to_matrix(matrix_to_real(rho), dim)
        assert np.max(np.abs(back - rho)) < 1e-15


def test_generator_decay_coefficients(ba):
    # maximally mixed state, no drive: populations feed at Gamma/3
    d = rhs_of(ba, lt.DriveConfig.free(), np.eye(3, dtype=complex) / 3)
    assert d[B, B].real == pytest.approx(ba.gamma_ab / 3.0, rel=1e-12)
    assert d[C, C].real == pytest.approx(ba.gamma_ac / 3.0, rel=1e-12)
    assert d[A, A].real == pytest.approx(-(ba.gamma_ab + ba.gamma_ac) / 3.0,
                                         rel=1e-12)


def test_generator_conserves_probability(ba, ba_sink):
    for atom in (ba, ba_sink):
        for drive in (lt.DriveConfig.free(),
                      lt.DriveConfig.preparation(2.3 * atom.gamma_ab, 0.7),
                      lt.DriveConfig.transduction(0.5 * atom.gamma_ab, -1.0),
                      lt.DriveConfig(delta_ab=1.0, delta_ac=-2.0,
                                     omega_ab=1.0, omega_ac=0.5)):
            gen = build_liouvillian(atom, drive)
            col_sums = gen[:atom.dim].sum(axis=0)
            assert np.max(np.abs(col_sums)) < 1e-6 * max(
                1.0, np.max(np.abs(gen)))


def test_matches_printed_stage_equations(ba):
    """Strong-leg stage drive: the generator reproduces the textbook
    three-level equations term by term (coherences on the undriven leg
    zeroed, as they stay in any stage)."""
    rng = np.random.default_rng(11)
    rho = random_density_matrix(rng, 3).entries.copy()
    rho[A, C] = rho[C, A] = 0.0
    rho[B, C] = rho[C, B] = 0.0
    gab, gac = ba.gamma_ab, ba.gamma_ac
    gtot = gab + gac
    om, det = 2.3 * gab, 0.7 * gab
    d = rhs_of(ba, lt.DriveConfig.preparation(om, det), rho)
    # the published equations index coherences as <lower|rho|upper>
    r_ab, r_ba = rho[B, A], rho[A, B]
    raa, rbb = rho[A, A], rho[B, B]
    want_aa = -gtot * raa - 1j * om / 2 * (r_ab - r_ba)
    want_bb = gab * raa + 1j * om / 2 * (r_ab - r_ba)
    want_cc = gac * raa
    want_ab = (-gtot / 2 + 1j * det) * r_ab + 1j * om / 2 * (rbb - raa)
    scale = np.max(np.abs(d))
    assert abs(d[A, A] - want_aa) < 1e-12 * scale
    assert abs(d[B, B] - want_bb) < 1e-12 * scale
    assert abs(d[C, C] - want_cc) < 1e-12 * scale
    assert abs(d[B, A] - want_ab) < 1e-12 * scale
    # undriven-leg coherences have no source from stage states
    assert abs(d[A, C]) < 1e-12 * scale
    assert abs(d[B, C]) < 1e-12 * scale


def test_ground_state_is_stationary(ba):
    rho0 = lt.DensityMatrix.pure(3, B)
    traj = lt.evolve(rho0, ba, lt.DriveConfig.free(), 10.0 / ba.gamma_ab)
    assert np.max(np.abs(traj.states - rho0.entries)) < 1e-12


def test_branching_ratio(ba):
    rho0 = lt.DensityMatrix.pure(3, A)
    traj = lt.evolve(rho0, ba, lt.DriveConfig.free(), 50.0 / ba.gamma_ab)
    assert traj.populations[-1, B] == pytest.approx(BRANCHING, abs=1e-9)
    assert traj.populations[-1, C] == pytest.approx(1.0 - BRANCHING,
                                                    abs=1e-9)


def test_excited_scalar_decay(ba):
    t = 3.0 / ba.gamma_ab
    out = lt.expm_oracle(lt.DensityMatrix.pure(3, A), ba,
                         lt.DriveConfig.free(), t)
    want = np.exp(-(ba.gamma_ab + ba.gamma_ac) * t)
    assert out.populations[A] == pytest.approx(want, rel=1e-12)


def test_zero_duration_identity(ba):
    rho0 = random_density_matrix(np.random.default_rng(5), 3)
    traj = lt.evolve(rho0, ba, lt.DriveConfig.preparation(ba.gamma_ab), 0.0)
    assert np.array_equal(traj.states[0], rho0.entries)
    out = lt.expm_oracle(rho0, ba, lt.DriveConfig.preparation(ba.gamma_ab),
                         0.0)
    assert np.max(np.abs(out.entries - rho0.entries)) < 1e-14


def test_sink_conserves_four_level_trace(ba_sink):
    rho0 = lt.DensityMatrix.pure(4, B)
    drive = lt.DriveConfig.preparation(2.0 * ba_sink.gamma_ab)
    traj = lt.evolve(rho0, ba_sink, drive, 300.0 / ba_sink.gamma_ab)
    tr4 = traj.populations.sum(axis=1)
    assert np.max(np.abs(tr4 - 1.0)) < 1e-9
    tr3 = traj.populations[:, :3].sum(axis=1)
    assert tr3[-1] < 1.0 - 1e-4           # sink keeps filling
    assert np.all(np.diff(traj.populations[:, 3]) >= -1e-12)


def test_evolve_matches_oracle_randomized(ba, ba_sink):
    rng = np.random.default_rng(12345)
    worst = 0.0
    for _ in range(100):
        atom = ba_sink if rng.random() < 0.5 else ba
        g = atom.gamma_ab
        drive = lt.DriveConfig(
            delta_ab=rng.uniform(-5, 5) * g,
            delta_ac=rng.uniform(-5, 5) * g,
            omega_ab=rng.uniform(0, 5) * g,
            omega_ac=rng.uniform(0, 5) * g)
        rho0 = random_density_matrix(rng, atom.dim)
        t = rng.uniform(0.01, 10.0) / g
        ours = lt.evolve(rho0, atom, drive, t, num_points=2).states[-1]
        ref = lt.expm_oracle(rho0, atom, drive, t).entries
        worst = max(worst, float(np.max(np.abs(ours - ref))))
    assert worst < 1e-8


def test_resonant_weak_leg_matches_oracle(ba):
    drive = lt.DriveConfig.transduction(ba.gamma_ac)
    rho0 = lt.DensityMatrix.pure(3, C)
    t = 10.0 / ba.gamma_ac
    ours = lt.evolve(rho0, ba, drive, t, num_points=2).states[-1]
    ref = lt.expm_oracle(rho0, ba, drive, t).entries
    assert np.max(np.abs(ours - ref)) < 1e-8


def test_trajectory_invariants(ba_sink):
    rng = np.random.default_rng(99)
    for _ in range(10):
        g = ba_sink.gamma_ab
        drive = lt.DriveConfig(delta_ab=rng.uniform(-3, 3) * g,
                               delta_ac=rng.uniform(-3, 3) * g,
                               omega_ab=rng.uniform(0, 4) * g,
                               omega_ac=rng.uniform(0, 4) * g)
        rho0 = random_density_matrix(rng, 4)
        traj = lt.evolve(rho0, ba_sink, drive, 20.0 / g, num_points=41)
        for state in traj.states:
            check_state_invariants(state)


def test_steady_state_pump_only(ba):
    ss = lt.steady_state(ba, lt.DriveConfig.preparation(ba.gamma_ab))
    assert np.max(np.abs(ss.entries
                         - lt.DensityMatrix.pure(3, C).entries)) < 1e-8


def test_steady_state_input_only(ba):
    ss = lt.steady_state(ba, lt.DriveConfig.transduction(ba.gamma_ac))
    assert np.max(np.abs(ss.entries
                         - lt.DensityMatrix.pure(3, B).entries)) < 1e-8


def test_steady_state_degenerate_without_drive(ba):
    with pytest.raises(lt.DegenerateKernel):
        lt.steady_state(ba, lt.DriveConfig.free())


def test_two_level_saturation_limit():
    # gamma_ac = 0 turns the strong leg into a closed two-level system
    atom = lt.AtomSpecies("two-level", 553e-9, 1.5e-6,
                          gamma_ab=1.0, gamma_ac=0.0)
    for om in (0.7, 1.0, 3.0):
        drive = lt.DriveConfig.preparation(om)
        traj = lt.evolve(lt.DensityMatrix.pure(3, B), atom, drive, 200.0,
                         num_points=2)
        want = (om**2 / 4) / (1.0 / 4 + om**2 / 2)
        assert traj.populations[-1, A] == pytest.approx(want, abs=1e-6)


def test_dark_state_pumping_rate():
    # strong pump: metastable filling follows 1 - exp(-rho_aa_ss *
    # gamma_ac * t) to within 2 percent
    ratio = 330.0
    atom = lt.scaled_lambda_atom(ratio)
    om = 4.0
    rho_aa_ss = (om**2 / 4) / (1.0 / 4 + om**2 / 2 + 1.0 / (2 * ratio))
    rho0 = lt.DensityMatrix.pure(3, B)
    drive = lt.DriveConfig.preparation(om)
    for t in (10.0, 50.0, 200.0, 500.0):
        got = lt.evolve(rho0, atom, drive, t,
                        num_points=2).populations[-1, C]
        model = 1.0 - np.exp(-rho_aa_ss * t / ratio)
        assert abs(got - model) / model < 0.02
