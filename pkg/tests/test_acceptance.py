"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s`. The trend and equivalence
criteria propagate real wavepackets and take minutes each; everything is
deterministic, so the numbers printed here are reproducible bit-for-bit.
"""

import os

import numpy as np
import pytest
import scipy.linalg as sla

from cavhhg.config import parse_config_text
from cavhhg.grid import CapSpec, GridHamiltonian, GridSpec, GridState, \
    SoftCoreModel, grid_observables, imaginary_time_ground_state, \
    propagate_rk4, solve_grid_1d, solve_stationary_electronic
from cavhhg.hhg import fit_cutoff, spectrum_from_trajectory
from cavhhg.io import load_electronic_data, read_cutoff, read_trajectory
from cavhhg.model import CavitySpec, PulseSpec
from cavhhg.polariton import bare_basis, build_polariton_basis
from cavhhg.runner import export_electronic_data, positive_fit_range, run_sweep
from cavhhg.tdci import PropagatorSetup, run_driven

slow = pytest.mark.slow


def report(name, detail):
    print(f"PASS {name}: {detail}")


# --- 1. eigenvalue reproduction ---------------------------------------------

def test_criterion_eigenvalues():
    energies, _ = solve_stationary_electronic(GridSpec(), SoftCoreModel(), 3)
    reference = (-0.500008, -0.1815345, -0.112529)
    for computed, expected in zip(energies, reference):
        assert computed == pytest.approx(expected, abs=1e-5)
    report("eigenvalue-reproduction",
           f"E = {np.round(energies, 7)} vs {reference} within 1e-5")


# --- 2. decoupled-limit exactness --------------------------------------------

def test_criterion_decoupled_qed_cis_spectrum(three_level_data):
    omega_c = 0.261
    h_basis = build_polariton_basis(three_level_data, CavitySpec(omega_c, 0.0), 5)
    expected = np.sort([e + n * omega_c for e in three_level_data.energies
                        for n in range(5)])
    err = np.abs(h_basis.energies - expected).max()
    assert err < 1e-12
    report("decoupled-qed-cis", f"max |E_p - sorted(E_i + n*w_c)| = {err:.2e} < 1e-12")


def test_criterion_decoupled_trajectories(three_level_data):
    pulse = PulseSpec(0.02, 0.3, 3)
    n = int(round(pulse.t_final / 0.02))
    dt = pulse.t_final / n
    bare = bare_basis(three_level_data)
    qed = build_polariton_basis(three_level_data, CavitySpec(0.15, 0.0), 4)
    traj_b = run_driven(PropagatorSetup(bare, pulse, dt=dt), pulse.t_final, 5)
    traj_q = run_driven(PropagatorSetup(qed, pulse, dt=dt), pulse.t_final, 5)
    err = max(np.abs(traj_b.mu_z - traj_q.mu_z).max(),
              np.abs(traj_b.norm - traj_q.norm).max())
    assert err < 1e-10
    report("decoupled-tdcis", f"bare vs QED(g=0) sample difference {err:.2e} < 1e-10")


def test_criterion_decoupled_grid_ground_state():
    omega_c = 0.05
    grid = GridSpec(n_z=512, z_max=100.0, n_xc=32, xc_max=20.0)
    ham = GridHamiltonian(grid, SoftCoreModel(), CavitySpec(omega_c, 0.0))
    state = imaginary_time_ground_state(ham, tol=1e-11)
    e_grid = ham.energy(state.psi)
    e_z, _ = solve_stationary_electronic(grid, SoftCoreModel(), 1)
    expected = e_z[0] + 0.5 * omega_c
    assert e_grid == pytest.approx(expected, abs=1e-6)
    report("decoupled-grid-gs",
           f"E = {e_grid:.9f} vs E0 + w_c/2 = {expected:.9f} within 1e-6")


# --- 3. oracle equivalence grid <-> basis ------------------------------------

@slow
def test_criterion_grid_basis_equivalence(tmp_path):
    omega0 = omega_c = 0.05
    f0, g_c = 0.005, 0.005
    pulse = PulseSpec(f0, omega0, 10)
    cavity = CavitySpec(omega_c, g_c)
    grid = GridSpec(n_z=256, z_max=60.0, n_xc=64, xc_max=24.0)
    model = SoftCoreModel()

    # electronic data exported from the very grid the wavepacket lives on
    cfg = parse_config_text(
        "mode = grid\npulse.f0 = 0.005\npulse.omega0 = 0.05\npulse.n_cycles = 10\n"
        "cavity.omega_c = 0.05\ncavity.g_c = 0.005\n"
        "grid.n_z = 256\ngrid.z_max = 60\ngrid.n_xc = 64\ngrid.xc_max = 24\n"
        "ionization.escape_length = 10\n")
    data_path = tmp_path / "atom.dat"
    export_electronic_data(cfg, data_path, n_states=30, escape_length=10.0)
    data = load_electronic_data(data_path)

    # grid propagation
    relax = GridHamiltonian(grid, model, cavity)
    gs = imaginary_time_ground_state(relax)
    caps = CapSpec(40.0, 1e-3, 20.0, 0.01)
    ham = GridHamiltonian(grid, model, cavity, caps=caps)
    n_steps = int(round(pulse.t_final / 0.01 / 10)) * 10
    dt = pulse.t_final / n_steps
    _, traj_grid = propagate_rk4(gs, ham, 0.0, pulse.t_final, dt, pulse,
                                 sample_stride=10)

    # polaritonic propagation on the exported data
    basis = build_polariton_basis(data, cavity, 8)
    n_b = n_steps // 2
    setup = PropagatorSetup(basis, pulse, dt=pulse.t_final / n_b)
    traj_basis = run_driven(setup, pulse.t_final, sample_stride=5,
                            record_populations=False)

    assert len(traj_grid.t) == len(traj_basis.t)
    z_grid = traj_grid.z
    z_basis = -traj_basis.mu_z / traj_basis.norm
    rms = np.linalg.norm(z_grid - z_basis) / np.linalg.norm(z_grid)
    assert rms <= 0.05
    report("grid-basis-equivalence",
           f"relative RMS deviation of <z>(t) = {100 * rms:.2f}% <= 5%")


# --- 4. cutoff-fit recovery ---------------------------------------------------

def test_criterion_cutoff_fit_exact():
    omega = np.linspace(0.1, 6.0, 1200)
    u = np.clip((omega - 2.0) / 2.0, 0.0, 1.0)
    intensity = np.exp(0.0 - 20.0 * u)
    fit = fit_cutoff(omega, intensity, fit_range=(0.1, 6.0))
    err = max(abs(fit.omega_a - 2.0), abs(fit.omega_b - 4.0),
              abs(fit.plateau), abs(fit.noise + 20.0))
    assert err <= 1e-6
    report("cutoff-fit-exact", f"parameter recovery error {err:.2e} <= 1e-6")


def test_criterion_cutoff_fit_noise():
    omega = np.linspace(0.1, 6.0, 1200)
    u = np.clip((omega - 2.0) / 2.0, 0.0, 1.0)
    log_clean = 0.0 - 20.0 * u
    errors = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        noisy = np.exp(log_clean + rng.normal(0.0, 0.3, size=len(omega)))
        fit = fit_cutoff(omega, noisy, fit_range=(0.1, 6.0))
        errors.append(abs(fit.omega_cut - 3.0))
    p95 = float(np.percentile(errors, 95))
    assert p95 < 0.1
    report("cutoff-fit-noise", f"95th percentile |w_cut error| = {p95:.4f} < 0.1")


# --- 5. no-cavity HHG sanity (reduced-grid smoke) -----------------------------

@slow
def test_criterion_hhg_smoke():
    omega0, f0 = 0.05, 0.09
    pulse = PulseSpec(f0, omega0, 10)
    u_p = f0**2 / (4.0 * omega0**2)
    predicted = 3.17 * u_p + 0.500008
    assert predicted == pytest.approx(3.07, abs=0.01)

    # widened box: the reference CAP under-absorbs the fast wrap-around flux
    grid = GridSpec(n_z=1024, z_max=200.0, n_xc=4, xc_max=12.0)
    model = SoftCoreModel()
    cavity = CavitySpec(0.05, 0.0)
    relax = GridHamiltonian(grid, model, cavity)
    gs = imaginary_time_ground_state(relax)
    caps = CapSpec(134.0, 1.0135e-4, 9.6, 0.0)
    ham = GridHamiltonian(grid, model, cavity, caps=caps)
    n_steps = int(round(pulse.t_final / 0.02 / 10)) * 10
    dt = pulse.t_final / n_steps
    _, traj = propagate_rk4(gs, ham, 0.0, pulse.t_final, dt, pulse, sample_stride=5)

    spec = spectrum_from_trajectory(traj, t_f=pulse.t_final, omega0=omega0,
                                    delta_omega=2 * omega0)
    fit = fit_cutoff(spec.omega, spec.smoothed,
                     fit_range=positive_fit_range(spec.omega, spec.smoothed,
                                                  5 * omega0, 4.5))
    assert 0.8 * predicted <= fit.omega_cut <= 1.2 * predicted

    # odd harmonics in the mid-plateau peak within one frequency bin
    bins_per = int(round(omega0 / (spec.omega[1] - spec.omega[0])))
    offsets = []
    for order in range(13, 25, 2):
        center = order * bins_per
        window = spec.intensity[center - 5:center + 6]
        offsets.append(int(np.argmax(window)) - 5)
    assert all(abs(off) <= 1 for off in offsets)
    report("hhg-smoke",
           f"w_cut = {fit.omega_cut:.3f} in [{0.8 * predicted:.2f}, "
           f"{1.2 * predicted:.2f}] (3.17 U_p + I_p = {predicted:.2f}); "
           f"H13..H23 peak offsets {offsets} bins")


@pytest.mark.skipif(os.environ.get("CAVHHG_FULL_ACCEPT") != "1",
                    reason="full-parameter variant (tens of minutes); "
                           "set CAVHHG_FULL_ACCEPT=1 to run")
@slow
def test_criterion_hhg_full_parameters():
    # same physics as the smoke test at the reference time step dt = 0.001
    omega0, f0 = 0.05, 0.09
    pulse = PulseSpec(f0, omega0, 10)
    predicted = 3.17 * f0**2 / (4 * omega0**2) + 0.500008
    grid = GridSpec(n_z=1024, z_max=200.0, n_xc=4, xc_max=12.0)
    model = SoftCoreModel()
    cavity = CavitySpec(0.05, 0.0)
    gs = imaginary_time_ground_state(GridHamiltonian(grid, model, cavity))
    ham = GridHamiltonian(grid, model, cavity,
                          caps=CapSpec(134.0, 1.0135e-4, 9.6, 0.0))
    n_steps = int(round(pulse.t_final / 0.001 / 100)) * 100
    dt = pulse.t_final / n_steps
    _, traj = propagate_rk4(gs, ham, 0.0, pulse.t_final, dt, pulse,
                            sample_stride=100)
    spec = spectrum_from_trajectory(traj, t_f=pulse.t_final, omega0=omega0,
                                    delta_omega=2 * omega0)
    fit = fit_cutoff(spec.omega, spec.smoothed,
                     fit_range=positive_fit_range(spec.omega, spec.smoothed,
                                                  5 * omega0, 4.5))
    assert 0.8 * predicted <= fit.omega_cut <= 1.2 * predicted
    report("hhg-full-parameters", f"w_cut = {fit.omega_cut:.3f} at dt = 0.001")


# --- 6. qualitative cavity trends ---------------------------------------------

TREND_A_BASE = """
mode = sweep
pulse.f0 = 0.09
pulse.omega0 = 0.05
pulse.n_cycles = 6
cavity.omega_c = 0.05
grid.n_z = 128
grid.z_max = 60
grid.n_xc = 128
grid.xc_max = 50
cap.electron_onset = 40
cap.electron_strength = 1e-3
cap.cavity_onset = 40
cap.cavity_strength = 0.01
numerics.dt = 0.01
numerics.sample_stride = 20
fit.range_min = 0.25
fit.range_max = 4.0
sweep.g_c = 0.0, 0.01, 0.04, 0.07
"""


@slow
def test_criterion_trend_cutoff_vs_coupling(tmp_path):
    cfg = parse_config_text(TREND_A_BASE)
    out = str(tmp_path / "trend_a")
    manifest, summary = run_sweep(cfg, out, threads=2)
    assert all(status == "ok" for _, status, _ in manifest)
    cuts = {}
    for tag, row in summary:
        cuts[row["g_c"]] = read_cutoff(os.path.join(out, tag, "cutoff.tsv")).omega_cut
    ordered = [cuts[g] for g in (0.0, 0.01, 0.04, 0.07)]
    assert all(a > b for a, b in zip(ordered, ordered[1:])), ordered
    report("trend-cutoff-vs-coupling",
           "w_cut monotone decreasing over g_c {0, 0.01, 0.04, 0.07}: "
           + ", ".join(f"{c:.3f}" for c in ordered))


TREND_B_RUN = """
mode = grid
pulse.f0 = 0.03
pulse.omega0 = 0.05
pulse.n_cycles = 6
cavity.omega_c = {omega_c}
cavity.g_c = 0.01
grid.n_z = 128
grid.z_max = 60
grid.n_xc = {n_xc}
grid.xc_max = {xc_max}
cap.electron_onset = 40
cap.electron_strength = 1e-3
cap.cavity_onset = {w_s}
cap.cavity_strength = {a_w}
numerics.dt = 0.01
numerics.sample_stride = 20
"""

TREND_B_ROWS = [
    (0.03, 128, 65.0, 45.0, 0.005),
    (0.05, 128, 50.0, 40.0, 0.01),
    (0.1, 64, 20.0, 16.0, 0.025),
    (0.2, 64, 20.0, 16.0, 0.025),
]


@slow
def test_criterion_trend_photon_number_resonance(tmp_path):
    from cavhhg.runner import run_grid

    final_nc = {}
    for omega_c, n_xc, xc_max, w_s, a_w in TREND_B_ROWS:
        cfg = parse_config_text(TREND_B_RUN.format(
            omega_c=omega_c, n_xc=n_xc, xc_max=xc_max, w_s=w_s, a_w=a_w))
        summary = run_grid(cfg, str(tmp_path / f"wc{omega_c}"))
        final_nc[omega_c] = summary["final_n_c"]
    resonant = final_nc[0.05]
    others = {w: v for w, v in final_nc.items() if w != 0.05}
    assert all(resonant > v for v in others.values()), final_nc
    report("trend-photon-resonance",
           "end-of-pulse <n_c> maximal at w_c = w_0 = 0.05: "
           + ", ".join(f"w_c={w}: {v:.4f}" for w, v in sorted(final_nc.items())))


@slow
def test_criterion_trend_photon_ladder_convergence(tmp_path):
    # basis run on grid-derived data: the cutoff stabilizes only once the
    # maximal cavity energy (N_p - 1)*w_c reaches the cutoff region
    omega0, f0, omega_c = 0.05, 0.09, 0.3185
    pulse = PulseSpec(f0, omega0, 6)
    cfg = parse_config_text(
        "mode = grid\npulse.f0 = 0.09\npulse.omega0 = 0.05\npulse.n_cycles = 6\n"
        "cavity.omega_c = 0.3185\ncavity.g_c = 0.01\n"
        "grid.n_z = 256\ngrid.z_max = 60\n"
        "ionization.escape_length = 10\n")
    data_path = tmp_path / "atom110.dat"
    export_electronic_data(cfg, data_path, n_states=110, escape_length=10.0)
    data = load_electronic_data(data_path)

    cuts = {}
    for n_photon in (2, 4, 8, 12):
        basis = build_polariton_basis(data, CavitySpec(omega_c, 0.01), n_photon)
        n = int(round(pulse.t_final / 0.02 / 10)) * 10
        setup = PropagatorSetup(basis, pulse, dt=pulse.t_final / n)
        traj = run_driven(setup, pulse.t_final, sample_stride=5,
                          record_populations=False)
        spec = spectrum_from_trajectory(traj, t_f=pulse.t_final, omega0=omega0,
                                        delta_omega=2 * omega0)
        fit = fit_cutoff(spec.omega, spec.smoothed,
                         fit_range=positive_fit_range(spec.omega, spec.smoothed,
                                                      5 * omega0, 4.5))
        cuts[n_photon] = fit.omega_cut

    coarse = abs(cuts[4] - cuts[2])
    fine = abs(cuts[12] - cuts[8])
    assert fine < coarse, cuts
    # the converged ladder spans the measured cutoff region
    assert (12 - 1) * omega_c >= 0.8 * cuts[12]
    assert (2 - 1) * omega_c < 0.8 * cuts[12]
    report("trend-photon-ladder",
           f"w_cut(N_p): {({k: round(v, 3) for k, v in cuts.items()})}; "
           f"|D(12,8)| = {fine:.3f} < |D(4,2)| = {coarse:.3f}; "
           f"(N_p-1)*w_c = {11 * omega_c:.2f} reaches w_cut = {cuts[12]:.2f}")


# --- 7. numerical hygiene ------------------------------------------------------

@slow
def test_criterion_hygiene_norm_conservation():
    grid = GridSpec(n_z=64, z_max=20.0, n_xc=16, xc_max=8.0)
    ham = GridHamiltonian(grid, SoftCoreModel(), CavitySpec(0.5, 0.02))
    state = imaginary_time_ground_state(ham, tol=1e-12)
    z = grid.z_axis()[:, None]
    psi = state.psi * np.exp(1j * 0.3 * z)   # boosted: not an eigenstate
    state = GridState.from_psi(psi, grid)
    _, traj = propagate_rk4(state, ham, 0.0, 10.0, 0.001, pulse=None,
                            sample_stride=1000)
    drift = np.abs(traj.norm - traj.norm[0]).max()
    assert drift <= 1e-8
    report("hygiene-norm-conservation", f"|N(t) - N(0)| = {drift:.2e} <= 1e-8 "
           "over 1e4 RK4 steps")


def test_criterion_hygiene_split_step_convergence():
    from scipy.linalg import expm
    from conftest import random_model
    rng = np.random.default_rng(2)
    data = random_model(rng, 5, with_rates=True)
    basis = build_polariton_basis(data, CavitySpec(0.4, 0.02), 3)
    f_const = 0.03
    t_end = 16.0
    h = np.diag(basis.energies - 0.5j * basis.gamma_p) - basis.mu_pq["z"] * f_const
    c0 = np.zeros(basis.dim, dtype=complex)
    c0[0] = 1.0
    ref = expm(-1j * h * t_end) @ c0

    def final_error(dt):
        from cavhhg.tdci import CoefficientState, split_step
        setup = PropagatorSetup(basis, PulseSpec(0.03, 0.4, 1), dt=dt,
                                field_fn=lambda t: f_const)
        state = CoefficientState(c0.copy(), 0.0)
        for _ in range(int(round(t_end / dt))):
            state = split_step(state, setup)
        return np.abs(state.c - ref).max()

    ratio = final_error(0.02) / final_error(0.01)
    assert 1.8 <= ratio <= 2.2
    report("hygiene-split-step", f"dt-halving error ratio {ratio:.3f} in 2.0 +- 0.2")


def test_criterion_hygiene_energy_closure_and_photon_positivity():
    grid = GridSpec(n_z=64, z_max=20.0, n_xc=32, xc_max=15.0)
    cavity = CavitySpec(0.05, 0.01)
    ham_free = GridHamiltonian(grid, SoftCoreModel(), cavity)
    state = imaginary_time_ground_state(ham_free, tol=1e-11)
    pulse = PulseSpec(0.03, 0.05, 1)
    caps = CapSpec(13.4, 1e-3, 12.0, 0.01)
    ham = GridHamiltonian(grid, SoftCoreModel(), cavity, caps=caps)
    n = int(round(pulse.t_peak / 0.005))
    final, traj = propagate_rk4(state, ham, 0.0, pulse.t_peak, pulse.t_peak / n,
                                pulse, sample_stride=n // 20)
    obs = grid_observables(final, ham)
    closure = abs(obs.e_tot - ham.energy(final.psi))
    assert closure <= 1e-10
    assert np.all(traj.n_c >= -1e-10)
    report("hygiene-closure-positivity",
           f"E_tot decomposition closure {closure:.2e} <= 1e-10; "
           f"min <n_c> = {traj.n_c.min():.3e} >= -1e-10")


def test_criterion_hygiene_undriven_spectrum_floor():
    # undriven ground state: spectrum is numerically dark next to a driven run
    grid = GridSpec(n_z=64, z_max=20.0, n_xc=16, xc_max=10.0)
    cavity = CavitySpec(0.5, 0.01)
    ham_free = GridHamiltonian(grid, SoftCoreModel(), cavity)
    state = imaginary_time_ground_state(ham_free, tol=1e-12)
    caps = CapSpec(13.4, 1e-3, 8.0, 0.01)
    ham = GridHamiltonian(grid, SoftCoreModel(), cavity, caps=caps)
    t_end = 40.0

    def spectrum(pulse):
        start = GridState.from_psi(state.psi.copy(), grid)
        _, traj = propagate_rk4(start, ham, 0.0, t_end, 0.005, pulse,
                                sample_stride=10)
        return spectrum_from_trajectory(traj, t_f=t_end)

    dark = spectrum(None)
    driven = spectrum(PulseSpec(0.05, 0.5, 3))
    plateau = driven.intensity.max()
    assert dark.intensity.max() <= 1e-20 * plateau
    report("hygiene-undriven-floor",
           f"undriven max intensity {dark.intensity.max():.2e} <= 1e-20 x "
           f"driven response {plateau:.2e}")
