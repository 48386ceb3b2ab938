"""Run orchestration: single runs, file-to-file analysis steps, parameter sweeps."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io as cio
from .config import RunConfig
from .errors import ConfigError
from .grid import GridHamiltonian, GridState, electronic_dipoles, imaginary_time_ground_state, \
    propagate_rk4, solve_stationary_electronic
from .hhg import CutoffFit, fit_cutoff, spectrum_from_trajectory
from .polariton import CisDetail, ElectronicData, build_polariton_basis
from .tdci import CoefficientState, PropagatorSetup, run_driven

TRAJECTORY_FILE = "trajectory.tsv"
SPECTRUM_FILE = "spectrum.tsv"
CUTOFF_FILE = "cutoff.tsv"
SUMMARY_FILE = "summary.tsv"
MANIFEST_FILE = "manifest.tsv"


def _effective_dt(requested: float, t_final: float, stable: float = None,
                  stride: int = 1) -> float:
    """Largest step <= requested (and stability bound) that divides the pulse
    into a multiple of the sampling stride, keeping samples uniform."""
    target = requested if stable is None else min(requested, stable)
    n_steps = max(1, int(np.ceil(t_final / target - 1e-12)))
    n_steps = int(np.ceil(n_steps / stride)) * stride
    return t_final / n_steps


def run_grid(cfg: RunConfig, out_dir) -> dict:
    """Relax to the ground state, propagate through the pulse, analyze, write files."""
    pulse = cfg.pulse()
    cavity = cfg.cavity()
    grid = cfg.grid()
    model = cfg.soft_core()
    caps = cfg.caps(grid)

    relax_ham = GridHamiltonian(grid, model, cavity, caps=None)
    state0 = imaginary_time_ground_state(
        relax_ham, dtau=cfg.get("numerics.imag_dtau"),
        tol=cfg.get("numerics.imag_tol", 1e-10))

    ham = GridHamiltonian(grid, model, cavity, caps=caps)
    stride = cfg.sample_stride()
    dt = _effective_dt(cfg.dt(), pulse.t_final, ham.stable_rk4_step(), stride)
    final, traj = propagate_rk4(state0, ham, 0.0, pulse.t_final, dt, pulse,
                                sample_stride=stride)
    traj.meta.update(_run_meta(cfg, pulse, cavity))
    return _analyze_and_write(cfg, traj, pulse, out_dir)


def run_basis(cfg: RunConfig, out_dir) -> dict:
    """Propagate in the polaritonic eigenbasis built from an electronic data file."""
    pulse = cfg.pulse()
    cavity = cfg.cavity()
    ionization = cfg.get("ionization.enabled")
    data = cio.load_electronic_data(cfg.require("electronic.path"),
                                    require_rates=bool(ionization))
    basis = build_polariton_basis(
        data, cavity, cfg.require("numerics.n_photon"),
        escape_length=cfg.get("ionization.escape_length"),
        ionization=ionization)
    stride = cfg.sample_stride()
    setup = PropagatorSetup(basis, pulse,
                            dt=_effective_dt(cfg.dt(), pulse.t_final, stride=stride))
    state0 = None
    if cfg.get("initial_state", 0) != 0:
        state0 = CoefficientState.ground(basis.dim)
        state0.c[:] = 0.0
        state0.c[cfg.get("initial_state")] = 1.0
    traj = run_driven(setup, pulse.t_final, sample_stride=stride, state0=state0)
    traj.meta.update(_run_meta(cfg, pulse, cavity))
    return _analyze_and_write(cfg, traj, pulse, out_dir)


def _run_meta(cfg: RunConfig, pulse, cavity) -> dict:
    meta = {
        "omega0": repr(pulse.omega0), "f0": repr(pulse.f0),
        "n_cycles": repr(pulse.n_cycles),
        "omega_c": repr(cavity.omega_c), "g_c": repr(cavity.g_c),
    }
    if cfg.get("numerics.n_photon") is not None:
        meta["n_photon"] = repr(cfg.get("numerics.n_photon"))
    return meta


def positive_fit_range(omega, intensity, lo, hi):
    """Shrink [lo, hi] to end before the first underflowed-to-zero bin.

    Deeply suppressed spectra decay to exact zeros; the log-domain fit can
    only see the dynamic region above them.
    """
    inside = np.where((omega >= lo) & (omega <= hi))[0]
    zeros = inside[intensity[inside] <= 0.0]
    if len(zeros):
        hi = omega[zeros[0]] - (omega[1] - omega[0])
    return lo, hi


def _analyze_and_write(cfg: RunConfig, traj, pulse, out_dir) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    cio.write_trajectory(traj, os.path.join(out_dir, TRAJECTORY_FILE))

    spec = spectrum_from_trajectory(
        traj, t_f=pulse.t_final, omega0=pulse.omega0,
        delta_omega=cfg.get("smooth.delta_omega"))
    cio.write_spectrum(spec, os.path.join(out_dir, SPECTRUM_FILE))

    lo = cfg.get("fit.range_min", 5.0 * pulse.omega0)
    hi = cfg.get("fit.range_max", 0.9 * spec.omega[-1])
    try:
        fit = fit_cutoff(spec.omega, spec.smoothed,
                         fit_range=positive_fit_range(spec.omega, spec.smoothed, lo, hi))
    except ValueError:
        # no usable dynamic range: flagged sentinel instead of a dead run
        nan = float("nan")
        fit = CutoffFit(nan, nan, nan, nan, nan, degenerate=True)
    cio.write_cutoff(fit, os.path.join(out_dir, CUTOFF_FILE))

    return {
        "omega_c": cfg.get("cavity.omega_c"),
        "g_c": cfg.get("cavity.g_c"),
        "n_photon": cfg.get("numerics.n_photon"),
        "omega_a": fit.omega_a,
        "omega_b": fit.omega_b,
        "omega_cut": fit.omega_cut,
        "final_norm": float(traj.norm[-1]),
        "final_n_c": float(traj.n_c[-1]) if traj.n_c is not None else float("nan"),
        "out_dir": str(out_dir),
    }


def run_spectrum(cfg: RunConfig, out_dir) -> dict:
    traj = cio.read_trajectory(cfg.require("spectrum.input"))
    omega0 = cfg.require("pulse.omega0")
    spec = spectrum_from_trajectory(traj, omega0=omega0,
                                    delta_omega=cfg.get("smooth.delta_omega"))
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, SPECTRUM_FILE)
    cio.write_spectrum(spec, path)
    return {"out": path}


def run_fit(cfg: RunConfig, out_dir) -> dict:
    spec = cio.read_spectrum(cfg.require("fit.input"))
    intensity = spec.smoothed if spec.smoothed is not None else spec.intensity
    fit_range = None
    if cfg.get("fit.range_min") is not None or cfg.get("fit.range_max") is not None:
        fit_range = (cfg.get("fit.range_min", spec.omega[0]),
                     cfg.get("fit.range_max", spec.omega[-1]))
    fit = fit_cutoff(spec.omega, intensity, fit_range=fit_range, omega0=spec.omega0)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, CUTOFF_FILE)
    cio.write_cutoff(fit, path)
    return {"out": path, "omega_cut": fit.omega_cut, "degenerate": fit.degenerate}


def export_electronic_data(cfg: RunConfig, out_path, n_states: int,
                           escape_length: float = None) -> ElectronicData:
    """Solve the 1D atom and write its spectrum as an electronic data file.

    Each continuum state (excitation above I_p = -E_0) becomes one escaping
    configuration with unit coefficient and excess energy E_i, so the standard
    rate model applies unchanged to grid-derived data.
    """
    grid = cfg.grid() if "cavity.omega_c" in cfg.values else None
    if grid is None:
        from .grid import GridSpec
        grid = GridSpec(n_z=cfg.get("grid.n_z", 512), z_max=cfg.get("grid.z_max", 100.0),
                        n_xc=2, xc_max=1.0)
    model = cfg.soft_core()
    energies, states = solve_stationary_electronic(grid, model, n_states)
    mu_z = electronic_dipoles(grid, states)
    ip = -float(energies[0])
    free = np.where(energies - energies[0] >= ip)[0]
    detail = None
    if len(free):
        detail = CisDetail(
            state=free.astype(int), occ=np.zeros(len(free), dtype=int),
            virt=free.astype(int), coeff=np.ones(len(free)),
            virt_energy=energies[free] - 0.0, ip=ip)
    data = ElectronicData(energies, {"z": 0.5 * (mu_z + mu_z.T)},
                          cis_detail=detail, ip=ip)
    cio.write_electronic_data(data, out_path, escape_length=escape_length)
    return data


SWEEP_AXES = (("sweep.omega_c", "cavity.omega_c"),
              ("sweep.g_c", "cavity.g_c"),
              ("sweep.n_photon", "numerics.n_photon"))


def expand_sweep(cfg: RunConfig):
    """Cartesian expansion of the sweep axes into (tag, RunConfig) pairs.

    The underlying run mode is basis when an electronic data path is present,
    grid otherwise; expansion order is the sorted cartesian product, so sweep
    outputs are deterministic regardless of execution order.
    """
    axes = []
    for sweep_key, target in SWEEP_AXES:
        if sweep_key in cfg.values:
            axes.append((target, sorted(cfg.values[sweep_key])))
    if not axes:
        raise ConfigError(["sweep mode needs at least one sweep.* axis"])

    base_mode = "basis" if "electronic.path" in cfg.values else "grid"
    combos = [()]
    for _, vals in axes:
        combos = [prev + (v,) for prev in combos for v in vals]

    runs = []
    for combo in combos:
        values = {k: v for k, v in cfg.values.items() if not k.startswith("sweep.")}
        values["mode"] = base_mode
        tag_parts = []
        for (target, _), value in zip(axes, combo):
            values[target] = value
            short = {"cavity.omega_c": "wc", "cavity.g_c": "gc",
                     "numerics.n_photon": "np"}[target]
            tag_parts.append(f"{short}{value!r}")
        tag = "_".join(tag_parts)
        runs.append((tag, RunConfig(base_mode, values, cfg.path)))
    return runs


def run_sweep(cfg: RunConfig, out_root, threads: int = 1):
    """Execute every expanded run (optionally in parallel), then reduce.

    Individual failures are recorded in the manifest and the sweep continues.
    Returns (manifest rows, summary rows); also writes manifest.tsv and
    summary.tsv under out_root.
    """
    runs = expand_sweep(cfg)
    os.makedirs(out_root, exist_ok=True)

    def one(item):
        tag, sub = item
        out_dir = os.path.join(out_root, tag)
        try:
            summary = RUNNERS[sub.mode](sub, out_dir)
            return tag, "ok", "", summary
        except Exception as exc:   # keep the sweep alive whatever one run does
            return tag, "failed", f"{type(exc).__name__}: {exc}", None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, runs))
    else:
        results = [one(item) for item in runs]
    results.sort(key=lambda r: [tag for tag, _ in runs].index(r[0]))

    manifest = [(tag, status, message) for tag, status, message, _ in results]
    with open(os.path.join(out_root, MANIFEST_FILE), "w", encoding="ascii") as fh:
        fh.write("# columns: tag status message\n")
        for tag, status, message in manifest:
            fh.write(f"{tag}\t{status}\t{message}\n")

    summary_rows = [(tag, s) for tag, status, _, s in results if status == "ok"]
    cols = ("omega_c", "g_c", "n_photon", "omega_a", "omega_b", "omega_cut",
            "final_norm", "final_n_c")
    with open(os.path.join(out_root, SUMMARY_FILE), "w", encoding="ascii") as fh:
        fh.write("# columns: tag " + " ".join(cols) + "\n")
        for tag, s in summary_rows:
            cells = [tag]
            for c in cols:
                v = s.get(c)
                cells.append("" if v is None else (repr(float(v)) if c != "n_photon"
                                                   else str(v)))
            fh.write("\t".join(cells) + "\n")
    return manifest, summary_rows


RUNNERS = {
    "grid": run_grid,
    "basis": run_basis,
    "spectrum": run_spectrum,
    "fit": run_fit,
}
