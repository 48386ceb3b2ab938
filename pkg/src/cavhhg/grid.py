"""Grid solver for the 1D soft-core atom coupled to one cavity displacement coordinate.

The wavepacket Psi(z, x_c) lives on an equidistant product grid, symmetric
about zero with inclusive endpoints (z_j = -z_max + j*dz, dz = 2*z_max/(n-1)).
Kinetic terms are applied spectrally via FFT; stationary states come from the
equivalent dense Fourier-grid Hamiltonian. Real-time propagation uses a
classical RK4 stepper with the complex absorbing potentials inside the
right-hand side, so the Hamiltonian is non-Hermitian during driven runs.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
import scipy.linalg as sla

from .errors import ConvergenceError, DataFormatError, PropagationError
from .model import CavitySpec, PulseSpec, pulse_scalar
from .records import TrajectoryRecord


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Product grid: n_z electron points on [-z_max, z_max], n_xc cavity points."""

    n_z: int = 512
    z_max: float = 100.0
    n_xc: int = 256
    xc_max: float = 50.0

    def __post_init__(self):
        for name, n in (("n_z", self.n_z), ("n_xc", self.n_xc)):
            if not _is_power_of_two(n):
                raise ValueError(f"{name} must be a power of two, got {n}")
        if self.z_max <= 0.0 or self.xc_max <= 0.0:
            raise ValueError("grid extents must be positive")

    @property
    def dz(self) -> float:
        return 2.0 * self.z_max / (self.n_z - 1) if self.n_z > 1 else 2.0 * self.z_max

    @property
    def dxc(self) -> float:
        return 2.0 * self.xc_max / (self.n_xc - 1) if self.n_xc > 1 else 2.0 * self.xc_max

    @property
    def cell(self) -> float:
        """Volume element dz*dxc of the product grid."""
        return self.dz * self.dxc

    def z_axis(self) -> np.ndarray:
        return np.linspace(-self.z_max, self.z_max, self.n_z)

    def xc_axis(self) -> np.ndarray:
        return np.linspace(-self.xc_max, self.xc_max, self.n_xc)


@dataclass(frozen=True)
class SoftCoreModel:
    """Regularized Coulomb potential -charge/(|z - center| + eta)."""

    charge: float = 1.0
    eta: float = 0.9871
    center: float = 0.0

    def __post_init__(self):
        if self.eta <= 0.0:
            raise ValueError(f"eta must be > 0, got {self.eta}")

    def potential(self, z: np.ndarray) -> np.ndarray:
        return -self.charge / (np.abs(z - self.center) + self.eta)


@dataclass(frozen=True)
class CapSpec:
    """Absorbing potentials: quadratic on the electron axis, linear on the cavity axis.

    Applied symmetrically at both grid ends: Gamma(z) = a*(|z|-s)^2 for
    |z| >= s, Gamma(x_c) = a_W*(|x_c|-W_s) for |x_c| >= W_s.
    """

    electron_onset: float       # s
    electron_strength: float    # a
    cavity_onset: float         # W_s
    cavity_strength: float      # a_W

    def __post_init__(self):
        if self.electron_strength < 0.0 or self.cavity_strength < 0.0:
            raise ValueError("CAP strengths must be >= 0")

    @classmethod
    def for_grid(cls, grid: GridSpec, omega_c: float = None,
                 onset_fraction: float = 0.67,
                 electron_strength: float = 1.0135e-4) -> "CapSpec":
        """Default CAP: electron onset at a fraction of the half-extent, cavity
        values from the tuned per-frequency table when omega_c is given."""
        s = onset_fraction * grid.z_max
        if omega_c is not None:
            _, _, w_s, a_w = cavity_grid_parameters(omega_c)
        else:
            w_s, a_w = 0.8 * grid.xc_max, 0.0
        return cls(s, electron_strength, w_s, a_w)


# Tuned cavity-coordinate grid and CAP parameters keyed by cavity frequency:
# omega_c -> (n_xc, xc_max, W_s, a_W). The values are tuned, not smooth;
# interpolation between rows is deliberately unsupported.
CAVITY_GRID_TABLE = {
    0.03: (256, 65.0, 45.0, 0.005),
    0.05: (256, 50.0, 40.0, 0.01),
    0.1: (64, 20.0, 16.0, 0.025),
    0.2: (64, 20.0, 16.0, 0.025),
    0.3: (64, 20.0, 16.0, 0.025),
    0.3185: (64, 20.0, 16.0, 0.025),
    0.375: (64, 20.0, 16.0, 0.025),
    0.45: (32, 10.0, 8.0, 0.05),
    0.5: (32, 10.0, 8.0, 0.05),
    0.6: (32, 8.0, 7.0, 0.1),
}


def cavity_grid_parameters(omega_c: float):
    """Look up (n_xc, xc_max, W_s, a_W) for a tabulated cavity frequency.

    Raises KeyError for frequencies not in the table; callers must then supply
    explicit grid and CAP values.
    """
    for key, row in CAVITY_GRID_TABLE.items():
        if abs(key - omega_c) <= 1e-12:
            return row
    raise KeyError(
        f"omega_c = {omega_c} has no tabulated cavity grid; "
        "supply grid.n_xc/grid.xc_max and cavity CAP values explicitly"
    )


@dataclass
class Potentials:
    """Static potential terms on the grid."""

    v_e: np.ndarray      # (n_z,)
    v_c: np.ndarray      # (n_xc,)
    v_int: np.ndarray    # (n_z, n_xc)
    v_dse: np.ndarray    # (n_z,)


def build_potentials(grid: GridSpec, model: SoftCoreModel, cavity: CavitySpec) -> Potentials:
    """Electron, cavity, bilinear coupling, and dipole-self-energy potentials.

    The cavity mode is polarized along z, so the coupling term is
    -sqrt(2*omega_c)*g_c*z*x_c and the self-energy term (g_c^2/omega_c)*z^2.
    """
    z = grid.z_axis()
    xc = grid.xc_axis()
    v_e = model.potential(z)
    v_c = 0.5 * cavity.omega_c**2 * xc**2
    v_int = -math.sqrt(2.0 * cavity.omega_c) * cavity.g_c * np.outer(z, xc)
    v_dse = (cavity.g_c**2 / cavity.omega_c) * z**2
    return Potentials(v_e, v_c, v_int, v_dse)


def fourier_grid_kinetic(n: int, half_extent: float) -> np.ndarray:
    """Dense kinetic matrix T = F^-1 diag(k^2/2) F on the inclusive grid."""
    dx = 2.0 * half_extent / (n - 1)
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    f = np.fft.fft(np.eye(n), axis=0)
    t = np.fft.ifft((0.5 * k**2)[:, None] * f, axis=0).real
    return 0.5 * (t + t.T)


def solve_grid_1d(n: int, half_extent: float, potential: np.ndarray, n_states: int):
    """Eigenpairs of T + diag(V) on a 1D grid, grid-orthonormal eigenvectors.

    Returns (energies ascending, states of shape (n_states, n)) with
    sum(|phi|^2)*dx = 1 and a fixed sign convention (largest component > 0).
    """
    if n_states > n:
        raise ValueError(f"n_states = {n_states} exceeds grid size {n}")
    h = fourier_grid_kinetic(n, half_extent) + np.diag(potential)
    try:
        energies, vecs = sla.eigh(h, subset_by_index=[0, n_states - 1])
    except sla.LinAlgError as exc:
        raise ConvergenceError(f"grid eigensolver failed: {exc}") from exc
    dx = 2.0 * half_extent / (n - 1)
    states = vecs.T / math.sqrt(dx)
    for phi in states:
        if phi[np.argmax(np.abs(phi))] < 0.0:
            phi *= -1.0
    return energies, states


def solve_stationary_electronic(grid: GridSpec, model: SoftCoreModel, n_states: int):
    """Field-free electronic eigenpairs {E_i, phi_i(z)} via the Fourier-grid Hamiltonian."""
    return solve_grid_1d(grid.n_z, grid.z_max, model.potential(grid.z_axis()), n_states)


def electronic_dipoles(grid: GridSpec, states: np.ndarray) -> np.ndarray:
    """Dipole matrix mu_ij = <phi_i|(-z)|phi_j> by grid quadrature."""
    z = grid.z_axis()
    return -(states * z) @ states.T * grid.dz


@dataclass
class GridState:
    """Complex wavepacket on the product grid with cached norm."""

    psi: np.ndarray
    t: float
    norm: float
    grid: GridSpec

    @classmethod
    def from_psi(cls, psi: np.ndarray, grid: GridSpec, t: float = 0.0) -> "GridState":
        if psi.shape != (grid.n_z, grid.n_xc):
            raise ValueError(f"psi shape {psi.shape} does not match grid "
                             f"({grid.n_z}, {grid.n_xc})")
        psi = np.ascontiguousarray(psi, dtype=np.complex128)
        return cls(psi, t, _grid_norm(psi, grid.cell), grid)

    def normalized(self) -> "GridState":
        return GridState(self.psi / math.sqrt(self.norm), self.t, 1.0, self.grid)


def _grid_norm(psi: np.ndarray, cell: float) -> float:
    return float(np.sum(psi.real**2 + psi.imag**2) * cell)


class GridHamiltonian:
    """Pauli-Fierz Hamiltonian on the (z, x_c) grid with spectral kinetics.

    Bundles the precomputed momentum grids, static potentials, CAP profile and
    the laser coupling (+z*F_z(t), from mu_z = -z). `caps=None` gives the
    Hermitian Hamiltonian used for relaxation and observables.
    """

    def __init__(self, grid: GridSpec, model: SoftCoreModel, cavity: CavitySpec,
                 caps: CapSpec = None, electron_potential: np.ndarray = None):
        self.grid = grid
        self.model = model
        self.cavity = cavity
        self.caps = caps
        z = grid.z_axis()
        xc = grid.xc_axis()
        kz = 2.0 * np.pi * np.fft.fftfreq(grid.n_z, d=grid.dz)
        kx = 2.0 * np.pi * np.fft.fftfreq(grid.n_xc, d=grid.dxc)
        self.kin_z = 0.5 * kz**2
        self.kin_x = 0.5 * kx**2
        self.kin_2d = self.kin_z[:, None] + self.kin_x[None, :]
        self.pots = build_potentials(grid, model, cavity)
        if electron_potential is not None:
            self.pots.v_e = np.asarray(electron_potential, dtype=float)
        self.v_static = (self.pots.v_e[:, None] + self.pots.v_c[None, :]
                         + self.pots.v_int + self.pots.v_dse[:, None])
        self.z_col = z[:, None]
        self.xc_row = xc[None, :]
        if caps is not None:
            self.gamma = self._cap_profile(z, xc, caps)
        else:
            self.gamma = None
        # -i*(V - i*Gamma) fused for the propagation right-hand side
        self._w_rhs = -1j * self.v_static - (self.gamma if self.gamma is not None else 0.0)
        self._neg_i_kin = -1j * self.kin_2d

    def _cap_profile(self, z, xc, caps: CapSpec) -> np.ndarray:
        if caps.electron_onset >= self.grid.z_max:
            raise ValueError(
                f"electron CAP onset {caps.electron_onset} not inside grid "
                f"(z_max = {self.grid.z_max})")
        if caps.cavity_strength > 0.0 and caps.cavity_onset >= self.grid.xc_max:
            raise ValueError(
                f"cavity CAP onset {caps.cavity_onset} not inside grid "
                f"(xc_max = {self.grid.xc_max})")
        az = np.abs(z)
        ax = np.abs(xc)
        gz = np.where(az >= caps.electron_onset,
                      caps.electron_strength * (az - caps.electron_onset) ** 2, 0.0)
        gx = np.where(ax >= caps.cavity_onset,
                      caps.cavity_strength * (ax - caps.cavity_onset), 0.0)
        return gz[:, None] + gx[None, :]

    def apply_kinetic(self, psi: np.ndarray) -> np.ndarray:
        return sfft.ifft2(self.kin_2d * sfft.fft2(psi))

    def apply(self, psi: np.ndarray, field_z: float = 0.0) -> np.ndarray:
        """Hermitian part H*psi (kinetic + potentials + laser), CAPs excluded."""
        out = self.apply_kinetic(psi)
        out += self.v_static * psi
        if field_z != 0.0:
            out += (field_z * self.z_col) * psi
        return out

    def rhs(self, psi: np.ndarray, field_z: float) -> np.ndarray:
        """dpsi/dt = -i*(H - i*Gamma)*psi with the instantaneous field."""
        out = sfft.ifft2(self._neg_i_kin * sfft.fft2(psi))
        if field_z != 0.0:
            out += (self._w_rhs + (-1j * field_z) * self.z_col) * psi
        else:
            out += self._w_rhs * psi
        return out

    def energy(self, psi: np.ndarray) -> float:
        """Norm-divided <H> (Hermitian part)."""
        cell = self.grid.cell
        e = np.vdot(psi, self.apply(psi)).real * cell
        return e / _grid_norm(psi, cell)

    def product_ground_guess(self) -> np.ndarray:
        """Product of the 1D electronic and cavity ground states (imag-time seed)."""
        _, phi = solve_grid_1d(self.grid.n_z, self.grid.z_max,
                               self.pots.v_e, 1)
        _, chi = solve_grid_1d(self.grid.n_xc, self.grid.xc_max,
                               self.pots.v_c, 1)
        return np.outer(phi[0], chi[0]).astype(np.complex128)

    def spectral_bound(self) -> float:
        """Upper bound on |H| eigenvalues: max kinetic + max |potential|.

        The completed-square corner of the coupled potential can dominate this
        bound at strong coupling; explicit RK4 steps must respect it.
        """
        return float(self.kin_2d.max() + np.abs(self.v_static).max())

    def stable_rk4_step(self, safety: float = 0.7) -> float:
        """Largest RK4 step the spectral radius allows (|lambda|*dt < 2.785)."""
        return safety * 2.785 / self.spectral_bound()


def imaginary_time_ground_state(ham: GridHamiltonian, grid: GridSpec = None,
                                dtau: float = None, tol: float = 1e-10,
                                max_steps: int = 200000,
                                psi0: np.ndarray = None) -> GridState:
    """Relax to the polaritonic ground state: dpsi/dtau = -H psi, renormalized each step.

    CAPs and laser must be off; converged when |Delta E| < tol between steps.
    The default dtau respects the RK4 stability bound of the full spectral
    radius (the coupled potential grows quadratically towards the grid
    corners, so a fixed step would silently diverge at strong coupling).
    """
    if ham.caps is not None:
        raise ValueError("imaginary-time relaxation requires a CAP-free Hamiltonian")
    if dtau is None:
        dtau = min(0.01, ham.stable_rk4_step())
    grid = grid or ham.grid
    cell = grid.cell
    psi = ham.product_ground_guess() if psi0 is None else np.array(psi0, dtype=np.complex128)
    psi /= math.sqrt(_grid_norm(psi, cell))
    e_old = np.inf
    sixth = dtau / 6.0
    for step in range(max_steps):
        k1 = -ham.apply(psi)
        # <H> for free from the first stage: E = -Re<psi|k1>*cell (psi normalized)
        e = -np.vdot(psi, k1).real * cell
        delta = abs(e - e_old)
        if delta < tol:
            return GridState.from_psi(psi, grid, 0.0)
        e_old = e
        k2 = -ham.apply(psi + 0.5 * dtau * k1)
        k3 = -ham.apply(psi + 0.5 * dtau * k2)
        k4 = -ham.apply(psi + dtau * k3)
        psi = psi + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        psi /= math.sqrt(_grid_norm(psi, cell))
    raise ConvergenceError(
        f"imaginary time did not reach |dE| < {tol} in {max_steps} steps",
        residual=delta)


@dataclass
class GridObservables:
    """Norm-divided expectation values except mu_z (raw, feeds the HHG transform)."""

    norm: float
    mu_z: float
    z: float       # <z>/N
    xc: float      # <x_c>/N
    n_c: float
    e_e: float
    e_c: float
    e_int: float
    e_dse: float
    e_tot: float


def grid_observables(state: GridState, ham: GridHamiltonian) -> GridObservables:
    """Expectation values of Eq-by-Eq Hamiltonian pieces and coordinates.

    n_c = (<H^c + H^int + H^dse>/N)/omega_c - 1/2 in this coordinate picture.
    """
    grid = state.grid
    cell = grid.cell
    psi = state.psi
    dens = psi.real**2 + psi.imag**2
    norm = float(dens.sum() * cell)
    if norm < 1e-12:
        raise PropagationError(f"norm {norm} below 1e-12: state fully ionized")

    mu_z = float(-(dens * ham.z_col).sum() * cell)
    z_mean = -mu_z / norm
    xc_mean = float((dens * ham.xc_row).sum() * cell) / norm

    # axis-wise kinetic energies via 1D spectral application
    t_z = np.vdot(psi, sfft.ifft(ham.kin_z[:, None] * sfft.fft(psi, axis=0), axis=0)).real * cell
    t_x = np.vdot(psi, sfft.ifft(ham.kin_x[None, :] * sfft.fft(psi, axis=1), axis=1)).real * cell
    v_e = float((dens * ham.pots.v_e[:, None]).sum() * cell)
    v_c = float((dens * ham.pots.v_c[None, :]).sum() * cell)
    v_int = float((dens * ham.pots.v_int).sum() * cell)
    v_dse = float((dens * ham.pots.v_dse[:, None]).sum() * cell)

    e_e = (t_z + v_e) / norm
    e_c = (t_x + v_c) / norm
    e_int = v_int / norm
    e_dse = v_dse / norm
    e_tot = e_e + e_c + e_int + e_dse
    n_c = (e_c + e_int + e_dse) / ham.cavity.omega_c - 0.5
    return GridObservables(norm, mu_z, z_mean, xc_mean, n_c, e_e, e_c, e_int, e_dse, e_tot)


def propagate_rk4(state: GridState, ham: GridHamiltonian, t0: float, t1: float,
                  dt: float, pulse: PulseSpec = None, sample_stride: int = 1):
    """Drive the wavepacket from t0 to t1 with RK4 at fixed dt.

    The field enters as -mu_z*F_z(t) = +z*F_z(t); no renormalization is applied.
    Observables are sampled every `sample_stride` steps (plus the final step);
    returns (final GridState, TrajectoryRecord).
    """
    n_steps = int(round((t1 - t0) / dt))
    if abs(n_steps * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise ValueError(f"dt = {dt} does not divide the interval [{t0}, {t1}]")
    if sample_stride < 1:
        raise ValueError("sample_stride must be >= 1")

    pol_z = pulse.polarization[2] if pulse is not None else 0.0

    def field(t):
        return pol_z * pulse_scalar(t, pulse) if pulse is not None else 0.0

    psi = state.psi.copy()
    cell = state.grid.cell
    norm_start = _grid_norm(psi, cell)
    samples = {name: [] for name in
               ("t", "mu_z", "norm", "n_c", "e_e", "e_c", "e_int", "e_dse", "e_tot", "z", "xc")}

    def take_sample(step, t):
        if not np.isfinite(psi.real.sum()) or not np.isfinite(psi.imag.sum()):
            raise PropagationError(f"non-finite wavepacket at step {step}", step=step)
        norm_now = _grid_norm(psi, cell)
        if norm_now > norm_start * (1.0 + 1e-6):
            raise PropagationError(
                f"norm grew to {norm_now:.6g} at step {step}; CAPs only remove "
                f"norm, so dt={dt} likely exceeds the RK4 stability bound "
                f"({ham.stable_rk4_step():.3g})", step=step)
        obs = grid_observables(GridState(psi, t, norm_now, state.grid), ham)
        samples["t"].append(t)
        samples["mu_z"].append(obs.mu_z)
        samples["norm"].append(obs.norm)
        samples["n_c"].append(obs.n_c)
        samples["e_e"].append(obs.e_e)
        samples["e_c"].append(obs.e_c)
        samples["e_int"].append(obs.e_int)
        samples["e_dse"].append(obs.e_dse)
        samples["e_tot"].append(obs.e_tot)
        samples["z"].append(obs.z)
        samples["xc"].append(obs.xc)

    sixth = dt / 6.0
    t = t0
    for step in range(n_steps + 1):
        if step % sample_stride == 0 or step == n_steps:
            take_sample(step, t)
        if step == n_steps:
            break
        f0 = field(t)
        fm = field(t + 0.5 * dt)
        f1 = field(t + dt)
        k1 = ham.rhs(psi, f0)
        k2 = ham.rhs(psi + (0.5 * dt) * k1, fm)
        k3 = ham.rhs(psi + (0.5 * dt) * k2, fm)
        k4 = ham.rhs(psi + dt * k3, f1)
        psi += sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t0 + (step + 1) * dt

    record = TrajectoryRecord(
        **{name: np.asarray(vals) for name, vals in samples.items()},
        meta={"backend": "grid", "dt": repr(dt), "sample_stride": repr(sample_stride)},
    )
    final = GridState(psi, t, _grid_norm(psi, cell), state.grid)
    return final, record


CHECKPOINT_MAGIC = "cavhhg-checkpoint 1"


def save_checkpoint(path, state: GridState) -> None:
    """Dump Psi as raw little-endian complex doubles behind a short text header."""
    grid = state.grid
    header = "\n".join([
        CHECKPOINT_MAGIC,
        f"n_z {grid.n_z}",
        f"z_max {grid.z_max!r}",
        f"n_xc {grid.n_xc}",
        f"xc_max {grid.xc_max!r}",
        f"t {state.t!r}",
    ]) + "\n\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(state.psi, dtype="<c16").tobytes())


def load_checkpoint(path) -> GridState:
    with open(path, "rb") as fh:
        blob = fh.read()
    try:
        head, payload = blob.split(b"\n\n", 1)
        lines = head.decode("ascii").splitlines()
        if lines[0] != CHECKPOINT_MAGIC:
            raise ValueError(f"bad magic line {lines[0]!r}")
        fields = dict(line.split(None, 1) for line in lines[1:])
        grid = GridSpec(int(fields["n_z"]), float(fields["z_max"]),
                        int(fields["n_xc"]), float(fields["xc_max"]))
        t = float(fields["t"])
        psi = np.frombuffer(payload, dtype="<c16").reshape(grid.n_z, grid.n_xc)
    except (KeyError, ValueError) as exc:
        raise DataFormatError(f"corrupt checkpoint {path}: {exc}") from exc
    return GridState.from_psi(psi.astype(np.complex128), grid, t)
