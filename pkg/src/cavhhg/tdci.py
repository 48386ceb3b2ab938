"""Split-operator propagation of coefficient vectors in the polaritonic basis.

One step applies exp(-i(H0 - i*Gamma/2)dt) exactly on the diagonal, then the
laser factor exp(+i*mu*F(t)*dt) through a cached eigendecomposition of the
polarization-projected dipole matrix (first-order Lie splitting). Complex
energies are exponentiated exactly, so ionization losses are robust to the
step size. The field is evaluated at the midpoint of each step.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PropagationError
from .model import PulseSpec, pulse_scalar
from .polariton import PolaritonBasis, zero_order_decomposition
from .records import TrajectoryRecord


@dataclass
class CoefficientState:
    """Complex coefficient vector over basis states at time t."""

    c: np.ndarray
    t: float

    @classmethod
    def ground(cls, dim: int, t: float = 0.0) -> "CoefficientState":
        c = np.zeros(dim, dtype=np.complex128)
        c[0] = 1.0
        return cls(c, t)


class PropagatorSetup:
    """Immutable per-run machinery: cached phases and dipole eigenbasis."""

    def __init__(self, basis: PolaritonBasis, pulse: PulseSpec, dt: float = 0.02,
                 field_fn=None, norm_divide: bool = True):
        if dt <= 0.0:
            raise ValueError(f"dt must be > 0, got {dt}")
        self.basis = basis
        self.pulse = pulse
        self.dt = dt
        self.norm_divide = norm_divide
        gamma = basis.gamma_p if basis.gamma_p is not None else 0.0
        self.diag_phase = np.exp(-1j * (basis.energies - 0.5j * gamma) * dt)

        mu = np.zeros((basis.dim, basis.dim))
        for weight, axis in zip(pulse.polarization, ("x", "y", "z")):
            if abs(weight) < 1e-15:
                continue
            if axis not in basis.mu_pq:
                raise ValueError(f"pulse polarized along {axis!r} but mu_{axis} missing")
            mu += weight * basis.mu_pq[axis]
        self.mu_drive = mu
        self.mu_eigvals, self.mu_eigvecs = np.linalg.eigh(mu)
        recon = (self.mu_eigvecs * self.mu_eigvals) @ self.mu_eigvecs.T
        scale = max(1.0, np.max(np.abs(mu)))
        if np.max(np.abs(recon - mu)) > 1e-12 * scale:
            raise PropagationError("cached dipole eigendecomposition drifted above 1e-12")

        # mu_drive already carries the polarization projection, so the scalar
        # pulse amplitude is the full coupling factor
        self.field = (lambda t: pulse_scalar(t, pulse)) if field_fn is None else field_fn
        self.photon_op = basis.photon_number_op()


def split_step(state: CoefficientState, setup: PropagatorSetup, t: float = None) -> CoefficientState:
    """Advance one step: diagonal factor first, then the dipole factor."""
    t0 = state.t if t is None else t
    dt = setup.dt
    f_mid = setup.field(t0 + 0.5 * dt)
    c = setup.diag_phase * state.c
    if f_mid != 0.0:
        u = setup.mu_eigvecs
        c = u @ (np.exp(1j * setup.mu_eigvals * f_mid * dt) * (u.T @ c))
    if not np.all(np.isfinite(c.view(float))):
        raise PropagationError(f"non-finite coefficients at t = {t0}")
    return CoefficientState(c, t0 + dt)


def run_driven(setup: PropagatorSetup, t_end: float, sample_stride: int = 1,
               state0: CoefficientState = None,
               record_populations: bool = True,
               record_zero_order: bool = False):
    """Propagate from t = 0 to t_end, sampling observables every `sample_stride` steps.

    The initial state defaults to the ground polaritonic state. Per sample:
    t, raw dipole mu_z, norm, photon number, populations. The photon number and
    populations are norm-divided when the setup says so; mu_z never is.

    With record_zero_order the coherent product-state populations
    |sum_p D_{p,in} C_p|^2 are collected too; returns (record, zero_order)
    then, record alone otherwise.
    """
    dt = setup.dt
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError(f"dt = {dt} does not divide t_end = {t_end}")
    if sample_stride < 1:
        raise ValueError("sample_stride must be >= 1")

    state = CoefficientState.ground(setup.basis.dim) if state0 is None else state0
    mu = setup.mu_drive
    nop = setup.photon_op

    ts, mus, norms, ncs, pops, zeros = [], [], [], [], [], []

    def take_sample(st):
        c = st.c
        norm = float(np.vdot(c, c).real)
        ts.append(st.t)
        mus.append(float(np.vdot(c, mu @ c).real))
        norms.append(norm)
        div = norm if (setup.norm_divide and norm > 0.0) else 1.0
        ncs.append(float(np.vdot(c, nop @ c).real) / div)
        if record_populations:
            pops.append(np.abs(c) ** 2 / div)
        if record_zero_order:
            zeros.append(np.abs(setup.basis.zero_order_amplitudes(c)) ** 2 / div)

    for step in range(n_steps + 1):
        if step % sample_stride == 0 or step == n_steps:
            take_sample(state)
        if step == n_steps:
            break
        state = split_step(state, setup)

    record = TrajectoryRecord(
        t=np.asarray(ts),
        mu_z=np.asarray(mus),
        norm=np.asarray(norms),
        n_c=np.asarray(ncs),
        populations=np.asarray(pops) if record_populations else None,
        meta={"backend": "basis", "dt": repr(dt), "sample_stride": repr(sample_stride),
              "n_photon": repr(setup.basis.n_photon)},
    )
    if record_zero_order:
        return record, np.asarray(zeros)
    return record


def population_report(traj: TrajectoryRecord, top_k: int, basis: PolaritonBasis = None):
    """The top_k states by peak population: (index, series, decomposition) triples.

    top_k larger than the basis is clamped; decompositions are included when a
    basis is supplied.
    """
    if traj.populations is None:
        raise ValueError("trajectory carries no populations")
    n_states = traj.populations.shape[1]
    top_k = min(top_k, n_states)
    peak = traj.populations.max(axis=0)
    order = np.argsort(peak)[::-1][:top_k]
    report = []
    for p in order:
        decomp = zero_order_decomposition(basis, int(p)) if basis is not None else None
        report.append((int(p), traj.populations[:, p].copy(), decomp))
    return report
