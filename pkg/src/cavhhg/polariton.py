"""Polaritonic eigenbasis from ingested electronic-structure data.

Builds the light-matter Hamiltonian in the product basis |electronic state i> x
|n photons> (flat index in = i*n_photon + n), diagonalizes it, transforms the
dipole matrices, and derives per-state ionization rates and zero-order
decompositions.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ConvergenceError
from .model import CavitySpec

_SYM_TOL = 1e-10
AXES = ("x", "y", "z")


@dataclass
class CisDetail:
    """Per-configuration expansion data behind each electronic state.

    Parallel arrays: state index, occupied orbital, virtual orbital, expansion
    coefficient, virtual-orbital energy. ip is the ionization potential used as
    the rate threshold.
    """

    state: np.ndarray
    occ: np.ndarray
    virt: np.ndarray
    coeff: np.ndarray
    virt_energy: np.ndarray
    ip: float

    def __post_init__(self):
        n = len(self.state)
        for name in ("occ", "virt", "coeff", "virt_energy"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"cis detail column {name!r} length mismatch")


@dataclass
class ElectronicData:
    """Ingested zero-order electronic states: energies, dipoles, optional rates.

    energies ascend with the ground state first; dipole maps Cartesian axis ->
    symmetric (n, n) matrix for the components that exist. rates (if given) are
    per-state ionization widths Gamma_i; cis_detail allows computing them.
    """

    energies: np.ndarray
    dipole: dict
    rates: np.ndarray = None
    cis_detail: CisDetail = None
    ip: float = None

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        if self.energies.ndim != 1 or len(self.energies) == 0:
            raise ValueError("energies must be a non-empty 1D array")
        if np.any(np.diff(self.energies) < -1e-12):
            raise ValueError("energies must ascend (ground state first)")
        n = len(self.energies)
        for axis, mat in self.dipole.items():
            if axis not in AXES:
                raise ValueError(f"unknown dipole axis {axis!r}")
            mat = np.asarray(mat, dtype=float)
            if mat.shape != (n, n):
                raise ValueError(f"dipole_{axis} shape {mat.shape}, expected {(n, n)}")
            if np.max(np.abs(mat - mat.T)) > _SYM_TOL:
                raise ValueError(f"dipole_{axis} not symmetric within {_SYM_TOL}")
            self.dipole[axis] = mat
        if self.rates is not None:
            self.rates = np.asarray(self.rates, dtype=float)
            if self.rates.shape != (n,):
                raise ValueError("rates length does not match energies")
            if np.any(self.rates < 0.0):
                raise ValueError("rates must be >= 0")

    @property
    def n_states(self) -> int:
        return len(self.energies)


def project_dipole(data: ElectronicData, polarization) -> np.ndarray:
    """Polarization-projected dipole matrix sum_axis e_axis * mu_axis."""
    n = data.n_states
    out = np.zeros((n, n))
    for weight, axis in zip(polarization, AXES):
        if abs(weight) < 1e-15:
            continue
        if axis not in data.dipole:
            raise ValueError(
                f"polarization has a {axis!r} component but dipole_{axis} is missing")
        out += weight * data.dipole[axis]
    return out


def number_ladder(n_photon: int) -> np.ndarray:
    """Matrix of (a^dag + a) in the truncated photon-number basis."""
    x = np.zeros((n_photon, n_photon))
    for n in range(n_photon - 1):
        x[n + 1, n] = x[n, n + 1] = math.sqrt(n + 1)
    return x


def assemble_pauli_fierz(data: ElectronicData, cavity: CavitySpec, n_photon: int) -> np.ndarray:
    """Light-matter Hamiltonian in the product basis, flat index i*n_photon + n.

    Diagonal: E_i + n*omega_c (no zero-point offset). Off-diagonal photon
    blocks: g_c*mu~_ij*(a^dag + a). Photon-diagonal blocks additionally carry
    the self-energy (g_c^2/omega_c) * (mu~^2)_ij with the operator square
    resolved inside the ingested state space.
    """
    if n_photon < 1:
        raise ValueError(f"n_photon must be >= 1, got {n_photon}")
    mu = project_dipole(data, cavity.polarization)
    eye_p = np.eye(n_photon)
    h = np.kron(np.diag(data.energies), eye_p)
    h += np.kron(np.eye(data.n_states), cavity.omega_c * np.diag(np.arange(n_photon)))
    if cavity.g_c != 0.0:
        h += cavity.g_c * np.kron(mu, number_ladder(n_photon))
        h += (cavity.g_c**2 / cavity.omega_c) * np.kron(mu @ mu, eye_p)
    return h


def diagonalize(h: np.ndarray):
    """Ascending eigenpairs with a deterministic phase (largest coefficient > 0)."""
    try:
        energies, vecs = sla.eigh(h)
    except sla.LinAlgError as exc:
        raise ConvergenceError(f"polariton eigensolver failed: {exc}") from exc
    for col in vecs.T:
        if col[np.argmax(np.abs(col))] < 0.0:
            col *= -1.0
    return energies, vecs


def transform_dipole(coefficients: np.ndarray, mu_ij: np.ndarray, n_photon: int) -> np.ndarray:
    """Photon-diagonal dipole in the polariton basis: D^T (mu x I) D."""
    big = np.kron(np.asarray(mu_ij, dtype=float), np.eye(n_photon))
    return coefficients.T @ big @ coefficients


def ionization_rates_cis(energies: np.ndarray, detail: CisDetail, escape_length: float) -> np.ndarray:
    """Heuristic per-state rates: sum of |D|^2 sqrt(eps_r)/d over escaping configurations.

    States whose excitation energy E_i - E_0 stays below the ionization
    potential get zero; configurations on bound virtuals (eps_r < 0) do not
    contribute.
    """
    if escape_length <= 0.0:
        raise ValueError(f"escape length must be > 0, got {escape_length}")
    energies = np.asarray(energies, dtype=float)
    gamma = np.zeros(len(energies))
    excitation = energies - energies[0]
    open_channel = np.sqrt(np.maximum(detail.virt_energy, 0.0)) / escape_length
    contrib = np.abs(detail.coeff) ** 2 * open_channel
    np.add.at(gamma, detail.state.astype(int), contrib)
    gamma[excitation < detail.ip] = 0.0
    return gamma


def ionization_rates_polariton(coefficients: np.ndarray, gamma_i: np.ndarray,
                               n_photon: int) -> np.ndarray:
    """Polaritonic rates as the |D|^2-weighted sum of the electronic rates."""
    gamma_i = np.asarray(gamma_i, dtype=float)
    weights = np.abs(coefficients) ** 2    # (i*n_photon+n, p)
    per_state = weights.reshape(len(gamma_i), n_photon, -1).sum(axis=1)
    return gamma_i @ per_state


@dataclass
class PolaritonBasis:
    """Diagonalized light-matter eigenbasis plus transformed operators."""

    cavity: CavitySpec
    n_states: int
    n_photon: int
    energies: np.ndarray          # (dim,)
    coefficients: np.ndarray      # (dim, dim), columns are eigenstates
    mu_pq: dict                   # axis -> (dim, dim)
    gamma_p: np.ndarray = None
    cavity_energy_op: np.ndarray = None    # H^c + H^int + H^dse in the eigenbasis
    data: ElectronicData = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.n_states * self.n_photon

    def photon_number_op(self) -> np.ndarray:
        """Photon-number operator (cavity energy over omega_c, no 1/2 offset).

        The basis-side cavity block is built from n*omega_c without zero-point
        energy, so no subtraction is needed here; the coordinate-space picture
        subtracts 1/2 instead.
        """
        return self.cavity_energy_op / self.cavity.omega_c

    def zero_order_amplitudes(self, c: np.ndarray) -> np.ndarray:
        """Amplitudes on the product states |i, n> for eigenbasis coefficients c."""
        return self.coefficients @ c


def build_polariton_basis(data: ElectronicData, cavity: CavitySpec, n_photon: int,
                          escape_length: float = None,
                          ionization: bool = None) -> PolaritonBasis:
    """Assemble, diagonalize, and transform everything needed for propagation.

    Rates: taken from data.rates if present, else computed from data.cis_detail
    (requires escape_length), else zero. `ionization=False` forces zero rates;
    `ionization=True` errors when no rate source exists.
    """
    h = assemble_pauli_fierz(data, cavity, n_photon)
    energies, coeffs = diagonalize(h)

    mu_pq = {axis: transform_dipole(coeffs, mat, n_photon)
             for axis, mat in data.dipole.items()}

    if ionization is False:
        gamma_i = np.zeros(data.n_states)
    elif data.rates is not None:
        gamma_i = data.rates
    elif data.cis_detail is not None:
        if escape_length is None:
            raise ValueError("escape length required to compute rates from CIS detail")
        gamma_i = ionization_rates_cis(data.energies, data.cis_detail, escape_length)
    elif ionization:
        raise ValueError("ionization requested but data has neither rates nor CIS detail")
    else:
        gamma_i = np.zeros(data.n_states)
    gamma_p = ionization_rates_polariton(coeffs, gamma_i, n_photon)

    # cavity + coupling + self-energy blocks (everything except the bare
    # electronic energies), transformed once for photon-number evaluation
    cav_block = h - np.kron(np.diag(data.energies), np.eye(n_photon))
    cavity_op = coeffs.T @ cav_block @ coeffs

    return PolaritonBasis(cavity, data.n_states, n_photon, energies, coeffs,
                          mu_pq, gamma_p, cavity_op, data)


def bare_basis(data: ElectronicData, escape_length: float = None,
               ionization: bool = None) -> PolaritonBasis:
    """Cavity-free basis (single photon slot, zero coupling): plain TD-CI setup."""
    cavity = CavitySpec(omega_c=1.0, g_c=0.0)
    return build_polariton_basis(data, cavity, 1, escape_length, ionization)


def zero_order_decomposition(basis: PolaritonBasis, p: int):
    """Weights |D_{p,in}|^2 of eigenstate p on the product states, sorted descending.

    Returns a list of (electronic index i, photon number n, weight).
    """
    if not 0 <= p < basis.dim:
        raise ValueError(f"state index {p} outside basis of dimension {basis.dim}")
    weights = np.abs(basis.coefficients[:, p]) ** 2
    order = np.argsort(weights)[::-1]
    return [(int(idx // basis.n_photon), int(idx % basis.n_photon), float(weights[idx]))
            for idx in order]
