import numpy as np
import pytest

from cavhhg.model import CavitySpec
from cavhhg.polariton import ElectronicData


@pytest.fixture
def two_level_data():
    """Resonant-friendly two-level system: gap 0.467, transition dipole 0.5."""
    energies = np.array([0.0, 0.467])
    mu = np.array([[0.0, 0.5], [0.5, 0.0]])
    return ElectronicData(energies, {"z": mu})


@pytest.fixture
def three_level_data():
    rng = np.random.default_rng(7)
    energies = np.array([0.0, 0.3, 0.8])
    mu = rng.normal(size=(3, 3))
    mu = 0.5 * (mu + mu.T)
    return ElectronicData(energies, {"z": mu})


def random_model(rng, n_states, with_rates=False):
    energies = np.sort(rng.uniform(0.0, 2.0, n_states))
    energies[0] = 0.0
    mu = rng.normal(size=(n_states, n_states))
    mu = 0.5 * (mu + mu.T)
    rates = rng.uniform(0.0, 0.05, n_states) if with_rates else None
    return ElectronicData(energies, {"z": mu}, rates=rates)


def pauli_fierz_by_elements(energies, mu, omega_c, g_c, n_photon):
    """Element-by-element reference assembly (independent of the kron path)."""
    n = len(energies)
    dim = n * n_photon
    musq = mu @ mu
    h = np.zeros((dim, dim))
    for i in range(n):
        for nn in range(n_photon):
            for j in range(n):
                for m in range(n_photon):
                    v = 0.0
                    if nn == m:
                        v += (g_c**2 / omega_c) * musq[i, j]
                        if i == j:
                            v += energies[i] + nn * omega_c
                    if m == nn - 1:
                        v += g_c * mu[i, j] * np.sqrt(nn)
                    if m == nn + 1:
                        v += g_c * mu[i, j] * np.sqrt(m)
                    h[i * n_photon + nn, j * n_photon + m] = v
    return h


def resonant_cavity(g_c, omega_c=0.467):
    return CavitySpec(omega_c=omega_c, g_c=g_c)
