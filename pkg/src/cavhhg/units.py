"""Atomic-unit conventions and SI conversion factors.

All internal quantities are in Hartree atomic units (hbar = m_e = e = E_h = 1);
conversions happen only at I/O boundaries.
"""

from dataclasses import dataclass

# CODATA-2018 conversion factors.
FS_PER_AU_TIME = 2.4188843265857e-2      # 1 a.u. of time in femtoseconds
EV_PER_HARTREE = 27.211386245988         # 1 Hartree in electronvolt
NM_PER_BOHR = 5.29177210903e-2           # 1 bohr in nanometre


@dataclass(frozen=True)
class AtomicUnits:
    """Unit system constants plus SI conversion helpers."""

    hbar: float = 1.0
    electron_mass: float = 1.0
    elementary_charge: float = 1.0
    hartree: float = 1.0
    fs_per_time: float = FS_PER_AU_TIME
    ev_per_energy: float = EV_PER_HARTREE
    nm_per_length: float = NM_PER_BOHR

    def time_to_fs(self, t: float) -> float:
        return t * self.fs_per_time

    def time_from_fs(self, t_fs: float) -> float:
        return t_fs / self.fs_per_time

    def energy_to_ev(self, e: float) -> float:
        return e * self.ev_per_energy

    def energy_from_ev(self, e_ev: float) -> float:
        return e_ev / self.ev_per_energy

    def length_to_nm(self, x: float) -> float:
        return x * self.nm_per_length

    def length_from_nm(self, x_nm: float) -> float:
        return x_nm / self.nm_per_length


ATOMIC_UNITS = AtomicUnits()
