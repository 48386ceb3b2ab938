"""Time-series containers shared by the grid and basis propagators."""

from dataclasses import dataclass, field

import numpy as np

# Scalar observable columns in their canonical output order.
SCALAR_COLUMNS = ("t", "mu_z", "norm", "n_c", "e_e", "e_c", "e_int", "e_dse", "e_tot", "z", "xc")


@dataclass
class TrajectoryRecord:
    """Sampled observables of one driven run.

    mu_z is the raw dipole expectation (never norm-divided, it feeds the HHG
    transform); all other expectation values are divided by the norm unless a
    run was configured otherwise. Optional columns are None when the back end
    does not provide them (e.g. energies for basis runs, populations for grid
    runs).
    """

    t: np.ndarray
    mu_z: np.ndarray
    norm: np.ndarray
    n_c: np.ndarray = None
    e_e: np.ndarray = None
    e_c: np.ndarray = None
    e_int: np.ndarray = None
    e_dse: np.ndarray = None
    e_tot: np.ndarray = None
    z: np.ndarray = None
    xc: np.ndarray = None
    populations: np.ndarray = None   # shape (n_samples, n_states)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.t)
        for name in SCALAR_COLUMNS:
            col = getattr(self, name)
            if col is not None and len(col) != n:
                raise ValueError(f"column {name!r} has {len(col)} samples, expected {n}")
        if self.populations is not None and self.populations.shape[0] != n:
            raise ValueError(
                f"populations has {self.populations.shape[0]} samples, expected {n}"
            )

    @property
    def n_samples(self) -> int:
        return len(self.t)

    def columns(self):
        """Present scalar columns in canonical order."""
        return [c for c in SCALAR_COLUMNS if getattr(self, c) is not None]
