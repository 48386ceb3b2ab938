"""Shared physical definitions: driving pulse, cavity parameters, coupling constant.

Both propagation back ends (grid and polaritonic basis) consume these types.
"""

import math
from dataclasses import dataclass

import numpy as np

_UNIT_TOL = 1e-12


def _check_unit_vector(vec, name):
    v = np.asarray(vec, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise ValueError(f"{name} must be a unit vector, |{name}| = {np.linalg.norm(v)!r}")
    return tuple(float(c) for c in v)


@dataclass(frozen=True)
class PulseSpec:
    """Classical driving pulse: cos carrier under a cos^2 envelope.

    f0        peak field amplitude, E_h/(e a0)
    omega0    carrier angular frequency, E_h/hbar
    n_cycles  number of carrier cycles under the envelope
    polarization  unit 3-vector of the field direction

    The envelope half-length sigma_p = n_cycles*pi/omega0 is derived, not
    stored; the pulse peaks at t_p = sigma_p and ends at t_f = 2*sigma_p.
    """

    f0: float
    omega0: float
    n_cycles: int
    polarization: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.f0 < 0.0:
            raise ValueError(f"f0 must be >= 0, got {self.f0}")
        if self.omega0 <= 0.0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        if int(self.n_cycles) != self.n_cycles or self.n_cycles < 1:
            raise ValueError(f"n_cycles must be a positive integer, got {self.n_cycles}")
        object.__setattr__(self, "n_cycles", int(self.n_cycles))
        object.__setattr__(
            self, "polarization", _check_unit_vector(self.polarization, "polarization")
        )

    @property
    def sigma_p(self) -> float:
        """Envelope half-length (time from start to peak)."""
        return self.n_cycles * math.pi / self.omega0

    @property
    def t_peak(self) -> float:
        return self.sigma_p

    @property
    def t_final(self) -> float:
        return 2.0 * self.sigma_p


@dataclass(frozen=True)
class CavitySpec:
    """Single quantized cavity mode: frequency, coupling constant, polarization."""

    omega_c: float
    g_c: float
    polarization: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.omega_c <= 0.0:
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")
        if self.g_c < 0.0:
            raise ValueError(f"g_c must be >= 0, got {self.g_c}")
        object.__setattr__(
            self, "polarization", _check_unit_vector(self.polarization, "polarization")
        )


def pulse_scalar(t: float, pulse: PulseSpec) -> float:
    """Scalar pulse amplitude F0*cos(w0(t-tp))*cos^2(pi(t-tp)/(2 sigma_p)).

    Exactly zero outside [0, t_f].
    """
    sig = pulse.sigma_p
    tau = t - sig
    if t < 0.0 or t > 2.0 * sig:
        return 0.0
    return (
        pulse.f0
        * math.cos(pulse.omega0 * tau)
        * math.cos(math.pi * tau / (2.0 * sig)) ** 2
    )


def pulse_amplitude(t: float, pulse: PulseSpec) -> np.ndarray:
    """Field 3-vector at time t (polarization times the scalar amplitude)."""
    return pulse_scalar(t, pulse) * np.asarray(pulse.polarization)


def coupling_from_volume(omega_c: float, epsilon: float, v_c: float) -> float:
    """Coupling constant sqrt(hbar*omega_c / (2*epsilon*V_c)) for a cavity of volume V_c."""
    if omega_c <= 0.0 or epsilon <= 0.0 or v_c <= 0.0:
        raise ValueError(
            f"omega_c, epsilon, v_c must all be > 0, got {(omega_c, epsilon, v_c)}"
        )
    return math.sqrt(omega_c / (2.0 * epsilon * v_c))
