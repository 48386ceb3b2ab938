"""Frequency-domain analysis: dipole acceleration, windowed spectra, cutoff fits.

The emission spectrum is |FT of the Hann-windowed dipole acceleration|^2 on the
discrete frequency grid 2*pi*k/t_f. The cutoff is measured by least-squares
fitting a three-segment model (plateau A, linear descent, noise floor B) to the
boxcar-smoothed log spectrum; the cutoff frequency is the descent midpoint.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
from scipy.optimize import minimize

from .records import TrajectoryRecord


@dataclass
class SpectrumRecord:
    """One-sided emission spectrum on the uniform grid omega_k = 2*pi*k/t_f."""

    omega: np.ndarray
    intensity: np.ndarray
    smoothed: np.ndarray = None
    omega0: float = None

    def __post_init__(self):
        if np.any(self.intensity < 0.0):
            raise ValueError("intensity must be non-negative")
        dom = np.diff(self.omega)
        if len(dom) and (np.any(dom <= 0) or np.max(np.abs(dom - dom[0])) > 1e-9 * dom[0]):
            raise ValueError("omega grid must ascend uniformly")

    @property
    def harmonic_order(self) -> np.ndarray:
        if self.omega0 is None:
            raise ValueError("omega0 not set; harmonic order undefined")
        return self.omega / self.omega0


@dataclass
class CutoffFit:
    """Three-segment fit of the log spectrum; cutoff = midpoint of the descent."""

    plateau: float          # A
    noise: float            # B
    omega_a: float
    omega_b: float
    residual: float
    degenerate: bool = False

    @property
    def omega_cut(self) -> float:
        return 0.5 * (self.omega_a + self.omega_b)


def dipole_acceleration(mu_t: np.ndarray, dt: float) -> np.ndarray:
    """Second time derivative of mu(t): central differences, one-sided at the ends.

    Exact for quadratics; O(dt^2) otherwise. Requires at least four uniform
    samples (callers with non-uniform time axes must resample first).
    """
    mu = np.asarray(mu_t, dtype=float)
    if mu.ndim != 1 or len(mu) < 4:
        raise ValueError("need at least 4 uniformly spaced samples")
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    acc = np.empty_like(mu)
    acc[1:-1] = (mu[2:] - 2.0 * mu[1:-1] + mu[:-2]) / dt**2
    acc[0] = (2.0 * mu[0] - 5.0 * mu[1] + 4.0 * mu[2] - mu[3]) / dt**2
    acc[-1] = (2.0 * mu[-1] - 5.0 * mu[-2] + 4.0 * mu[-3] - mu[-4]) / dt**2
    return acc


def acceleration_from_trajectory(traj: TrajectoryRecord) -> np.ndarray:
    """Dipole acceleration from a recorded run; validates uniform sampling."""
    t = traj.t
    dts = np.diff(t)
    if len(dts) < 3:
        raise ValueError("trajectory too short for acceleration")
    if np.max(np.abs(dts - dts[0])) > 1e-9 * dts[0]:
        raise ValueError("trajectory sampling is not uniform")
    return dipole_acceleration(traj.mu_z, float(dts[0]))


def hann_window(t: np.ndarray, t_f: float) -> np.ndarray:
    """sin^2(pi*t/t_f): exactly zero at both ends, one at t_f/2."""
    return np.sin(np.pi * t / t_f) ** 2


def hhg_spectrum(a_t: np.ndarray, t_f: float, omega0: float = None) -> SpectrumRecord:
    """Windowed spectrum of the acceleration sampled uniformly on [0, t_f] inclusive.

    I(omega) = |sum_k w(t_k) a(t_k) exp(-i omega t_k) dt|^2 with the overall
    constant fixed to dt^2; frequencies are the rfft grid with spacing
    2*pi/t_f. The final sample sits at t_f where the window vanishes, so it is
    dropped and the remaining points form one exact period.
    """
    a = np.asarray(a_t, dtype=float)
    if t_f <= 0.0:
        raise ValueError(f"t_f must be > 0, got {t_f}")
    if len(a) < 4:
        raise ValueError("need at least 4 samples")
    m = len(a) - 1
    dt = t_f / m
    t = np.arange(m) * dt
    amps = sfft.rfft(hann_window(t, t_f) * a[:-1]) * dt
    intensity = np.abs(amps) ** 2
    omega = 2.0 * np.pi * np.arange(len(intensity)) / t_f
    return SpectrumRecord(omega, intensity, omega0=omega0)


def smooth_average(spectrum: SpectrumRecord, delta_omega: float) -> SpectrumRecord:
    """Boxcar mean of the intensity over [omega - dw, omega + dw], edge-truncated.

    Returns a new record with the smoothed column filled; the conventional
    averaging width is 2*delta_omega = 4*omega0.
    """
    dom = spectrum.omega[1] - spectrum.omega[0]
    if delta_omega < dom:
        raise ValueError(f"delta_omega = {delta_omega} below grid spacing {dom}")
    half = int(round(delta_omega / dom))
    n = len(spectrum.intensity)
    csum = np.concatenate([[0.0], np.cumsum(spectrum.intensity)])
    idx = np.arange(n)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half, n - 1)
    smoothed = (csum[hi + 1] - csum[lo]) / (hi - lo + 1)
    return SpectrumRecord(spectrum.omega.copy(), spectrum.intensity.copy(),
                          smoothed, spectrum.omega0)


def _segment_design(x: np.ndarray, omega_a: float, omega_b: float):
    u = np.clip((x - omega_a) / (omega_b - omega_a), 0.0, 1.0)
    return 1.0 - u, u     # basis functions multiplying A and B


def _fit_ab(x: np.ndarray, y: np.ndarray, omega_a: float, omega_b: float):
    """Closed-form optimal (A, B) and the residual for fixed breakpoints."""
    pa, pb = _segment_design(x, omega_a, omega_b)
    m11 = pa @ pa
    m12 = pa @ pb
    m22 = pb @ pb
    det = m11 * m22 - m12 * m12
    if det <= 1e-300:
        return math.inf, 0.0, 0.0
    b1 = pa @ y
    b2 = pb @ y
    a = (m22 * b1 - m12 * b2) / det
    b = (m11 * b2 - m12 * b1) / det
    r = y - (a * pa + b * pb)
    return float(r @ r), float(a), float(b)


def fit_cutoff(omega: np.ndarray, intensity: np.ndarray, fit_range=None,
               omega0: float = None) -> CutoffFit:
    """Least-squares three-segment fit of ln(intensity) over the fit range.

    Deterministic: a coarse grid search over breakpoint pairs (with the levels
    solved in closed form) followed by Nelder-Mead refinement. The default fit
    range is [5*omega0, 0.9*omega_max] to exclude the fundamental and the
    window roll-off. A fit whose optimum has no plateau room or inverted
    levels is returned flagged, not hidden.
    """
    omega = np.asarray(omega, dtype=float)
    intensity = np.asarray(intensity, dtype=float)
    if fit_range is None:
        if omega0 is None:
            raise ValueError("need fit_range or omega0 for the default range")
        fit_range = (5.0 * omega0, 0.9 * omega[-1])
    lo, hi = fit_range
    mask = (omega >= lo) & (omega <= hi)
    x = omega[mask]
    if len(x) < 8:
        raise ValueError(f"fit range [{lo}, {hi}] covers only {len(x)} points")
    if np.any(intensity[mask] <= 0.0):
        raise ValueError("non-positive intensity inside the fit range")
    y = np.log(intensity[mask])

    stride = max(1, len(x) // 96)
    cand = x[::stride]
    best = (math.inf, cand[0], cand[-1], 0.0, 0.0)
    for i in range(len(cand) - 2):
        for j in range(i + 2, len(cand)):
            sse, a, b = _fit_ab(x, y, cand[i], cand[j])
            if sse < best[0]:
                best = (sse, cand[i], cand[j], a, b)

    def objective(p):
        wa, wb = p
        if not (x[0] <= wa < wb <= x[-1]):
            return best[0] * 10.0 + abs(wa) + abs(wb)
        return _fit_ab(x, y, wa, wb)[0]

    res = minimize(objective, [best[1], best[2]], method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 4000})
    wa, wb = res.x
    if wa > wb:
        wa, wb = wb, wa
    sse, a, b = _fit_ab(x, y, wa, wb)
    if sse > best[0]:
        sse, wa, wb, a, b = best

    grid_step = x[1] - x[0]
    degenerate = (wb - wa) < grid_step or a <= b or (wa - x[0]) < grid_step
    return CutoffFit(a, b, float(wa), float(wb), float(sse), bool(degenerate))


def spectrum_from_trajectory(traj: TrajectoryRecord, t_f: float = None,
                             omega0: float = None,
                             delta_omega: float = None) -> SpectrumRecord:
    """Trajectory -> acceleration -> windowed spectrum (+ smoothing if requested)."""
    acc = acceleration_from_trajectory(traj)
    t_f = traj.t[-1] if t_f is None else t_f
    spec = hhg_spectrum(acc, t_f, omega0=omega0)
    if delta_omega is None and omega0 is not None:
        delta_omega = 2.0 * omega0
    if delta_omega is not None:
        spec = smooth_average(spec, delta_omega)
    return spec


@dataclass
class PhasePortrait:
    """Paired (<z>/N, <x_c>/N) curve and its principal-axis angle."""

    z: np.ndarray
    xc: np.ndarray
    angle: float
    isotropic: bool     # covariance has no preferred axis; angle is unreliable


def phase_portrait(traj: TrajectoryRecord, isotropy_tol: float = 1e-6) -> PhasePortrait:
    """Principal-axis angle of the (z, x_c) covariance; grid runs only.

    The angle is measured from the z axis; a circular portrait (isotropic
    covariance) is flagged rather than silently assigned an angle.
    """
    if traj.z is None or traj.xc is None:
        raise ValueError("phase portrait needs both <z> and <x_c> series (grid runs)")
    z = traj.z - traj.z.mean()
    xc = traj.xc - traj.xc.mean()
    czz = float(z @ z)
    cxx = float(xc @ xc)
    czx = float(z @ xc)
    aniso = math.hypot(czz - cxx, 2.0 * czx)
    trace = czz + cxx
    isotropic = trace > 0.0 and aniso < isotropy_tol * trace
    angle = 0.5 * math.atan2(2.0 * czx, czz - cxx) if not isotropic else float("nan")
    return PhasePortrait(traj.z.copy(), traj.xc.copy(), angle, isotropic)
