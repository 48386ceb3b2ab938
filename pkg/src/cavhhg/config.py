"""Run configuration: flat key-value text files with dotted section keys.

The schema is strict: unknown keys are rejected, every physical key documents
its unit, and validation reports all problems at once rather than stopping at
the first.
"""

from dataclasses import dataclass, field

from .errors import ConfigError
from .grid import CapSpec, GridSpec, SoftCoreModel, cavity_grid_parameters
from .model import CavitySpec, PulseSpec

MODES = ("grid", "basis", "spectrum", "fit", "sweep")


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_vector(text: str):
    parts = [float(v) for v in text.split()]
    if len(parts) != 3:
        raise ValueError(f"expected three components, got {len(parts)}")
    return tuple(parts)


def _parse_float_list(text: str):
    return [float(v) for v in text.replace(",", " ").split()]


def _parse_int_list(text: str):
    return [int(v) for v in text.replace(",", " ").split()]


# key -> (parser, unit, help). Defaults live in RunConfig so a config echoes
# exactly what will run.
SCHEMA = {
    "mode": (str, "-", "grid | basis | spectrum | fit | sweep"),
    "pulse.f0": (float, "Eh/(e*a0)", "peak field amplitude"),
    "pulse.omega0": (float, "Eh/hbar", "carrier angular frequency"),
    "pulse.n_cycles": (int, "1", "carrier cycles under the cos^2 envelope"),
    "pulse.polarization": (_parse_vector, "1", "field unit vector, three floats"),
    "cavity.omega_c": (float, "Eh/hbar", "cavity angular frequency"),
    "cavity.g_c": (float, "Eh/(e*a0)", "light-matter coupling constant"),
    "cavity.polarization": (_parse_vector, "1", "cavity unit vector, three floats"),
    "grid.n_z": (int, "1", "electron grid points (power of two)"),
    "grid.z_max": (float, "a0", "electron grid half-extent"),
    "grid.n_xc": (int, "1", "cavity grid points (power of two)"),
    "grid.xc_max": (float, "a0", "cavity grid half-extent"),
    "model.charge": (float, "e", "effective nuclear charge"),
    "model.eta": (float, "a0", "soft-core screening parameter"),
    "model.center": (float, "a0", "nuclear position"),
    "cap.electron_onset": (float, "a0", "electron CAP onset |z| >= s"),
    "cap.electron_strength": (float, "Eh/a0^2", "electron CAP quadratic strength"),
    "cap.cavity_onset": (float, "a0", "cavity CAP onset |x_c| >= W_s"),
    "cap.cavity_strength": (float, "Eh/a0", "cavity CAP linear strength"),
    "numerics.dt": (float, "hbar/Eh", "propagation time step"),
    "numerics.sample_stride": (int, "1", "steps between observable samples"),
    "numerics.n_photon": (int, "1", "photon states in the polaritonic basis"),
    "numerics.imag_dtau": (float, "hbar/Eh", "imaginary-time step (default: auto)"),
    "numerics.imag_tol": (float, "Eh", "imaginary-time energy tolerance"),
    "electronic.path": (str, "-", "electronic data file for basis runs"),
    "ionization.enabled": (_parse_bool, "-", "apply complex-energy losses in basis runs"),
    "ionization.escape_length": (float, "a0", "escape length d of the rate model"),
    "initial_state": (int, "1", "initial eigenstate index (basis runs)"),
    "output.dir": (str, "-", "output directory"),
    "spectrum.input": (str, "-", "trajectory file for spectrum mode"),
    "fit.input": (str, "-", "spectrum file for fit mode"),
    "fit.range_min": (float, "Eh/hbar", "cutoff-fit lower bound"),
    "fit.range_max": (float, "Eh/hbar", "cutoff-fit upper bound"),
    "smooth.delta_omega": (float, "Eh/hbar", "boxcar half-width (default 2*omega0)"),
    "sweep.omega_c": (_parse_float_list, "Eh/hbar", "cavity frequencies to sweep"),
    "sweep.g_c": (_parse_float_list, "Eh/(e*a0)", "coupling constants to sweep"),
    "sweep.n_photon": (_parse_int_list, "1", "photon-state counts to sweep"),
}


@dataclass
class RunConfig:
    """Validated configuration; derived spec objects are built on demand."""

    mode: str
    values: dict = field(default_factory=dict)
    path: str = None

    def get(self, key, default=None):
        return self.values.get(key, default)

    def require(self, key):
        if key not in self.values:
            raise ConfigError([f"missing required key {key!r} for mode {self.mode!r}"])
        return self.values[key]

    def pulse(self) -> PulseSpec:
        return PulseSpec(
            f0=self.require("pulse.f0"),
            omega0=self.require("pulse.omega0"),
            n_cycles=self.require("pulse.n_cycles"),
            polarization=self.get("pulse.polarization", (0.0, 0.0, 1.0)),
        )

    def cavity(self) -> CavitySpec:
        return CavitySpec(
            omega_c=self.require("cavity.omega_c"),
            g_c=self.require("cavity.g_c"),
            polarization=self.get("cavity.polarization", (0.0, 0.0, 1.0)),
        )

    def soft_core(self) -> SoftCoreModel:
        return SoftCoreModel(
            charge=self.get("model.charge", 1.0),
            eta=self.get("model.eta", 0.9871),
            center=self.get("model.center", 0.0),
        )

    def grid(self) -> GridSpec:
        n_xc = self.get("grid.n_xc")
        xc_max = self.get("grid.xc_max")
        if n_xc is None or xc_max is None:
            table = cavity_grid_parameters(self.require("cavity.omega_c"))
            n_xc = table[0] if n_xc is None else n_xc
            xc_max = table[1] if xc_max is None else xc_max
        return GridSpec(
            n_z=self.get("grid.n_z", 512),
            z_max=self.get("grid.z_max", 100.0),
            n_xc=n_xc,
            xc_max=xc_max,
        )

    def caps(self, grid: GridSpec) -> CapSpec:
        w_s = self.get("cap.cavity_onset")
        a_w = self.get("cap.cavity_strength")
        if w_s is None or a_w is None:
            table = cavity_grid_parameters(self.require("cavity.omega_c"))
            w_s = table[2] if w_s is None else w_s
            a_w = table[3] if a_w is None else a_w
        return CapSpec(
            electron_onset=self.get("cap.electron_onset", 0.67 * grid.z_max),
            electron_strength=self.get("cap.electron_strength", 1.0135e-4),
            cavity_onset=w_s,
            cavity_strength=a_w,
        )

    def dt(self) -> float:
        return self.get("numerics.dt", 0.001 if self.mode == "grid" else 0.02)

    def sample_stride(self) -> int:
        return self.get("numerics.sample_stride", 20 if self.mode == "grid" else 5)


_MODE_REQUIRED = {
    "grid": ["pulse.f0", "pulse.omega0", "pulse.n_cycles", "cavity.omega_c", "cavity.g_c"],
    "basis": ["pulse.f0", "pulse.omega0", "pulse.n_cycles", "cavity.omega_c",
              "cavity.g_c", "electronic.path", "numerics.n_photon"],
    "spectrum": ["spectrum.input", "pulse.omega0"],
    "fit": ["fit.input"],
    "sweep": [],
}


def parse_config_text(text: str, path: str = "<config>") -> RunConfig:
    """Parse and fully validate; raises ConfigError carrying every problem found."""
    problems = []
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA:
            problems.append(f"{path}:{lineno}: unknown key {key!r}")
            continue
        if key in values:
            problems.append(f"{path}:{lineno}: duplicate key {key!r}")
            continue
        parser, unit, _ = SCHEMA[key]
        try:
            values[key] = parser(value)
        except ValueError as exc:
            problems.append(f"{path}:{lineno}: bad value for {key!r} ({unit}): {exc}")

    mode = values.get("mode")
    if mode is None:
        problems.append(f"{path}: missing required key 'mode'")
    elif mode not in MODES:
        problems.append(f"{path}: mode must be one of {MODES}, got {mode!r}")
    else:
        for key in _MODE_REQUIRED[mode]:
            if key not in values:
                problems.append(f"{path}: mode {mode!r} requires key {key!r}")
        if mode == "sweep" and not any(k.startswith("sweep.") for k in values):
            problems.append(f"{path}: sweep mode needs at least one sweep.* axis")
        if values.get("ionization.enabled") and "ionization.escape_length" not in values:
            problems.append(
                f"{path}: 'ionization.enabled' requires 'ionization.escape_length' "
                "(no default escape length exists)")

    # physical sanity that does not need the derived spec objects
    for key in ("pulse.omega0", "cavity.omega_c", "numerics.dt", "model.eta",
                "ionization.escape_length"):
        if key in values and values[key] <= 0:
            problems.append(f"{path}: {key} must be > 0, got {values[key]}")
    if values.get("pulse.f0", 0.0) < 0:
        problems.append(f"{path}: pulse.f0 must be >= 0")

    if problems:
        raise ConfigError(problems)
    return RunConfig(mode, values, path)


def parse_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), str(path))


def schema_documentation() -> str:
    """Human-readable key/unit/help table (the authoritative schema listing)."""
    width = max(len(k) for k in SCHEMA)
    lines = [f"{key.ljust(width)}  [{unit}]  {help_}"
             for key, (_, unit, help_) in SCHEMA.items()]
    return "\n".join(lines)
