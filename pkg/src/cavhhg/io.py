"""Columnar text I/O: trajectories, spectra, cutoff fits, electronic data.

All floats are written as shortest round-trip decimals (Python repr), so a
write-read cycle is bit-exact and reruns with identical inputs produce
byte-identical files.
"""

import numpy as np

from .errors import DataFormatError
from .hhg import CutoffFit, SpectrumRecord
from .polariton import CisDetail, ElectronicData, ionization_rates_cis
from .records import SCALAR_COLUMNS, TrajectoryRecord


def _fmt(x) -> str:
    return repr(float(x))


def _write_meta(fh, meta: dict):
    for key in sorted(meta):
        fh.write(f"# meta {key} {meta[key]}\n")


def _read_header(lines):
    """Collect '# ...' header lines; returns (meta dict, columns, first data index)."""
    meta, columns = {}, None
    idx = 0
    for idx, line in enumerate(lines):
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if body.startswith("meta "):
            _, key, value = body.split(None, 2)
            meta[key] = value
        elif body.startswith("columns:"):
            columns = body.split(":", 1)[1].split()
    else:
        idx = len(lines)
    return meta, columns, idx


COLUMN_UNITS = {
    "t": "hbar/Eh", "mu_z": "e*a0", "norm": "1", "n_c": "1",
    "e_e": "Eh", "e_c": "Eh", "e_int": "Eh", "e_dse": "Eh", "e_tot": "Eh",
    "z": "a0", "xc": "a0(mass-weighted)",
}


def write_trajectory(traj: TrajectoryRecord, path) -> None:
    """TSV with '#' header naming columns and units; populations last."""
    cols = traj.columns()
    npop = traj.populations.shape[1] if traj.populations is not None else 0
    names = cols + [f"pop_{i:03d}" for i in range(npop)]
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# cavhhg trajectory v1\n")
        _write_meta(fh, traj.meta)
        fh.write("# units: " + " ".join(f"{c}={COLUMN_UNITS[c]}" for c in cols) + "\n")
        fh.write("# columns: " + " ".join(names) + "\n")
        for k in range(traj.n_samples):
            row = [_fmt(getattr(traj, c)[k]) for c in cols]
            if npop:
                row.extend(_fmt(v) for v in traj.populations[k])
            fh.write("\t".join(row) + "\n")


def read_trajectory(path) -> TrajectoryRecord:
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    meta, names, start = _read_header(lines)
    if names is None:
        raise DataFormatError(f"{path}: missing '# columns:' header")
    rows = [line.split("\t") for line in lines[start:] if line]
    data = np.array([[float(v) for v in row] for row in rows], dtype=float) \
        if rows else np.empty((0, len(names)))
    if rows and data.shape[1] != len(names):
        raise DataFormatError(f"{path}: {data.shape[1]} columns, header names {len(names)}")
    scalar = [n for n in names if not n.startswith("pop_")]
    unknown = set(scalar) - set(SCALAR_COLUMNS)
    if unknown:
        raise DataFormatError(f"{path}: unknown columns {sorted(unknown)}")
    kwargs = {n: data[:, names.index(n)] for n in scalar}
    npop = len(names) - len(scalar)
    pops = data[:, len(scalar):] if npop else None
    for required in ("t", "mu_z", "norm"):
        if required not in kwargs:
            raise DataFormatError(f"{path}: required column {required!r} missing")
    return TrajectoryRecord(populations=pops, meta=meta, **kwargs)


def write_spectrum(spec: SpectrumRecord, path) -> None:
    cols = ["omega", "intensity"] + (["smoothed"] if spec.smoothed is not None else [])
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# cavhhg spectrum v1\n")
        if spec.omega0 is not None:
            fh.write(f"# meta omega0 {_fmt(spec.omega0)}\n")
        fh.write("# units: omega=Eh/hbar intensity=arb\n")
        fh.write("# columns: " + " ".join(cols) + "\n")
        for k in range(len(spec.omega)):
            row = [_fmt(spec.omega[k]), _fmt(spec.intensity[k])]
            if spec.smoothed is not None:
                row.append(_fmt(spec.smoothed[k]))
            fh.write("\t".join(row) + "\n")


def read_spectrum(path) -> SpectrumRecord:
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    meta, names, start = _read_header(lines)
    rows = [line.split("\t") for line in lines[start:] if line]
    data = np.array([[float(v) for v in row] for row in rows], dtype=float)
    omega0 = float(meta["omega0"]) if "omega0" in meta else None
    smoothed = data[:, names.index("smoothed")] if "smoothed" in names else None
    return SpectrumRecord(data[:, names.index("omega")],
                          data[:, names.index("intensity")], smoothed, omega0)


def write_cutoff(fit: CutoffFit, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# cavhhg cutoff-fit v1\n")
        fh.write("# columns: plateau noise omega_a omega_b omega_cut residual degenerate\n")
        fh.write("\t".join([
            _fmt(fit.plateau), _fmt(fit.noise), _fmt(fit.omega_a), _fmt(fit.omega_b),
            _fmt(fit.omega_cut), _fmt(fit.residual), str(int(fit.degenerate)),
        ]) + "\n")


def read_cutoff(path) -> CutoffFit:
    with open(path, encoding="ascii") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln and not ln.startswith("#")]
    if len(lines) != 1:
        raise DataFormatError(f"{path}: expected one cutoff row, found {len(lines)}")
    vals = lines[0].split("\t")
    return CutoffFit(float(vals[0]), float(vals[1]), float(vals[2]), float(vals[3]),
                     float(vals[5]), bool(int(vals[6])))


# --- electronic data files -------------------------------------------------
#
# Sections:  [meta] n_states/I_p/d,  [energies],  [dipole_x|y|z] dense
# row-major, optional [rates], optional [cis] rows "i a r D eps_r".

_EDATA_SYM_TOL = 1e-8


def write_electronic_data(data: ElectronicData, path, escape_length: float = None) -> None:
    n = data.n_states
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# cavhhg electronic data v1 (atomic units)\n")
        fh.write("[meta]\n")
        fh.write(f"n_states = {n}\n")
        if data.ip is not None:
            fh.write(f"I_p = {_fmt(data.ip)}\n")
        if escape_length is not None:
            fh.write(f"d = {_fmt(escape_length)}\n")
        fh.write("[energies]\n")
        for e in data.energies:
            fh.write(_fmt(e) + "\n")
        for axis in ("x", "y", "z"):
            if axis in data.dipole:
                fh.write(f"[dipole_{axis}]\n")
                for row in data.dipole[axis]:
                    fh.write("\t".join(_fmt(v) for v in row) + "\n")
        if data.rates is not None:
            fh.write("[rates]\n")
            for g in data.rates:
                fh.write(_fmt(g) + "\n")
        if data.cis_detail is not None:
            det = data.cis_detail
            fh.write("[cis]\n")
            for i, a, r, c, eps in zip(det.state, det.occ, det.virt, det.coeff,
                                       det.virt_energy):
                fh.write(f"{int(i)}\t{int(a)}\t{int(r)}\t{_fmt(c)}\t{_fmt(eps)}\n")


def load_electronic_data(path, require_rates: bool = False) -> ElectronicData:
    """Parse and validate an electronic data file.

    When [rates] is absent but [cis] is present, rates are computed with the
    heuristic ionization model (needs I_p and d in [meta]). With
    require_rates=True, a file with neither section is rejected.
    """
    sections = {}
    current = None
    with open(path, encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1]
                sections[current] = []
            elif current is None:
                raise DataFormatError(f"{path}:{lineno}: data before any section")
            else:
                sections[current].append((lineno, line))

    if "meta" not in sections or "energies" not in sections:
        raise DataFormatError(f"{path}: [meta] and [energies] sections are required")

    meta = {}
    for lineno, line in sections["meta"]:
        if "=" not in line:
            raise DataFormatError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        meta[key] = value
    try:
        n = int(meta["n_states"])
    except (KeyError, ValueError) as exc:
        raise DataFormatError(f"{path}: [meta] needs integer n_states") from exc
    ip = float(meta["I_p"]) if "I_p" in meta else None
    escape = float(meta["d"]) if "d" in meta else None

    energies = np.array([float(line) for _, line in sections["energies"]])
    if len(energies) != n:
        raise DataFormatError(f"{path}: {len(energies)} energies for n_states = {n}")

    dipole = {}
    for axis in ("x", "y", "z"):
        name = f"dipole_{axis}"
        if name not in sections:
            continue
        rows = [[float(v) for v in line.split()] for _, line in sections[name]]
        mat = np.array(rows)
        if mat.shape != (n, n):
            raise DataFormatError(f"{path}: [{name}] shape {mat.shape}, expected {(n, n)}")
        if np.max(np.abs(mat - mat.T)) > _EDATA_SYM_TOL:
            raise DataFormatError(f"{path}: [{name}] not symmetric within {_EDATA_SYM_TOL}")
        dipole[axis] = 0.5 * (mat + mat.T)
    if not dipole:
        raise DataFormatError(f"{path}: no dipole section found")

    rates = None
    if "rates" in sections:
        rates = np.array([float(line) for _, line in sections["rates"]])
        if len(rates) != n:
            raise DataFormatError(f"{path}: {len(rates)} rates for n_states = {n}")

    detail = None
    if "cis" in sections and sections["cis"]:
        rows = [line.split() for _, line in sections["cis"]]
        if any(len(r) != 5 for r in rows):
            raise DataFormatError(f"{path}: [cis] rows must be 'i a r D eps_r'")
        if ip is None:
            raise DataFormatError(f"{path}: [cis] present but I_p missing from [meta]")
        arr = np.array([[float(v) for v in r] for r in rows])
        detail = CisDetail(arr[:, 0].astype(int), arr[:, 1].astype(int),
                           arr[:, 2].astype(int), arr[:, 3], arr[:, 4], ip)
        if np.any(detail.state >= n):
            raise DataFormatError(f"{path}: [cis] state index out of range")

    if rates is None and detail is not None:
        if escape is None:
            raise DataFormatError(f"{path}: [cis] without [rates] needs d in [meta]")
        rates = ionization_rates_cis(energies, detail, escape)
    if require_rates and rates is None:
        raise DataFormatError(
            f"{path}: ionization enabled but neither [rates] nor [cis] present")

    try:
        return ElectronicData(energies, dipole, rates, detail, ip)
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def write_basis_summary(basis, path, top_k: int = 6) -> None:
    """Columnar eigenstate report: one row per leading zero-order contribution."""
    from .polariton import zero_order_decomposition

    with open(path, "w", encoding="ascii") as fh:
        fh.write("# cavhhg basis summary v1\n")
        fh.write(f"# meta n_states {basis.n_states}\n")
        fh.write(f"# meta n_photon {basis.n_photon}\n")
        fh.write(f"# meta omega_c {_fmt(basis.cavity.omega_c)}\n")
        fh.write(f"# meta g_c {_fmt(basis.cavity.g_c)}\n")
        fh.write("# columns: p energy gamma i n weight\n")
        for p in range(basis.dim):
            gamma = basis.gamma_p[p] if basis.gamma_p is not None else 0.0
            for i, nph, w in zero_order_decomposition(basis, p)[:top_k]:
                fh.write("\t".join([str(p), _fmt(basis.energies[p]), _fmt(gamma),
                                    str(i), str(nph), _fmt(w)]) + "\n")
