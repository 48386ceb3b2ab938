"""The six figure kinds, rendered deterministically (Agg, fixed geometry)."""

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spec import FigureSpec
from .tsv import InputError, Table, read_cutoff

FIGSIZE = (6.4, 4.2)
DPI = 150

plt.rcParams.update({
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": DPI,
})


def _new_axes(spec, **kwargs):
    fig, ax = plt.subplots(figsize=FIGSIZE, **kwargs)
    if spec.title:
        ax.set_title(spec.title)
    return fig, ax


def _finish(fig, ax, spec):
    if spec.xlim and ax is not None:
        ax.set_xlim(*spec.xlim)
    if spec.ylim and ax is not None:
        ax.set_ylim(*spec.ylim)
    fig.tight_layout()
    fig.savefig(spec.out, metadata={"Software": "plotkit"})
    plt.close(fig)
    return spec.out


def plot_spectrum(spec: FigureSpec):
    table = Table(spec.inputs["spectrum"])
    omega = table.column("omega")
    intensity = table.column("smoothed") if table.has("smoothed") \
        else table.column("intensity")
    omega0 = spec.omega0 or (float(table.meta["omega0"])
                             if "omega0" in table.meta else None)
    if omega0 is None:
        raise InputError(f"{table.path}: no omega0 in meta and none given")

    positive = intensity > 0.0
    fig, ax = _new_axes(spec)
    ax.plot(omega[positive] / omega0, np.log(intensity[positive]),
            lw=0.9, color="#1f4e8c")
    if "fit" in spec.inputs:
        fit = read_cutoff(spec.inputs["fit"])
        for name, style in (("omega_a", ":"), ("omega_b", ":"), ("omega_cut", "--")):
            ax.axvline(fit[name] / omega0, color="#b03030", ls=style, lw=1.0)
        ax.axhline(fit["plateau"], color="#777777", ls=":", lw=0.8)
        ax.axhline(fit["noise"], color="#777777", ls=":", lw=0.8)
    ax.set_xlabel("harmonic order $\\omega/\\omega_0$")
    ax.set_ylabel("ln I($\\omega$)  [arb]")
    return _finish(fig, ax, spec)


def plot_trajectory(spec: FigureSpec):
    table = Table(spec.inputs["trajectory"])
    t = table.column("t")
    fig, ax = _new_axes(spec)
    if table.has("z"):
        ax.plot(t, table.column("z"), lw=0.9, color="#1f4e8c",
                label="$\\langle z\\rangle/N$")
    ax.plot(t, table.column("mu_z"), lw=0.9, color="#d08020", label="$\\mu_z$")
    if table.has("xc"):
        ax.plot(t, table.column("xc"), lw=0.9, color="#3a8c3a",
                label="$\\langle x_c\\rangle/N$")
    ax.set_xlabel("t  [$\\hbar/E_h$]")
    ax.set_ylabel("amplitude  [a.u.]")
    ax.legend(loc="upper right", fontsize=8)
    return _finish(fig, ax, spec)


def plot_photon(spec: FigureSpec):
    table = Table(spec.inputs["trajectory"])
    fig, ax = _new_axes(spec)
    ax.plot(table.column("t"), table.column("n_c"), lw=1.0, color="#6a3d9a")
    ax.set_xlabel("t  [$\\hbar/E_h$]")
    ax.set_ylabel("$\\langle n_c \\rangle$")
    return _finish(fig, ax, spec)


ENERGY_COLUMNS = (("e_e", "#1f4e8c", "$E^e$"), ("e_c", "#3a8c3a", "$E^c$"),
                  ("e_int", "#d08020", "$E^{int}$"), ("e_dse", "#b03030", "$E^{dse}$"),
                  ("e_tot", "#222222", "$E^{tot}$"))


def plot_energy(spec: FigureSpec):
    """Energy decomposition; prints the closure residual of the stored columns."""
    table = Table(spec.inputs["trajectory"])
    t = table.column("t")
    parts = {name: table.column(name) for name, _, _ in ENERGY_COLUMNS}
    residual = np.abs(parts["e_tot"] - (parts["e_e"] + parts["e_c"]
                                        + parts["e_int"] + parts["e_dse"])).max()
    print(f"energy-closure residual max |E_tot - sum| = {residual:.3e}")

    fig, ax = _new_axes(spec)
    for name, color, label in ENERGY_COLUMNS:
        ax.plot(t, parts[name], lw=1.0, color=color, label=label,
                ls="-" if name != "e_tot" else "--")
    ax.set_xlabel("t  [$\\hbar/E_h$]")
    ax.set_ylabel("energy  [$E_h$]")
    ax.legend(loc="upper left", fontsize=8, ncol=2)
    return _finish(fig, ax, spec)


def plot_portrait(spec: FigureSpec):
    table = Table(spec.inputs["trajectory"])
    t = table.column("t")
    z = table.column("z")
    xc = table.column("xc")
    fig = plt.figure(figsize=(8.0, 4.0))
    ax2d = fig.add_subplot(1, 2, 1)
    ax2d.plot(z, xc, lw=0.7, color="#1f4e8c")
    ax2d.set_xlabel("$\\langle z\\rangle/N$  [$a_0$]")
    ax2d.set_ylabel("$\\langle x_c\\rangle/N$  [a.u.]")
    ax3d = fig.add_subplot(1, 2, 2, projection="3d")
    ax3d.plot(z, xc, t, lw=0.7, color="#b03030")
    ax3d.set_xlabel("$\\langle z\\rangle/N$")
    ax3d.set_ylabel("$\\langle x_c\\rangle/N$")
    ax3d.set_zlabel("t")
    if spec.title:
        fig.suptitle(spec.title)
    if spec.xlim:
        ax2d.set_xlim(*spec.xlim)
    if spec.ylim:
        ax2d.set_ylim(*spec.ylim)
    fig.tight_layout()
    fig.savefig(spec.out, metadata={"Software": "plotkit"})
    plt.close(fig)
    return spec.out


def _zero_order_color(i, n, n_electronic, n_photon):
    """Electronic excitation sets the hue, photonic excitation whitens it."""
    hue_map = plt.get_cmap("turbo")
    base = np.array(hue_map(0.1 + 0.8 * (i / max(1, n_electronic - 1)))[:3])
    fade = 0.75 * (n / max(1, n_photon - 1)) if n_photon > 1 else 0.0
    return tuple((1.0 - fade) * base + fade * np.ones(3))


def plot_decomposition(spec: FigureSpec):
    """Stacked bars: zero-order weights |D|^2 of the lowest eigenstates."""
    table = Table(spec.inputs["basis"])
    p = table.column("p").astype(int)
    energy = table.column("energy")
    i_idx = table.column("i").astype(int)
    n_idx = table.column("n").astype(int)
    weight = table.column("weight")
    n_electronic = int(table.meta.get("n_states", i_idx.max() + 1))
    n_photon = int(table.meta.get("n_photon", n_idx.max() + 1))

    states = sorted(set(p))[:spec.max_states]
    fig, ax = _new_axes(spec)
    labeled = set()
    for pos, state in enumerate(states):
        rows = np.where(p == state)[0]
        bottom = 0.0
        for r in rows[np.argsort(-weight[rows])]:
            color = _zero_order_color(i_idx[r], n_idx[r], n_electronic, n_photon)
            key = (i_idx[r], n_idx[r])
            label = None
            if weight[r] > 0.25 and key not in labeled:
                label = f"$|{i_idx[r]},{n_idx[r]}\\rangle$"
                labeled.add(key)
            ax.bar(pos, weight[r], bottom=bottom, width=0.8, color=color,
                   edgecolor="white", linewidth=0.4, label=label)
            bottom += weight[r]
        ax.text(pos, 1.02, f"{energy[rows[0]]:.3f}", ha="center", fontsize=6,
                rotation=90)
    ax.set_xticks(range(len(states)))
    ax.set_xticklabels([str(s) for s in states])
    ax.set_xlabel("eigenstate p")
    ax.set_ylabel("zero-order weight $|D_{p,in}|^2$")
    ax.set_ylim(0.0, 1.18)
    if labeled:
        ax.legend(loc="upper right", fontsize=7, ncol=2)
    return _finish(fig, ax, spec)


RENDERERS = {
    "spectrum": plot_spectrum,
    "trajectory": plot_trajectory,
    "photon": plot_photon,
    "energy": plot_energy,
    "portrait": plot_portrait,
    "decomposition": plot_decomposition,
}


def render(spec: FigureSpec) -> str:
    """Render one figure spec to its output image; returns the path."""
    return RENDERERS[spec.kind](spec)
