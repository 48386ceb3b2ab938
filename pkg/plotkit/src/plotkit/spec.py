"""Figure specifications: flat key = value files, strictly validated."""

from dataclasses import dataclass, field

from .tsv import InputError

KINDS = ("spectrum", "trajectory", "photon", "energy", "portrait", "decomposition")

# kind -> required input keys
REQUIRED_INPUTS = {
    "spectrum": ("input.spectrum",),
    "trajectory": ("input.trajectory",),
    "photon": ("input.trajectory",),
    "energy": ("input.trajectory",),
    "portrait": ("input.trajectory",),
    "decomposition": ("input.basis",),
}

KNOWN_KEYS = {
    "kind", "out", "title",
    "input.spectrum", "input.fit", "input.trajectory", "input.basis",
    "axes.xlim", "axes.ylim", "max_states", "omega0",
}


@dataclass
class FigureSpec:
    kind: str
    out: str
    inputs: dict = field(default_factory=dict)
    xlim: tuple = None
    ylim: tuple = None
    title: str = None
    max_states: int = 12     # decomposition bars
    omega0: float = None     # spectrum harmonic axis override


def _parse_pair(text):
    parts = [float(v) for v in text.split()]
    if len(parts) != 2:
        raise ValueError(f"expected two numbers, got {text!r}")
    return tuple(parts)


def parse_figure_spec_text(text, path="<spec>"):
    values = {}
    problems = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"{path}:{lineno}: expected 'key = value'")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            problems.append(f"{path}:{lineno}: unknown key {key!r}")
            continue
        values[key] = value

    kind = values.get("kind")
    if kind not in KINDS:
        problems.append(f"{path}: kind must be one of {KINDS}, got {kind!r}")
    else:
        for req in REQUIRED_INPUTS[kind]:
            if req not in values:
                problems.append(f"{path}: kind {kind!r} requires {req!r}")
    if "out" not in values:
        problems.append(f"{path}: missing required key 'out'")
    if problems:
        raise InputError("; ".join(problems))

    spec = FigureSpec(kind=kind, out=values["out"], title=values.get("title"))
    spec.inputs = {k.split(".", 1)[1]: v for k, v in values.items()
                   if k.startswith("input.")}
    try:
        if "axes.xlim" in values:
            spec.xlim = _parse_pair(values["axes.xlim"])
        if "axes.ylim" in values:
            spec.ylim = _parse_pair(values["axes.ylim"])
        if "max_states" in values:
            spec.max_states = int(values["max_states"])
        if "omega0" in values:
            spec.omega0 = float(values["omega0"])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return spec


def parse_figure_spec(path):
    with open(path, encoding="utf-8") as fh:
        return parse_figure_spec_text(fh.read(), str(path))
