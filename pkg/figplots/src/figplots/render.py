"""Figure rendering for the five table families of the simulator.

Rendering is read-only over the inputs and deterministic: for a fixed
CSV the SVG text output is byte-identical between runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .csvio import EmptyData, MissingColumn, Table, read_tables  # noqa: E402

KINDS = ("populations", "pump_curve", "spectrum", "efficiency", "bandwidth")

# stable ids inside the SVG output
matplotlib.rcParams["svg.hashsalt"] = "figplots"


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    log_time: bool = False       # early-time view for population plots
    dpi: int = 150

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind '{self.kind}'; "
                             f"expected one of {', '.join(KINDS)}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def _axis_label(name: str, unit: str) -> str:
    return f"{name} [{unit}]" if unit and unit not in ("name", "flag",
                                                       "dimensionless",
                                                       "normalized") else name


def _save(fig, spec: PlotSpec):
    fig.savefig(spec.output, dpi=spec.dpi, metadata={"Date": None}
                if spec.output.endswith(".svg") else None)
    plt.close(fig)


def _plot_populations(table: Table, spec: PlotSpec, ax):
    table.require("series", "time", "rho_aa", "rho_bb", "rho_cc")
    series = table.column("series")
    styles = (("rho_aa", "r:", "excited"),
              ("rho_bb", "k-", "ground"),
              ("rho_cc", "b--", "metastable"))
    names = list(dict.fromkeys(series.tolist()))
    for i, name in enumerate(names):
        sel = series == name
        suffix = f" ({name})" if len(names) > 1 else ""
        for col, style, label in styles:
            ax.plot(table.column("time")[sel], table.column(col)[sel],
                    style, alpha=1.0 - 0.45 * i, label=label + suffix)
    if spec.log_time:
        ax.set_xscale("log")
        ax.set_xlim(left=max(table.column("time").min(), 1e-2))
    ax.set_xlabel(_axis_label("time", table.unit("time")))
    ax.set_ylabel("population")


def _plot_pump_curve(table: Table, spec: PlotSpec, ax):
    table.require("power_mW", "pumping_efficiency", "stretched")
    flag = table.column("stretched")
    for value, style, label in ((1.0, "k-o", "stretched"),
                                (0.0, "b--s", "unstretched")):
        sel = flag == value
        if not sel.any():
            continue
        ax.plot(table.column("power_mW")[sel],
                table.column("pumping_efficiency")[sel], style,
                markersize=4, label=label)
    powers = table.column("power_mW")
    if (powers == 100.0).any():
        sel = (powers == 100.0) & (flag == 1.0)
        if sel.any():
            ax.plot(100.0, table.column("pumping_efficiency")[sel][0],
                    "r*", markersize=12, label="100 mW")
    ax.set_xlabel(_axis_label("power_mW", table.unit("power_mW")))
    ax.set_ylabel("pumping efficiency")
    ax.set_ylim(0.0, 1.05)


def _plot_spectrum(table: Table, spec: PlotSpec, ax):
    table.require("detuning_MHz", "response", "power_mW")
    powers = table.column("power_mW")
    for p in sorted(set(powers.tolist())):
        sel = powers == p
        ax.plot(table.column("detuning_MHz")[sel],
                table.column("response")[sel], label=f"{p:g} mW")
    ax.set_xlabel(_axis_label("detuning_MHz", table.unit("detuning_MHz")))
    ax.set_ylabel("response"
                  + (" (normalized)"
                     if table.unit("response") == "normalized" else ""))


def _plot_efficiency(table: Table, spec: PlotSpec, ax):
    table.require("absorbed_per_atom", "detected_per_atom", "probe_setting")
    setting = table.column("probe_setting")
    for name, style, label in (("high", "k-s", "probe above saturation"),
                               ("low", "b:^", "probe below saturation")):
        sel = setting == name
        if not sel.any():
            continue
        order = table.column("absorbed_per_atom")[sel].argsort()
        ax.plot(table.column("absorbed_per_atom")[sel][order],
                table.column("detected_per_atom")[sel][order], style,
                markersize=4, label=label)
    lim = float(table.column("absorbed_per_atom").max())
    ax.plot([0.0, lim], [0.0, lim], "r--", label="unit efficiency")
    ax.set_xlabel("absorbed input photons per atom")
    ax.set_ylabel("detected output photons per atom")


def _plot_bandwidth(table: Table, spec: PlotSpec, ax):
    table.require("power_mW", "fwhm_MHz", "tau_input_us")
    taus = table.column("tau_input_us")
    markers = ("k-s", "b:^", "g--o")
    for i, tau in enumerate(sorted(set(taus.tolist()))):
        sel = taus == tau
        order = table.column("power_mW")[sel].argsort()
        ax.plot(table.column("power_mW")[sel][order],
                table.column("fwhm_MHz")[sel][order],
                markers[i % len(markers)], markersize=4,
                label=f"transit {tau:g} us")
    ax.set_xscale("log")
    ax.set_xlabel(_axis_label("power_mW", table.unit("power_mW")))
    ax.set_ylabel("transduction bandwidth FWHM [MHz]")


_RENDERERS = {
    "populations": _plot_populations,
    "pump_curve": _plot_pump_curve,
    "spectrum": _plot_spectrum,
    "efficiency": _plot_efficiency,
    "bandwidth": _plot_bandwidth,
}


def render(spec: PlotSpec) -> str:
    """Render one figure kind from its CSV table(s); returns the output
    path.  Raises MissingColumn or EmptyData for unusable inputs."""
    table = read_tables(spec.inputs)
    fig, ax = plt.subplots(figsize=(6.0, 4.0), constrained_layout=True)
    try:
        _RENDERERS[spec.kind](table, spec, ax)
    except Exception:
        plt.close(fig)
        raise
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.25)
    _save(fig, spec)
    return spec.output
