"""Configuration ingestion, sweep orchestration and CSV output.

One subcommand per figure family.  Configs are JSON validated against
a published schema (unknown keys are rejected); every angular
frequency is entered as a linewidth in MHz and converted internally.
Output tables are CSV with '#'-prefixed metadata lines and are
byte-identical for identical configs, independent of the worker-pool
size.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from importlib import resources

import numpy as np
import jsonschema

from . import __version__, cavity, pipeline, spectro
from .integrate import StepSizeUnderflow
from .liouville import (DegenerateKernel, DensityMatrix, DriveConfig, evolve)
from .physcore import (AtomSpecies, AtomicBeam, BeamField, barium138,
                       linewidth_mhz_from_rate, rate_from_linewidth_mhz,
                       scaled_lambda_atom)


class ConfigInvalid(ValueError):
    """Configuration rejected before any simulation ran."""


_MHZ = 1e6
_SUBCOMMANDS = ("populations", "pump-sweep", "efficiency-curve",
                "spectrum", "bandwidth", "cavity")


# --------------------------------------------------------------------- config
def _data_text(name: str) -> str:
    return resources.files("lamtrans").joinpath("data", name).read_text()


def load_schema() -> dict:
    return json.loads(_data_text("config_schema.json"))


def load_defaults() -> dict:
    return json.loads(_data_text("defaults.json"))


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path: str | None) -> dict:
    """Read, merge with defaults and validate a run configuration."""
    schema = load_schema()
    user = {}
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigInvalid(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc
        _validate(user, schema)
    merged = _deep_merge(load_defaults(), user)
    _validate(merged, schema)
    _cross_checks(merged)
    return merged


def _validate(doc: dict, schema: dict):
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.path) or "(root)"
        raise ConfigInvalid(f"config field '{where}': {err.message}")


def _cross_checks(cfg: dict):
    for name in ("pump", "input", "probe"):
        beam = cfg["beams"][name]
        has_t = beam.get("transit_us") is not None
        has_w = beam.get("width_along_mm") is not None
        if has_t and has_w:
            raise ConfigInvalid(
                f"beams/{name}: give transit_us or width_along_mm, not both")
        if not (has_t or has_w):
            raise ConfigInvalid(
                f"beams/{name}: one of transit_us or width_along_mm needed")
    for key in ("pump_powers_mW", "input_powers_mW", "bandwidth_powers_mW",
                "spectrum_powers_mW"):
        if len(cfg["sweeps"][key]) == 0:
            raise ConfigInvalid(f"sweeps/{key}: power grid must not be empty")


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# ------------------------------------------------------------------- builders
def build_atom(cfg: dict, sink_enabled: bool = False) -> AtomSpecies:
    spec = cfg["atom"]
    if spec.get("preset") == "Ba-138":
        return barium138(sink_enabled)
    try:
        return AtomSpecies(
            name=spec.get("name", "custom"),
            lambda_ab=spec["lambda_ab_nm"] * 1e-9,
            lambda_ac=spec["lambda_ac_nm"] * 1e-9,
            gamma_ab=rate_from_linewidth_mhz(spec["gamma_ab_MHz"]),
            gamma_ac=rate_from_linewidth_mhz(spec["gamma_ac_MHz"]),
            gamma_sink=rate_from_linewidth_mhz(spec.get("gamma_sink_MHz", 0)),
            sink_enabled=sink_enabled,
        )
    except (KeyError, ValueError) as exc:
        raise ConfigInvalid(f"atom: {exc}") from exc


def build_beam(cfg: dict, name: str, velocity: float) -> BeamField:
    spec = cfg["beams"][name]
    if spec.get("transit_us") is not None:
        width_along = spec["transit_us"] * 1e-6 * velocity
    else:
        width_along = spec["width_along_mm"] * 1e-3
    width_trans = spec.get("width_transverse_mm")
    width_trans = width_along if width_trans is None else width_trans * 1e-3
    try:
        return BeamField(
            power=spec.get("power_mW", 0.0) * 1e-3,
            waist_along_beam=width_along,
            waist_transverse=width_trans,
            detuning=rate_from_linewidth_mhz(spec.get("detuning_MHz", 0.0)),
            stretch_factor=spec.get("stretch_factor", 1.0),
            gaussian_profile=cfg["flags"]["gaussian_profile"],
        )
    except ValueError as exc:
        raise ConfigInvalid(f"beams/{name}: {exc}") from exc


def build_setup(cfg: dict) -> pipeline.PipelineSetup:
    beam = AtomicBeam(velocity=cfg["atomic_beam"]["velocity_m_per_s"],
                      density=cfg["atomic_beam"]["density_per_cm3"])
    det = cfg["detection"]
    chain = pipeline.DetectionChain(
        solid_angle=det["solid_angle"],
        optical_loss=det["optical_loss"],
        detector_qe=det["detector_qe"],
        density=cfg["atomic_beam"]["density_per_cm3"],
        volume=det["volume_cm3"],
        tau_probe=det["tau_probe_us"] * 1e-6,
    )
    flags = cfg["flags"]
    return pipeline.PipelineSetup(
        atom=build_atom(cfg),
        atomic_beam=beam,
        pump=build_beam(cfg, "pump", beam.velocity),
        input_beam=build_beam(cfg, "input", beam.velocity),
        probe=build_beam(cfg, "probe", beam.velocity),
        chain=chain,
        gap_pump_input=cfg["gaps"]["pump_input_mm"] * 1e-3,
        gap_input_probe=cfg["gaps"]["input_probe_mm"] * 1e-3,
        sink_preparation=flags["sink_preparation"],
        sink_transduction=flags["sink_transduction"],
        sink_detection=flags["sink_detection"],
    )


# ----------------------------------------------------------------- csv output
def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_table(path: str, subcommand: str, cfg: dict, columns, units,
                rows, extra_meta=()):
    """CSV with '#' metadata lines; deterministic bytes for fixed input."""
    for row in rows:
        for v in row:
            if isinstance(v, (float, np.floating)) and not np.isfinite(v):
                raise ValueError("refusing to emit non-finite value")
    atom = cfg["atom"]
    if atom.get("preset") == "Ba-138":
        ref = barium138()
        atom_line = (f"atom=Ba-138 gamma_ab={linewidth_mhz_from_rate(ref.gamma_ab):.6g} MHz"
                     f" ({ref.gamma_ab:.9e} rad/s)"
                     f" gamma_ac={linewidth_mhz_from_rate(ref.gamma_ac):.6g} MHz"
                     f" ({ref.gamma_ac:.9e} rad/s)"
                     f" gamma_sink={linewidth_mhz_from_rate(ref.gamma_sink):.6g} MHz"
                     f" ({ref.gamma_sink:.9e} rad/s)")
    else:
        gab = rate_from_linewidth_mhz(atom["gamma_ab_MHz"])
        gac = rate_from_linewidth_mhz(atom["gamma_ac_MHz"])
        atom_line = (f"atom={atom.get('name', 'custom')}"
                     f" gamma_ab={atom['gamma_ab_MHz']:.6g} MHz ({gab:.9e} rad/s)"
                     f" gamma_ac={atom['gamma_ac_MHz']:.6g} MHz ({gac:.9e} rad/s)")
    lines = [
        f"# lamtrans {__version__} subcommand={subcommand}",
        f"# config_sha256={config_hash(cfg)}",
        f"# {atom_line}",
        *(f"# {m}" for m in extra_meta),
        f"# columns={','.join(columns)}",
        f"# units={','.join(units)}",
        ",".join(columns),
    ]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _pool_map(fn, items, threads: int):
    """Order-preserving parallel map; results identical for any pool size."""
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- subcommands
def cmd_populations(cfg: dict, out: str, threads: int):
    """Population dynamics of the pumping stage, base and stretched."""
    pop = cfg["sweeps"]["populations"]
    atom = scaled_lambda_atom(pop["ratio"])
    omega, duration = pop["omega_over_gamma"], pop["duration_gamma"]
    stretch, points = pop["stretch_factor"], int(pop["points"])
    rho0 = DensityMatrix.pure(3, 1)

    def one(series):
        name, om, dur = series
        traj = evolve(rho0, atom, DriveConfig.preparation(om), dur,
                      num_points=points)
        return [(name, t, p[0], p[1], p[2])
                for t, p in zip(traj.times, traj.populations)]

    series = [("base", omega, duration),
              ("stretched", omega / np.sqrt(stretch), duration * stretch)]
    rows = [r for chunk in _pool_map(one, series, threads) for r in chunk]
    write_table(out, "populations", cfg,
                ("series", "time", "rho_aa", "rho_bb", "rho_cc"),
                ("name", "1/gamma_ab", "dimensionless", "dimensionless",
                 "dimensionless"),
                rows,
                extra_meta=(f"ratio_gamma_ab_over_gamma_ac={pop['ratio']}",
                            f"omega_over_gamma={omega}",
                            f"stretch_factor={stretch}"))


def cmd_pump_sweep(cfg: dict, out: str, threads: int):
    """Pumping efficiency versus pump power, stretched and unstretched."""
    setup = build_setup(cfg)
    powers = sorted(cfg["sweeps"]["pump_powers_mW"])
    atom = setup.atom.with_sink(setup.sink_preparation)

    def one(item):
        power_mw, stretched = item
        pump = replace(setup.pump, power=power_mw * 1e-3,
                       stretch_factor=(setup.pump.stretch_factor
                                       if stretched else 1.0))
        res = pipeline.run_preparation(pump, atom, setup.atomic_beam)
        return (power_mw, res.pumping_efficiency, int(stretched))

    items = [(p, s) for p in powers for s in (True, False)]
    rows = _pool_map(one, items, threads)
    write_table(out, "pump-sweep", cfg,
                ("power_mW", "pumping_efficiency", "stretched"),
                ("mW", "dimensionless", "flag"), rows,
                extra_meta=(f"stretch_factor={setup.pump.stretch_factor}",
                            f"sink_preparation={setup.sink_preparation}"))


def cmd_efficiency_curve(cfg: dict, out: str, threads: int):
    """Detected photons per absorbed input photon, two probe settings."""
    setup = build_setup(cfg)
    powers = sorted(cfg["sweeps"]["input_powers_mW"])
    probes = cfg["sweeps"]["probe_settings"]
    settings = [("high", probes["high_power_mW"] * 1e-3),
                ("low", probes["low_power_mW"] * 1e-3)]

    prepared = pipeline.prepare(setup)

    def one(item):
        label, probe_power, power_mw = item
        sub = replace(setup, probe=replace(setup.probe, power=probe_power))
        res = pipeline.run_chain(sub, power_mw * 1e-3, prepared=prepared)
        absorbed = res.transduction.absorbed_photons
        if absorbed <= 0.0:
            return None
        return (power_mw, absorbed, res.detected_photons,
                res.internal_efficiency, label, res.count_rate)

    items = [(label, pp, p) for label, pp in settings for p in powers]
    rows = [r for r in _pool_map(one, items, threads) if r is not None]
    write_table(out, "efficiency-curve", cfg,
                ("input_power_mW", "absorbed_per_atom", "detected_per_atom",
                 "internal_efficiency", "probe_setting", "count_rate"),
                ("mW", "photons", "photons", "dimensionless", "name",
                 "counts/s"), rows,
                extra_meta=(f"probe_high_mW={probes['high_power_mW']}",
                            f"probe_low_mW={probes['low_power_mW']}"))


def _symmetric_grid(span: float, points: int) -> np.ndarray:
    half = np.linspace(0.0, span / 2.0, (points + 1) // 2)
    return np.concatenate([-half[::-1], half[1:]])


def cmd_spectrum(cfg: dict, out: str, threads: int):
    """Excitation spectra versus input detuning at several input powers."""
    setup = build_setup(cfg)
    sweeps = cfg["sweeps"]
    powers = sorted(sweeps["spectrum_powers_mW"])
    tau_input = sweeps["spectrum_tau_us"] * 1e-6
    grid_cfg = sweeps["detuning_grid"]
    grid = _symmetric_grid(rate_from_linewidth_mhz(grid_cfg["span_MHz"]),
                           int(grid_cfg["points"]))
    normalize = cfg["flags"]["normalize_spectra"]

    def one(power_mw):
        spec = spectro.excitation_spectrum(power_mw * 1e-3, tau_input,
                                           grid, setup)
        if normalize:
            spec = spec.normalize()
        return [(linewidth_mhz_from_rate(d), r, power_mw)
                for d, r in zip(spec.detunings, spec.response)]

    rows = [r for chunk in _pool_map(one, powers, threads) for r in chunk]
    unit = "normalized" if normalize else "photons"
    write_table(out, "spectrum", cfg,
                ("detuning_MHz", "response", "power_mW"),
                ("MHz", unit, "mW"), rows,
                extra_meta=(f"tau_input_us={sweeps['spectrum_tau_us']}",
                            f"normalized={normalize}"))


def cmd_bandwidth(cfg: dict, out: str, threads: int):
    """Fitted transduction bandwidth versus input power, per transit time."""
    setup = build_setup(cfg)
    sweeps = cfg["sweeps"]
    powers = sorted(sweeps["bandwidth_powers_mW"])
    taus = sweeps["tau_input_us"]
    points = int(sweeps["detuning_grid"]["points"])

    def one(tau_us):
        res = spectro.bandwidth_vs_power(
            [p * 1e-3 for p in powers], tau_us * 1e-6, setup, points=points)
        return [(p_mw, linewidth_mhz_from_rate(fwhm), tau_us)
                for p_mw, (_, fwhm, _) in zip(powers, res)]

    rows = [r for chunk in _pool_map(one, taus, threads) for r in chunk]
    rows.sort(key=lambda r: (r[0], r[2]))
    write_table(out, "bandwidth", cfg,
                ("power_mW", "fwhm_MHz", "tau_input_us"),
                ("mW", "MHz", "us"), rows)


def cmd_cavity(cfg: dict, out: str, threads: int):
    """Cavity-enhanced absorption and collection scenarios."""
    cav_cfg = cfg["cavity"]
    atom = build_atom(cfg)
    gamma = atom.gamma_ab
    rows = []

    ab = cav_cfg["absorb"]
    cav = cavity.CavityConfig(g=ab["g_over_gamma_ab"] * gamma,
                              kappa=ab["kappa_over_gamma_ab"] * gamma,
                              fock_cutoff=int(ab["fock_cutoff"]))
    res = cavity.absorb_sim(atom, cav, ab["duration_gamma"] / gamma)
    rows += [("absorb", "absorption", res.absorption),
             ("absorb", "leaked", res.leaked),
             ("absorb", "reemitted", res.reemitted),
             ("absorb", "stored", res.stored),
             ("absorb", "closure", res.closure),
             ("absorb", "fock_cutoff", float(res.cutoff))]

    co = cav_cfg["collect"]
    cav = cavity.CavityConfig(g=co["g_over_gamma_ab"] * gamma,
                              kappa=co["kappa_over_gamma_ab"] * gamma,
                              fock_cutoff=int(co["fock_cutoff"]))
    resc = cavity.collect_sim(atom, cav,
                              co["probe_rabi_over_gamma_ab"] * gamma,
                              co["duration_gamma"] / gamma,
                              baseline=co["baseline_collected"])
    rows += [("collect", "photons", resc.photons),
             ("collect", "enhancement", resc.enhancement),
             ("collect", "rho_dark", resc.rho_dark),
             ("collect", "nbar_end", resc.nbar_end),
             ("collect", "fock_cutoff", float(resc.cutoff))]

    meta = (f"absorb: g={ab['g_over_gamma_ab']} kappa={ab['kappa_over_gamma_ab']}"
            f" duration={ab['duration_gamma']} (units of gamma_ab)",
            f"collect: g={co['g_over_gamma_ab']} kappa={co['kappa_over_gamma_ab']}"
            f" rabi={co['probe_rabi_over_gamma_ab']}"
            f" duration={co['duration_gamma']} (units of gamma_ab)")
    write_table(out, "cavity", cfg, ("scenario", "quantity", "value"),
                ("name", "name", "mixed"), rows, extra_meta=meta)


_DISPATCH = {
    "populations": cmd_populations,
    "pump-sweep": cmd_pump_sweep,
    "efficiency-curve": cmd_efficiency_curve,
    "spectrum": cmd_spectrum,
    "bandwidth": cmd_bandwidth,
    "cavity": cmd_cavity,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lamtrans",
        description="Lambda-system transduction simulator")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name, help=_DISPATCH[name].__doc__)
        p.add_argument("--config", default=None,
                       help="JSON config; defaults mirror the reference "
                            "free-space setup")
        p.add_argument("--out", default=f"{name.replace('-', '_')}.csv",
                       help="output CSV path")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker pool size (results are identical for "
                            "any value)")
        p.add_argument("--seedless", action="store_true",
                       help="reserved; the simulator uses no randomness")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.threads < 1:
            raise ConfigInvalid("--threads must be >= 1")
        _DISPATCH[args.subcommand](cfg, args.out, args.threads)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (StepSizeUnderflow, DegenerateKernel, spectro.FitDiverged,
            cavity.CutoffNotConverged, np.linalg.LinAlgError,
            FloatingPointError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
