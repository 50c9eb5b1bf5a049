"""Command-line entry point.

    hyperlat curvature-table [P ...]
    hyperlat spectrum     [--config CFG] [--out DIR] [--p P] [--shells N] [--seed S]
    hyperlat shell-scan   [--config CFG] [--out DIR] [--p P]
    hyperlat transmission [--config CFG] [--out DIR] [--seed S] [--measured CSV]
    hyperlat render       [--config CFG] [--out DIR] [--p P] [--shells N]

Exit codes: 0 success, 2 configuration error, 3 computation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, config as cfgmod, svg
from .config import ConfigError, RunConfig
from .hypgeo import medial_spacing, tile_edge_length
from .lattice import build_layout, medial_graph
from .spectra import build_loop_state, diagonalize, dos_histogram, flat_band_report, shell_scan
from .tightbinding import (Orientation, assemble_full_wave, assemble_half_wave, orientation_search)
from .transmission import (PortConfig, band_window, default_ports, ensemble, estimate_background,
                           ingest_measurement)

log = logging.getLogger("hyperlat")

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE = 0, 2, 3


# --------------------------------------------------------------------------
# output helpers

def _write(path: Path, text: str) -> None:
    path.write_text(text)
    log.info("wrote %s", path)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{x:.12g}" if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _sidecar(out: Path, command: str, argv) -> None:
    meta = {"command": command, "argv": list(argv), "version": __version__,
            "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
    (out / "run_metadata.json").write_text(_json_text(meta))


def _prepare(cfg: RunConfig) -> Path:
    out = cfg.output_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    if not out.is_dir():
        raise ConfigError(f"output path {out} is not a directory")
    return out


# --------------------------------------------------------------------------
# commands

def curvature_rows(ps):
    return [(p, tile_edge_length(p, 3), medial_spacing(p, 3)) for p in ps]


def cmd_curvature_table(ps, out: Path = None) -> str:
    for p in ps:
        if p < 7:
            raise ConfigError(f"p = {p} does not give a hyperbolic {{p,3}} tiling (need p >= 7)")
    text = _csv_text(["p", "layout_spacing_R", "effective_spacing_R"],
                     [(p, round(a, 6), round(b, 6)) for p, a, b in curvature_rows(ps)])
    if out is not None:
        _write(out / "curvature_table.csv", text)
    return text


def _hamiltonian(cfg: RunConfig, lat):
    if cfg.convention == "half-wave":
        orient, cycle = orientation_search(lat)
        if orient is None:
            orient = Orientation.from_ends(lat.ends)
        h = assemble_half_wave(lat, cfg.model, orient)
        return h, {"orientation": "consistent" if cycle is None else "frustrated",
                   "odd_cycle": cycle}
    return assemble_full_wave(lat, cfg.model), {}


def cmd_spectrum(cfg: RunConfig) -> dict:
    out = _prepare(cfg)
    lat = medial_graph(build_layout(cfg.p, cfg.shells))
    h, extra = _hamiltonian(cfg, lat)
    spec = diagonalize(h)
    rep = flat_band_report(spec, cfg.tol_flat)
    scale = abs(cfg.model.t)
    w = spec.eigenvalues
    if "csv" in cfg.formats:
        _write(out / "eigenvalues.csv", _csv_text(["index", "energy"], enumerate(w)))
    if "svg" in cfg.formats:
        counts, edges = dos_histogram(spec, cfg.bins,
                                      (cfg.model.omega0 - 2.2 * scale, cfg.model.omega0 + 4.2 * scale))
        _write(out / "dos.svg", svg.plot_dos(counts, edges))
        _write(out / "spectrum.svg", svg.plot_spectrum(w))
    summary = {
        "lattice": {"p": cfg.p, "shells": cfg.shells, "sites": lat.n_sites, "bonds": len(lat.bonds),
                    "layout_vertices": lat.layout.n_vertices, "layout_faces": lat.layout.n_faces},
        "convention": cfg.convention,
        "flat_band": rep.to_dict(),
        "provenance": h.provenance | extra,
    }
    if "json" in cfg.formats:
        _write(out / "flat_band.json", _json_text(summary))
    return summary


def cmd_shell_scan(cfg: RunConfig) -> list:
    out = _prepare(cfg)
    rows, spectra = shell_scan(cfg.p, cfg.scan_shells, cfg.model, cfg.tol_flat)
    table = [(r.shells, r.n, r.degeneracy, r.gap, r.higher_gap) for r in rows]
    if "csv" in cfg.formats:
        _write(out / "gap_table.csv", _csv_text(["shells", "sites", "flat_degeneracy", "gap", "max_higher_gap"], table))
        lines = []
        for r, s in zip(rows, spectra):
            lines.extend((r.shells, i, e) for i, e in enumerate(s.eigenvalues))
        _write(out / "spectra.csv", _csv_text(["shells", "index", "energy"], lines))
    if "svg" in cfg.formats:
        colours = ["#d62728", "#1f77b4", "#17becf", "#e6ab02", "#2ca02c", "#9467bd", "#8c564b"]
        x = np.linspace(0, 1, 201)
        curves = [np.interp(x, np.linspace(0, 1, s.n), s.eigenvalues) for s in spectra]
        _write(out / "shell_scan.svg", svg.plot_lines(
            x, curves, [f"shells={r.shells}" for r in rows], colours[:len(rows)] * 3,
            "normalized eigenstate index", "E / |t|"))
    if "json" in cfg.formats:
        _write(out / "gap_table.json", _json_text(
            [{"shells": a, "sites": b, "flat_degeneracy": c, "gap": d, "max_higher_gap": e} for a, b, c, d, e in table]))
    return table


def _ports(cfg: RunConfig, lat) -> PortConfig:
    if cfg.port_sites is None:
        base = default_ports(lat, cfg.port_coupling)
        return PortConfig(base.sites, base.couplings, cfg.input_port, cfg.output_port)
    return PortConfig(cfg.port_sites, (cfg.port_coupling,) * len(cfg.port_sites), cfg.input_port, cfg.output_port)


def cmd_transmission(cfg: RunConfig) -> dict:
    tc = cfg.transmission
    measured = ingest_measurement(tc.measured_path) if tc.measured_path else None
    out = _prepare(cfg)
    raw_lat = cfg.raw.get("lattice", {})
    lat = medial_graph(build_layout(raw_lat.get("p", 7), raw_lat.get("shells", 2)))
    ports = _ports(cfg, lat)
    ports.check(lat.n_sites)
    grid = tc.grid()
    background = None
    if measured is not None:
        background = estimate_background(measured.freqs, measured.magnitude, tc.filter_width, grid, regrid=True)
    members = ensemble(tc, lat=lat, ports=ports, background=background)
    if "csv" in cfg.formats:
        header = ["freq_ghz"]
        for m in members:
            header += [f"m{m.member}_re", f"m{m.member}_im"]
        rows = []
        for k, f in enumerate(grid):
            row = [f]
            for m in members:
                row += [m.s21[k].real, m.s21[k].imag]
            rows.append(row)
        _write(out / "ensemble.csv", "# frequencies in GHz; S21 is dimensionless\n" + _csv_text(header, rows))
        mode_rows = []
        for m in members:
            for j in range(len(m.mode_freqs)):
                mode_rows.append([m.member, j, m.mode_freqs[j], 1e3 * m.mode_kappa[j], m.port_weight[j]]
                                 + list(m.overlaps[j]))
        _write(out / "modes.csv", "# frequencies in GHz, half-widths (HWHM) in MHz, port weight in GHz\n" + _csv_text(
            ["member", "mode", "freq_ghz", "hwhm_mhz", "port_weight"] + [f"A_port{q}" for q in range(len(ports.sites))],
            mode_rows))
    if "svg" in cfg.formats:
        curves = [20 * np.log10(np.abs(m.s21) + 1e-12) for m in members]
        labels = [f"member{m.member}_db" for m in members]
        colours = ["#e41a1c"] * len(members)
        widths = [0.6] * len(members)
        if measured is not None:
            mag = np.interp(grid, measured.freqs, measured.magnitude)
            curves.append(20 * np.log10(mag + 1e-12))
            labels.append("measured_db")
            colours.append("#08306b")
            widths.append(1.2)
        _write(out / "transmission.svg", svg.plot_lines(grid, curves, labels, colours, "f (GHz)", "|S21|^2 (dB)", widths))
    params = tc.params
    summary = {
        "members": [{"member": m.member, "seed": m.seed, "perturbation_norm_ghz": m.perturbation_norm,
                     "band_window_ghz": list(band_window(params, float(m.mode_kappa.max()), m.perturbation_norm))}
                    for m in members],
        "ports": {"sites": list(ports.sites), "couplings": list(ports.couplings),
                  "input": ports.input_port, "output": ports.output_port},
        "params": params.to_dict(),
        "kappa0_mhz": 1e3 * tc.kappa0,
        "kappa_ext": tc.kappa_ext,
        "mode_matching": "amplitude product",
        "ring_offsets_note": "fundamental-mode offsets doubled for the second harmonic",
        "measured": tc.measured_path,
    }
    if "json" in cfg.formats:
        _write(out / "ensemble.json", _json_text(summary))
    return summary


def cmd_render(cfg: RunConfig) -> list:
    out = _prepare(cfg)
    layout = build_layout(cfg.p, cfg.shells)
    lat = medial_graph(layout)
    written = []

    def emit(name, text):
        _write(out / name, text)
        written.append(name)

    emit("layout.svg", svg.render_layout(layout))
    emit("lattice.svg", svg.render_layout(layout, lat))
    if cfg.states:
        h, _ = _hamiltonian(cfg, lat)
        spec = diagonalize(h)
        for k in cfg.states:
            idx = k % spec.n
            emit(f"eigenstate_{idx}.svg", svg.render_eigenstate(lat, spec.eigenvectors[:, idx]))
    if cfg.loop_faces is not None:
        loop = build_loop_state(lat, cfg.loop_faces)
        emit("loop_state.svg", svg.render_eigenstate(lat, loop.amplitudes))
    return written


# --------------------------------------------------------------------------
# argument parsing

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperlat", description="Hyperbolic kagome-like lattice tools")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("curvature-table", help="layout and effective lattice spacings in units of R")
    c.add_argument("p", nargs="*", type=int)
    c.add_argument("--out", type=Path)

    for name, help_ in (("spectrum", "eigenvalues, DOS and flat-band report"),
                        ("shell-scan", "gap table versus system size"),
                        ("transmission", "S21 disorder ensemble"),
                        ("render", "SVG drawings of the lattice and eigenstates")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", type=Path)
        s.add_argument("--out", type=Path, help="output directory (overrides config and $%s)" % cfgmod.OUTPUT_ENV)
        if name != "transmission":
            s.add_argument("--p", type=int)
        if name in ("spectrum", "render"):
            s.add_argument("--shells", type=int)
        if name in ("spectrum", "transmission"):
            s.add_argument("--seed", type=int)
        if name == "transmission":
            s.add_argument("--measured", type=str)
    return ap


def _overrides(args) -> dict:
    ov = {}
    if getattr(args, "p", None) is not None:
        ov["lattice.p"] = args.p
    if getattr(args, "shells", None) is not None:
        ov["lattice.shells"] = args.shells
    if getattr(args, "seed", None) is not None:
        ov["model.seed" if args.command == "spectrum" else "transmission.seed"] = args.seed
    if getattr(args, "measured", None) is not None:
        ov["transmission.measured"] = args.measured
    if getattr(args, "out", None) is not None:
        ov["output.directory"] = str(args.out)
    return ov


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "curvature-table":
            out = None
            if args.out is not None:
                out = args.out
                out.mkdir(parents=True, exist_ok=True)
            sys.stdout.write(cmd_curvature_table(args.p, out))
            return EXIT_OK
        cfg = cfgmod.load(args.config, _overrides(args))
    except ConfigError as exc:
        print(f"hyperlat: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"hyperlat: error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    commands = {"spectrum": cmd_spectrum, "shell-scan": cmd_shell_scan,
                "transmission": cmd_transmission, "render": cmd_render}
    try:
        result = commands[args.command](cfg)
    except ConfigError as exc:
        print(f"hyperlat: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"hyperlat: {args.command} failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    _sidecar(cfg.output_dir, args.command, argv)
    if args.command == "spectrum":
        fb = result["flat_band"]
        gap = "none above" if fb["gap"] is None else f"{fb['gap']:.6g}"
        print(f"sites={result['lattice']['sites']} flat_energy={fb['flat_energy']:.6g} "
              f"degeneracy={fb['degeneracy']} gap={gap}")
    elif args.command == "shell-scan":
        for row in result:
            print("shells=%d sites=%d degeneracy=%d gap=%.6g max_higher_gap=%.6g" % row)
    elif args.command == "transmission":
        print(f"members={len(result['members'])} written to {cfg.output_dir}")
    else:
        print("\n".join(str(cfg.output_dir / r) for r in result))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
