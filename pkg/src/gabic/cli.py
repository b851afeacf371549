"""Command-line front end: gabic sweep | dynamics | bic | spectrum.

One JSON config file drives every command; CLI flags override file
values. All energies in output files are in units of xi and times in
units of 1/xi (stated in a '#' header line). Numbers are written with
15 significant digits and files are written atomically, so identical
configs give byte-identical output on the same platform.

Exit codes: 0 success, 1 config/validation error, 2 numerical failure,
3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings

import numpy as np

from .analysis import BicCriteria, find_bics
from .lattice import (LightConeWarning, NumericalError, assemble_hamiltonian,
                      atom_excited, check_light_cone, diagonalize, propagate)
from .markov import evolve_markov, sweep_phase
from .model import ConfigurationError, Geometry, ModelParams, sites_for_time, validate

#: lattice size used by bic/spectrum when the config gives a coupling
#: pattern without an explicit chain length
DEFAULT_ANALYSIS_SITES = 1200


class StrictLightCone(ConfigurationError):
    """Light-cone warning escalated by --strict."""


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".15g")


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gabic-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render_table(columns, rows, fmt: str, meta: str) -> str:
    if fmt == "json":
        doc = {"meta": meta, "columns": list(columns),
               "rows": [[(None if v is None else float(v)) for v in r] for r in rows]}
        return json.dumps(doc, indent=1) + "\n"
    lines = [f"# {meta}", ",".join(columns)]
    lines += [",".join(_fmt(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


UNITS_NOTE = "energies in units of xi; times in units of 1/xi"


def _resolve_config(args) -> dict:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    cfg.setdefault("params", {})
    cfg.setdefault("geometry", {})
    cfg.setdefault("sweep", {})
    cfg.setdefault("dynamics", {})
    cfg.setdefault("bic", {})
    cfg.setdefault("output", {})
    if args.phi is not None:
        cfg["params"]["phi"] = args.phi
    if args.tmax is not None:
        cfg["dynamics"]["t_max"] = args.tmax
    if args.nc is not None:
        cfg["geometry"]["n_sites"] = args.nc
    if args.out is not None:
        cfg["output"]["path"] = args.out
    if args.format is not None:
        cfg["output"]["format"] = args.format
    cfg["output"].setdefault("format", "csv")
    cfg["dynamics"].setdefault("t_max", 400.0)
    cfg["dynamics"].setdefault("n_times", 801)
    cfg["dynamics"].setdefault("backend", "both")
    cfg["dynamics"].setdefault("initial", "atom1")
    return cfg


def _build_model(cfg: dict, command: str) -> tuple[ModelParams, Geometry]:
    p = cfg["params"]
    params = ModelParams(
        omega_a=float(p.get("omega_a", 0.0)),
        omega_c=float(p.get("omega_c", 0.0)),
        xi=float(p.get("xi", 1.0)),
        g=float(p.get("g", 0.1)),
        lam=float(p.get("lam", 1.6 * float(p.get("g", 0.1)) ** 2
                         / float(p.get("xi", 1.0)))),
        phi=float(p.get("phi", 0.0)),
    )
    g = cfg["geometry"]
    if all(k in g for k in ("n1", "n2", "m1", "m2")):
        geometry = Geometry(n1=int(g["n1"]), n2=int(g["n2"]),
                            m1=int(g["m1"]), m2=int(g["m2"]),
                            n_sites=int(g["n_sites"]))
    elif "size" in g:
        size, shift = int(g["size"]), int(g["shift"])
        if "n_sites" in g and g["n_sites"] is not None:
            n_sites = int(g["n_sites"])
        elif command == "dynamics":
            n_sites = sites_for_time(size + shift,
                                     float(cfg["dynamics"]["t_max"]), params.xi)
        else:
            n_sites = max(DEFAULT_ANALYSIS_SITES, size + shift + 80)
        geometry = Geometry.braided(size, shift, n_sites,
                                    offset=g.get("offset"))
    else:
        raise ConfigurationError(
            "geometry needs either n1/n2/m1/m2/n_sites or size/shift")
    for message in validate(params, geometry):
        print(f"warning: {message}", file=sys.stderr)
    cfg["geometry"] = {"n1": geometry.n1, "n2": geometry.n2,
                       "m1": geometry.m1, "m2": geometry.m2,
                       "n_sites": geometry.n_sites}
    cfg["params"] = {"omega_a": params.omega_a, "omega_c": params.omega_c,
                     "xi": params.xi, "g": params.g, "lam": params.lam,
                     "phi": params.phi}
    return params, geometry


def cmd_sweep(cfg, params, geometry) -> str:
    s = cfg["sweep"]
    start = float(s.get("phi_start", 0.0))
    stop = float(s.get("phi_stop", 4 * math.pi))
    steps = int(s.get("steps", 801))
    if steps < 1:
        raise ConfigurationError("empty phase grid")
    grid = np.linspace(start, stop, steps)
    records = sweep_phase(params, geometry, grid)
    rows = [(r.phi, r.eigen1.real, r.eigen1.imag,
             r.eigen2.real, r.eigen2.imag, r.n_bics) for r in records]
    return _render_table(
        ("phi", "re_e1", "im_e1", "re_e2", "im_e2", "n_bics"),
        rows, cfg["output"]["format"], UNITS_NOTE)


def cmd_dynamics(cfg, params, geometry, strict: bool) -> str:
    d = cfg["dynamics"]
    backend = d["backend"]
    if backend not in ("markov", "lattice", "both"):
        raise ConfigurationError(f"unknown backend {backend!r}")
    times = np.linspace(0.0, float(d["t_max"]), int(d["n_times"]))
    which = {"atom1": 1, "atom2": 2}.get(d["initial"])
    if which is None:
        raise ConfigurationError(f"unknown initial state {d['initial']!r}")

    pm1 = pm2 = pl1 = pl2 = photon = None
    if backend in ("markov", "both"):
        init = np.array([1.0, 0.0] if which == 1 else [0.0, 1.0], complex)
        amps = evolve_markov(params, geometry, init, times)
        pm1 = np.abs(amps[:, 1]) ** 2
        pm2 = np.abs(amps[:, 2]) ** 2
    if backend in ("lattice", "both"):
        if strict and not check_light_cone(geometry, float(times.max()), params.xi):
            raise StrictLightCone(
                "light-cone violation under --strict: enlarge n_sites or "
                "reduce t_max")
        spectrum = diagonalize(assemble_hamiltonian(params, geometry))
        with warnings.catch_warnings():
            warnings.simplefilter("default", LightConeWarning)
            traj = propagate(spectrum, atom_excited(geometry.n_sites, which),
                             times)
        pl1, pl2, photon = traj.pop1, traj.pop2, traj.photon_total

    rows = []
    for i, t in enumerate(times):
        rows.append((t,
                     None if pm1 is None else pm1[i],
                     None if pm2 is None else pm2[i],
                     None if pl1 is None else pl1[i],
                     None if pl2 is None else pl2[i],
                     None if photon is None else photon[i]))
    return _render_table(
        ("t", "pop1_markov", "pop2_markov", "pop1_lattice", "pop2_lattice",
         "photon_total"),
        rows, cfg["output"]["format"], UNITS_NOTE)


def _criteria_from(cfg) -> BicCriteria:
    b = cfg["bic"]
    defaults = BicCriteria()
    return BicCriteria(
        band_margin=float(b.get("band_margin", defaults.band_margin)),
        min_atomic_weight=float(b.get("min_atomic_weight",
                                      defaults.min_atomic_weight)),
        localization_window=int(b.get("localization_window",
                                      defaults.localization_window)),
        min_localized_fraction=float(b.get("min_localized_fraction",
                                           defaults.min_localized_fraction)),
    )


def cmd_bic(cfg, params, geometry) -> tuple[str, list[tuple[str, str]]]:
    spectrum = diagonalize(assemble_hamiltonian(params, geometry))
    bics = find_bics(spectrum, params, geometry, _criteria_from(cfg))
    report = {
        "meta": UNITS_NOTE,
        "config": {"params": cfg["params"], "geometry": cfg["geometry"]},
        "n_bics": len(bics),
        "bics": [],
    }
    profiles = []
    for i, b in enumerate(bics):
        report["bics"].append({
            "energy": b.energy,
            "alpha1": {"re": b.alpha1.real, "im": b.alpha1.imag},
            "alpha2": {"re": b.alpha2.real, "im": b.alpha2.imag},
            "ground_population": b.ground_population,
            "concurrence": b.concurrence,
            "localized_fraction": b.localized_fraction,
            "rho_atoms": {
                "basis": " ".join(("gg", "ge", "eg", "ee")),
                "re": [[v.real for v in row] for row in b.rho_atoms],
                "im": [[v.imag for v in row] for row in b.rho_atoms],
            },
        })
        lines = [f"# {UNITS_NOTE}; bound state {i} at energy "
                 f"{_fmt(b.energy)}", "site,beta_abs2"]
        lines += [f"{s},{_fmt(w)}" for s, w in enumerate(b.beta_abs2)]
        profiles.append((f"bic{i}", "\n".join(lines) + "\n"))
    return json.dumps(report, indent=1) + "\n", profiles


def cmd_spectrum(cfg, params, geometry) -> str:
    spectrum = diagonalize(assemble_hamiltonian(params, geometry))
    crit = _criteria_from(cfg)
    w = crit.localization_window
    lo = 2 + max(geometry.leftmost - w, 0)
    hi = 2 + min(geometry.rightmost + w, geometry.n_sites - 1) + 1
    rows = []
    for i in range(spectrum.energies.size):
        vec = spectrum.states[:, i]
        aw = abs(vec[0]) ** 2 + abs(vec[1]) ** 2
        loc = aw + float(np.sum(np.abs(vec[lo:hi]) ** 2))
        rows.append((i, spectrum.energies[i], aw, loc))
    return _render_table(("index", "energy", "atomic_weight",
                          "localized_fraction"),
                         rows, cfg["output"]["format"], UNITS_NOTE)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gabic",
        description="Two coupled giant atoms on a resonator lattice: "
                    "phase sweeps, dynamics, bound-state profiles.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("sweep", "coupling-phase sweep of the 2x2 spectrum"),
                       ("dynamics", "time evolution of the atomic populations"),
                       ("bic", "bound-state profiles and entanglement"),
                       ("spectrum", "full lattice eigenvalue table")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--phi", type=float, help="override coupling phase")
        p.add_argument("--tmax", type=float, help="override evolution time")
        p.add_argument("--nc", type=int, help="override lattice length")
        p.add_argument("--strict", action="store_true",
                       help="escalate light-cone warnings to errors")
        p.add_argument("--print-config", action="store_true",
                       help="emit the fully resolved config to stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        params, geometry = _build_model(cfg, args.command)
        if args.print_config:
            print(json.dumps({"command": args.command, **cfg}, indent=1))

        profiles: list[tuple[str, str]] = []
        if args.command == "sweep":
            text = cmd_sweep(cfg, params, geometry)
        elif args.command == "dynamics":
            text = cmd_dynamics(cfg, params, geometry, args.strict)
        elif args.command == "bic":
            text, profiles = cmd_bic(cfg, params, geometry)
        else:
            text = cmd_spectrum(cfg, params, geometry)

        out = cfg["output"].get("path")
        if out:
            _write_atomic(out, text)
            stem, ext = os.path.splitext(out)
            for tag, body in profiles:
                _write_atomic(f"{stem}_{tag}.csv", body)
        else:
            sys.stdout.write(text)
            for tag, body in profiles:
                sys.stdout.write(body)
        return 0
    except (ConfigurationError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
