"""Command-line entry point: ``archrefine <group> <command> [options]``.

Exit codes: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__, column, curvefit, perception, physics, render, stylobate, visibility

PRESETS = ("parthenon",)


class UsageError(Exception):
    pass


@dataclass
class Config:
    preset: str = "parthenon"
    seed: int = 0
    out: str | None = None
    json: bool = False
    threshold: str = "420arcsec"

    @classmethod
    def from_mapping(cls, data: dict) -> "Config":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        if cfg.preset not in PRESETS:
            raise UsageError(f"unknown preset {cfg.preset!r}; available: {', '.join(PRESETS)}")
        return cfg


# --- output ------------------------------------------------------------------------


class Report:
    """Ordered results with units; printed as a table or as JSON."""

    def __init__(self, command: str, cfg: Config, params: dict):
        self.command, self.cfg, self.params = command, cfg, params
        self.rows: list[tuple[str, object, str, str]] = []
        self.files: list[str] = []

    def add(self, name, value, unit="", human=""):
        if isinstance(value, np.generic):
            value = value.item()
        self.rows.append((name, value, unit, human))

    def provenance(self) -> dict:
        return {"tool": "archrefine", "version": __version__, "command": self.command,
                "config": asdict(self.cfg), "parameters": self.params}

    def header_lines(self) -> list[str]:
        cfg = " ".join(f"{k}={v}" for k, v in asdict(self.cfg).items())
        par = " ".join(f"{k}={v}" for k, v in self.params.items())
        return [f"archrefine {__version__} {self.command}", f"config: {cfg}", f"parameters: {par}"]

    def emit(self, stream):
        if self.cfg.json:
            doc = {"provenance": self.provenance(),
                   "results": {n: v for n, v, _, _ in self.rows},
                   "units": {n: u for n, _, u, _ in self.rows if u}}
            if self.files:
                doc["files"] = self.files
            stream.write(json.dumps(doc, indent=2) + "\n")
            return
        for line in self.header_lines():
            stream.write(f"# {line}\n")
        width = max([len(n) for n, *_ in self.rows] + [4])
        for n, v, u, h in self.rows:
            text = repr(v) if isinstance(v, float) else str(v)
            tail = f"  ({h})" if h else ""
            stream.write(f"{n:<{width}}  {text} {u}".rstrip() + tail + "\n")
        for f in self.files:
            stream.write(f"wrote {f}\n")


def _write(report: Report, path, text: str):
    Path(path).write_text(text, encoding="utf-8")
    report.files.append(str(path))


def _pair(text: str, n: int, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"{what}: expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"{what}: expected {n} comma-separated numbers, got {text!r}")
    return vals


def _profile(text: str | None) -> column.ColumnProfile:
    if text is None:
        return column.penrose()
    return column.ColumnProfile(*_pair(text, 4, "--profile"))


def _threshold(text: str) -> perception.AngularThreshold:
    try:
        return perception.AngularThreshold.parse(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _human_len(m: float) -> str:
    if abs(m) >= 1000:
        return f"{m / 1000:.4g} km"
    if abs(m) >= 1:
        return f"{m:.4g} m"
    if abs(m) >= 0.01:
        return f"{m * 100:.4g} cm"
    return f"{m * 1000:.4g} mm"


def _human_time(s: float) -> str:
    if s >= 3600:
        return f"{s / 3600:.3g} h"
    if s >= 60:
        return f"{s / 60:.3g} min"
    return f"{s:.3g} s"


# --- commands --------------------------------------------------------------------


def cmd_stylobate(args, rep: Report):
    surf = stylobate.parthenon()
    if args.cmd == "eval":
        rep.add("z", surf(args.x, args.y), "m", _human_len(surf(args.x, args.y)))
    elif args.cmd == "crown":
        x, y, z = stylobate.find_crown(surf)
        rep.add("x", x, "m")
        rep.add("y", y, "m")
        rep.add("z", z, "m", _human_len(z))
        rep.add("gradient_norm", float(np.linalg.norm(surf.gradient(x, y))))
    elif args.cmd == "slopes":
        for side in stylobate.SIDES:
            rep.add(f"{side}_deg", stylobate.side_mean_slope(surf, side), "deg")
        rep.add("east_west_deg", stylobate.pair_mean_slope(surf, "ew"), "deg")
        rep.add("north_south_deg", stylobate.pair_mean_slope(surf, "ns"), "deg")
        for side in stylobate.SIDES:
            s = surf.boundary(side).sagitta()
            rep.add(f"{side}_sagitta", s, "m", _human_len(s))
    elif args.cmd == "mesh":
        m = stylobate.export_mesh(surf, args.nx, args.ny)
        rep.add("vertices", m.n_vertices)
        rep.add("faces", m.n_faces)
        out = rep.cfg.out or "stylobate.obj"
        m.write(out, rep.header_lines())
        rep.files.append(out)
    elif args.cmd == "fit":
        if args.samples:
            data = curvefit.load_samples(args.samples)
        else:
            arc = surf.boundary(args.side)
            s = np.linspace(0.0, arc.length, args.n)
            data = list(zip(s, arc(s)))
        families = curvefit.FAMILIES if args.family == "all" else (args.family,)
        for fam, fit in curvefit.compare_fits(data, families=families).items():
            for k, v in fit.params.items():
                rep.add(f"{fam}.{k}", float(v))
            rep.add(f"{fam}.rms", fit.rms_residual, "m", _human_len(fit.rms_residual))
            sg = curvefit.sagitta(fit)
            rep.add(f"{fam}.sagitta", sg, "m", _human_len(sg))
            if fit.degenerate:
                rep.add(f"{fam}.degenerate", True)


def cmd_column(args, rep: Report):
    prof = _profile(args.profile)
    if args.cmd == "radius":
        r = float(column.radius_at(prof, args.z))
        rep.add("r", r, "m", _human_len(r))
    elif args.cmd == "entasis":
        z, d = column.entasis_deviation(prof)
        rep.add("z_star", z, "m")
        rep.add("delta", d, "m", _human_len(d))
    elif args.cmd == "mesh":
        flutes = None if args.no_flutes else column.FluteSpec(full_width_norm=args.full_width_norm)
        m = column.column_mesh(column.ColumnSurface(prof, flutes), args.n_theta, args.n_z)
        rep.add("vertices", m.n_vertices)
        rep.add("faces", m.n_faces)
        out = rep.cfg.out or "column.obj"
        m.write(out, rep.header_lines())
        rep.files.append(out)


def cmd_perceive(args, rep: Report):
    if args.cmd in ("sagitta", "detect"):
        th = _threshold(args.threshold or rep.cfg.threshold)
        rep.add("threshold_arcsec", th.value, "arcsec")
        crit = perception.critical_sagitta(args.distance, th)
        rep.add("critical_sagitta", crit, "m", _human_len(crit))
        if args.cmd == "detect":
            arc = stylobate.parthenon().boundary(args.side)
            det = perception.is_detectable(arc, args.distance, th)
            rep.add("sagitta", det.sagitta, "m", _human_len(det.sagitta))
            rep.add("detectable", det.detectable)
            rep.add("margin", det.margin, "m", _human_len(det.margin))
            lim = perception.detection_limit(arc, th)
            rep.add("detection_limit", lim, "m", _human_len(lim))
    elif args.cmd == "letters":
        theta = perception.parse_angle(args.theta)
        h = perception.scaled_letter_height(args.H, args.D, theta)
        rep.add("letter_height", h, "m", _human_len(h))
        rep.add("theta_rad", theta, "rad", perception.humanize_angle(theta))
    elif args.cmd == "equalize":
        r1 = perception.PlacedText(args.H1, args.h1)
        r2 = perception.PlacedText(args.H2, args.h2)
        eq = perception.equalization_distance(r1, r2)
        rep.add("status", eq.status)
        rep.add("distance", eq.distance, "m" if eq.distance is not None else "")
        if eq.note:
            rep.add("note", eq.note)
    elif args.cmd == "tilt":
        tilt = math.degrees(perception.parse_angle(args.tilt))
        H = perception.tilt_convergence_height(args.half_span, tilt)
        rep.add("height", H, "m", _human_len(H))
    elif args.cmd == "bhr":
        rep.add("bhr", perception.expected_bhr(args.stature))
        lo, hi = perception.FRIEZE_BHR
        rep.add("frieze_band", f"{lo:g}-{hi:g}")


def cmd_drain(args, rep: Report):
    flow = physics.FilmFlow.from_degrees(args.slope_deg, args.h0_mm * 1e-3, args.L, nu=args.nu)
    U, q = physics.film_state(flow, flow.h0)
    t = physics.drainage_time(flow)
    rep.add("U_h0", U, "m/s")
    rep.add("flux_h0", q, "m^2/s")
    rep.add("mean_velocity", physics.mean_film_velocity(flow), "m/s")
    rep.add("drainage_time", t, "s", _human_time(t))


def cmd_buckle(args, rep: Report):
    r = physics.buckling_report(physics.BucklingCase(args.E, args.L, args.r, args.crush))
    rep.add("P_cr", r.P_cr, "N", f"{r.P_cr / 1e6:.4g} MN")
    rep.add("sigma_cr", r.sigma_cr, "Pa", f"{r.sigma_cr / 1e6:.4g} MPa")
    rep.add("failure_mode", r.failure_mode)
    rep.add("slenderness", r.slenderness)
    for k, note in enumerate(r.notes):
        rep.add(f"note{k}", note)


def _footprint(args) -> visibility.Footprint:
    kw = {"model": args.model}
    if args.radius is not None:
        kw["corner_column_radius"] = args.radius
    return visibility.Footprint(**kw)


def cmd_visibility(args, rep: Report):
    fp = _footprint(args)
    if args.cmd == "classify":
        vc = visibility.classify_vantage(fp, (args.x, args.y), args.facade, args.rays)
        for c, flag in vc.corners:
            rep.add(c, flag)
        rep.add("class", vc.code)
        rep.add("label", vc.label)
    elif args.cmd == "map":
        extent = _pair(args.extent, 4, "--extent") if args.extent else None
        vm = visibility.vantage_map(fp, extent, args.cell, args.rays)
        rep.add("cells", int(vm.mask.size))
        for f in visibility.FACADES:
            rep.add(f"{f}_both_area", vm.area(f, 2), "m^2")
            rep.add(f"{f}_one_area", vm.area(f, 1), "m^2")
        out = rep.cfg.out or f"vantage_{args.facade}.csv"
        vm.to_csv(args.facade, out)
        rep.files.append(out)
        if args.svg:
            _write(rep, args.svg, render.vantage_svg(vm, None if args.facade == "all" else args.facade))


def cmd_render(args, rep: Report):
    if args.cmd == "facade":
        surf = stylobate.parthenon()
        spec = render.FacadeSpec(
            n_columns=args.columns, profile=_profile(args.profile),
            stylobate=surf.boundary(args.side), tilt_deg=args.tilt,
            entasis=not args.no_entasis, curvature=not args.flat, scale=args.scale,
            vertical_exaggeration=args.exaggeration, show_axes=args.axes,
            width=surf.a if args.side in ("east", "west") else surf.b,
        )
        doc = render.facade_pair_svg(spec, rep.cfg.seed) if args.pair else render.facade_svg(spec)
        out = rep.cfg.out or "facade.svg"
    elif args.cmd == "illusion":
        spec = render.IllusionSpec(kind=args.kind, n_modifiers=args.n,
                                   angle_range=_pair(args.angles, 2, "--angles"),
                                   target_offset=args.offset)
        doc = render.illusion_svg(spec)
        out = rep.cfg.out or f"{args.kind}.svg"
    else:  # pair
        p1 = _profile(args.p1)
        p2 = _profile(args.p2) if args.p2 else p1.chord()
        doc = render.profile_pair_svg(p1, p2, seed=rep.cfg.seed, scale=args.scale)
        out = rep.cfg.out or "profiles.svg"
    meta = render.parse_metadata(doc)
    for k in ("figure", "seed", "A", "B"):
        if k in meta:
            rep.add(k, meta[k])
    _write(rep, out, doc)


# --- parser ----------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=None, help="machine-readable output")
    p.add_argument("--out", help="output path for documents, meshes and maps")
    p.add_argument("--preset", choices=PRESETS, help="bundled model data (default parthenon)")
    p.add_argument("--seed", type=int, help="A/B randomization seed (default 0)")
    p.add_argument("--config", help="JSON file with config keys: preset, seed, out, json, threshold")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="archrefine", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"archrefine {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)

    def sub(group_parser, name, **kw):
        return group_parser.add_parser(name, parents=[common], **kw)

    g = groups.add_parser("stylobate", help="platform surface").add_subparsers(dest="cmd", required=True)
    p = sub(g, "eval", help="elevation at a point")
    p.add_argument("--x", type=float, required=True, help="north of the SE corner, m")
    p.add_argument("--y", type=float, required=True, help="west of the SE corner, m")
    sub(g, "crown", help="interior maximum")
    sub(g, "slopes", help="mean side slopes and sagittas")
    p = sub(g, "mesh", help="export the surface as a quad mesh")
    p.add_argument("--nx", type=int, default=32)
    p.add_argument("--ny", type=int, default=71)
    p = sub(g, "fit", help="fit parabola/circle/catenary to a side or to CSV samples")
    p.add_argument("--samples", help="CSV with header s,v")
    p.add_argument("--side", choices=stylobate.SIDES, default="east")
    p.add_argument("--n", type=int, default=101, help="samples along the side")
    p.add_argument("--family", choices=curvefit.FAMILIES + ("all",), default="all")

    g = groups.add_parser("column", help="shaft geometry").add_subparsers(dest="cmd", required=True)
    for name in ("radius", "entasis", "mesh"):
        p = sub(g, name)
        p.add_argument("--profile", help="c0,c1,c2,h (default: the bundled preset)")
        if name == "radius":
            p.add_argument("--z", type=float, required=True)
        if name == "mesh":
            p.add_argument("--n-theta", type=int, default=120)
            p.add_argument("--n-z", type=int, default=41)
            p.add_argument("--no-flutes", action="store_true")
            p.add_argument("--full-width-norm", action="store_true",
                           help="normalise the flute law over the full pitch")

    g = groups.add_parser("perceive", help="perception thresholds").add_subparsers(dest="cmd", required=True)
    for name in ("sagitta", "detect"):
        p = sub(g, name)
        p.add_argument("--distance", type=float, required=True, help="m")
        p.add_argument("--threshold", help="angle with unit, e.g. 420arcsec (default from config)")
        if name == "detect":
            p.add_argument("--side", choices=stylobate.SIDES, default="east")
    p = sub(g, "letters", help="letter height for a target visual angle")
    p.add_argument("--H", type=float, required=True, help="height above eye level, m")
    p.add_argument("--D", type=float, required=True, help="horizontal distance, m")
    p.add_argument("--theta", required=True, help="angle with unit")
    p = sub(g, "equalize", help="distance where two text rows look equally tall")
    for k in ("H1", "h1", "H2", "h2"):
        p.add_argument(f"--{k}", type=float, required=True)
    p = sub(g, "tilt", help="convergence height of inward-leaning columns")
    p.add_argument("--half-span", type=float, required=True, help="m")
    p.add_argument("--tilt", default="0.4deg", help="angle with unit")
    p = sub(g, "bhr", help="expected body/head ratio")
    p.add_argument("--stature", type=float, required=True, help="cm")

    p = groups.add_parser("drain", parents=[common], help="rain film drainage time")
    p.add_argument("--slope-deg", type=float, required=True)
    p.add_argument("--h0-mm", type=float, required=True)
    p.add_argument("--L", type=float, required=True, help="runoff length, m")
    p.add_argument("--nu", type=float, default=physics.NU_WATER_20C, help="kinematic viscosity, m^2/s")

    p = groups.add_parser("buckle", parents=[common], help="Euler buckling of a shaft")
    p.add_argument("--E", type=float, required=True, help="Pa")
    p.add_argument("--L", type=float, required=True, help="m")
    p.add_argument("--r", type=float, required=True, help="m")
    p.add_argument("--crush", type=float, default=physics.MARBLE_CRUSH, help="Pa")

    g = groups.add_parser("visibility", help="corner columns against the sky").add_subparsers(
        dest="cmd", required=True)
    for name in ("classify", "map"):
        p = sub(g, name)
        p.add_argument("--rays", type=int, default=visibility.DEFAULT_RAYS)
        p.add_argument("--radius", type=float, help="corner column radius, m")
        p.add_argument("--model", choices=("peristyle", "solid"), default="peristyle")
        if name == "classify":
            p.add_argument("--x", type=float, required=True)
            p.add_argument("--y", type=float, required=True)
            p.add_argument("--facade", choices=tuple(visibility.FACADES), default="east")
        else:
            p.add_argument("--cell", type=float, default=1.0)
            p.add_argument("--extent", help="xmin,xmax,ymin,ymax in platform coordinates")
            p.add_argument("--facade", choices=tuple(visibility.FACADES), default="east",
                           help="facade whose class codes go to the CSV")
            p.add_argument("--svg", help="also write a map figure")

    g = groups.add_parser("render", help="SVG figures").add_subparsers(dest="cmd", required=True)
    p = sub(g, "facade")
    p.add_argument("--columns", type=int, default=8)
    p.add_argument("--profile")
    p.add_argument("--side", choices=stylobate.SIDES, default="east")
    p.add_argument("--tilt", type=float, default=0.4, help="deg")
    p.add_argument("--scale", type=float, default=10.0, help="px per m")
    p.add_argument("--exaggeration", type=float, default=1.0)
    p.add_argument("--flat", action="store_true", help="straight horizontals")
    p.add_argument("--no-entasis", action="store_true")
    p.add_argument("--axes", action="store_true")
    p.add_argument("--pair", action="store_true", help="curved and straight variants, seeded order")
    p = sub(g, "illusion")
    p.add_argument("--kind", choices=render.ILLUSION_KINDS, default="hering")
    p.add_argument("--n", type=int, default=24)
    p.add_argument("--angles", default="10,80", help="lo,hi degrees")
    p.add_argument("--offset", type=float, default=60.0, help="target line offset, px")
    p = sub(g, "pair")
    p.add_argument("--p1", help="c0,c1,c2,h (default: bundled preset)")
    p.add_argument("--p2", help="c0,c1,c2,h (default: straight taper of p1)")
    p.add_argument("--scale", type=float, default=100.0)
    return parser


HANDLERS = {
    "stylobate": cmd_stylobate, "column": cmd_column, "perceive": cmd_perceive, "drain": cmd_drain,
    "buckle": cmd_buckle, "visibility": cmd_visibility, "render": cmd_render,
}
_NOT_PARAMS = {"group", "cmd", "json", "out", "preset", "seed", "config"}


def _config(args) -> Config:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    for k in ("preset", "seed", "out", "json"):
        v = getattr(args, k)
        if v is not None:
            data[k] = v
    return Config.from_mapping(data)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = _config(args)
    except UsageError as e:
        parser.print_usage(stderr)
        stderr.write(f"archrefine: error: {e}\n")
        return 2
    command = args.group + (f" {args.cmd}" if getattr(args, "cmd", None) else "")
    params = {k: v for k, v in vars(args).items() if k not in _NOT_PARAMS}
    rep = Report(command, cfg, params)
    try:
        HANDLERS[args.group](args, rep)
    except UsageError as e:
        parser.print_usage(stderr)
        stderr.write(f"archrefine: error: {e}\n")
        return 2
    except (ValueError, ArithmeticError, OSError) as e:
        stderr.write(f"archrefine: {type(e).__name__}: {e}\n")
        return 1
    rep.emit(stdout)
    return 0


def main() -> None:
    sys.exit(run())
