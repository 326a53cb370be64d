"""Command-line interface.

Examples
--------
::

    hextop run --problem mbb --hnex 60 --hney 20 --rfill 2.4*sqrt3 --volfrac 0.5 --penal 3 --ft 1
    hextop run --config mbb.cfg --out results/
    hextop mesh --hnex 4 --hney 3 mesh.csv
"""
from __future__ import annotations

import argparse
import os
import shutil
import sys
import tempfile
import traceback
from pathlib import Path

from . import __version__
from .config import KEYS, RunConfig, parse_radius, read_config_file
from .problems import PROBLEMS


def _radius(text):
    try:
        return parse_radius(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hextop", description="Topology optimisation on honeycomb meshes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="optimise a benchmark problem",
                       description="Minimise compliance under a volume constraint.")
    d = RunConfig()
    r.add_argument("--config", metavar="PATH",
                   help="flat key=value file with the same keys as the flags; flags override it")
    r.add_argument("--problem", choices=PROBLEMS,
                   help=f"benchmark problem (default {d.problem})")
    r.add_argument("--problem-file", metavar="JSON", dest="problem_file",
                   help="custom loads/supports/passive regions; overrides --problem")
    r.add_argument("--hnex", type=int, help=f"hexagons in x, >= 1 (default {d.hnex})")
    r.add_argument("--hney", type=int, help=f"hexagon rows in y, >= 1 (default {d.hney})")
    r.add_argument("--rfill", type=_radius,
                   help="filter radius in edge lengths, > 0; accepts '<k>*sqrt3' "
                        "(default 2.4*sqrt3)")
    r.add_argument("--volfrac", type=float, help=f"volume fraction in (0, 1] (default {d.volfrac})")
    r.add_argument("--penal", type=float, help=f"SIMP exponent, >= 1 (default {d.penal:g})")
    r.add_argument("--ft", type=int,
                   help=f"filter: 0 none, 1 sensitivity, 2 density (default {d.ft})")
    r.add_argument("--nu", type=float, help=f"Poisson ratio in [0, 0.5) (default {d.nu})")
    r.add_argument("--move", type=float, help=f"OC move limit, > 0 (default {d.move})")
    r.add_argument("--maxiter", type=int, help=f"iteration cap, >= 1 (default {d.maxiter})")
    r.add_argument("--change-tol", type=float, dest="change_tol",
                   help=f"stop when max design change drops below this, > 0 (default {d.change_tol})")
    r.add_argument("--out", dest="outdir", metavar="DIR",
                   help=f"output directory (default {d.outdir})")
    r.add_argument("--quiet", action="store_true", help="suppress per-iteration lines")

    m = sub.add_parser("mesh", help="write the mesh as CSV (1-based ids)")
    m.add_argument("--hnex", type=int, required=True)
    m.add_argument("--hney", type=int, required=True)
    m.add_argument("path")

    k = sub.add_parser("k0", help="write the 12x12 unit element stiffness as CSV")
    k.add_argument("--nu", type=float, default=0.3)
    k.add_argument("path")
    return p


def parse_args(argv=None) -> RunConfig:
    """Parse ``run`` arguments into a validated :class:`RunConfig`.

    Exits with a usage error listing every violated constraint.
    """
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command != "run":
        parser.error("parse_args handles the 'run' command only")
    return _config_from_namespace(parser, ns)


def _config_from_namespace(parser, ns) -> RunConfig:
    values = {}
    if ns.config:
        try:
            values.update(read_config_file(ns.config))
        except (OSError, ValueError) as exc:
            parser.error(f"config file: {exc}")
    values.update({k: v for k, v in vars(ns).items() if k in KEYS and v is not None})
    cfg = RunConfig(**values)
    errs = cfg.errors()
    if errs:
        parser.error("; ".join(errs))
    return cfg


def _origin(exc: BaseException) -> str:
    tb = exc.__traceback__
    mod = "hextop"
    while tb is not None:
        name = tb.tb_frame.f_globals.get("__name__", "")
        if name.startswith("hextop."):
            mod = name.split(".", 1)[1]
        tb = tb.tb_next
    return mod


def main(config: RunConfig, quiet: bool = False) -> int:
    """Run one optimisation and write history.csv, density.csv and design.svg.

    Files are written to a scratch directory and moved into place only when
    everything succeeded.
    """
    from .export import render_svg, write_density_csv, write_history_csv
    from .optimizer import log_line, run

    outdir = Path(config.outdir)
    created = not outdir.exists()
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=".hextop-", dir=outdir))
    except OSError as exc:
        print(f"error [cli]: cannot use output directory {outdir}: {exc}", file=sys.stderr)
        return 1
    try:
        cb = None if quiet else (lambda rec: print(log_line(rec), flush=True))
        mesh, problem, state = run(config, callback=cb)
        write_history_csv(state.history, tmp / "history.csv")
        write_density_csv(mesh, state.xphys, tmp / "density.csv")
        render_svg(mesh, state.xphys, tmp / "design.svg")
        for name in ("history.csv", "density.csv", "design.svg"):
            os.replace(tmp / name, outdir / name)
    except Exception as exc:  # noqa: BLE001 - reported with its module of origin
        print(f"error [{_origin(exc)}]: {exc}", file=sys.stderr)
        if os.environ.get("HEXTOP_DEBUG"):
            traceback.print_exc()
        shutil.rmtree(tmp, ignore_errors=True)
        if created:
            shutil.rmtree(outdir, ignore_errors=True)
        return 1
    shutil.rmtree(tmp, ignore_errors=True)
    vol = state.history[-1].volume_fraction
    print(f"final obj={state.c:.4f} vol={vol:.4f} iters={state.loop}", flush=True)
    return 0


def cli(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command == "run":
        return main(_config_from_namespace(parser, ns), quiet=ns.quiet)
    if ns.command == "mesh":
        from .honeymesh import build_mesh, write_mesh_csv
        try:
            write_mesh_csv(build_mesh(ns.hnex, ns.hney), ns.path)
        except (ValueError, OSError) as exc:
            print(f"error [honeymesh]: {exc}", file=sys.stderr)
            return 1
        return 0
    if ns.command == "k0":
        from .element import wachspress_k0, write_k0_csv
        try:
            write_k0_csv(wachspress_k0(ns.nu), ns.path)
        except (ValueError, OSError) as exc:
            print(f"error [element]: {exc}", file=sys.stderr)
            return 1
        return 0
    return 2


def entry():
    sys.exit(cli())


if __name__ == "__main__":
    entry()
