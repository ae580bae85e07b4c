"""Command-line entry point: ``dicke-star <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import ConfigError, ExperimentConfig, fit_rows, read_csv, run, write_csv, FIT_COLUMNS
from .hamiltonian import SpinStarParams, build_block, write_matrix_csv
from .presets import PRESETS
from .spectra import diagonalize, ground_manifold

log = logging.getLogger("dicke_star")

# subcommand -> experiment name in the config
_COMMANDS = {
    "gap-scan": "gap-scan",
    "npc-map": "npc-map",
    "entanglement": "static-entanglement",
    "edd-gap": "edd-gap",
    "dynamics": "dynamics",
    "fit": "fit-report",
    "oracle-check": "oracle-check",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--workers", type=int, default=None, help="process pool size")
    p.add_argument("--seed", type=int, default=None, help="seed recorded in every row")
    p.add_argument("--emit-plot-script", action="store_true",
                   help="also write a matplotlib script next to each CSV")
    p.add_argument("-v", "--verbose", action="store_true")


def _params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n0", type=int, default=1)
    p.add_argument("--np", type=int, default=2, dest="np_")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--sign", type=int, default=1, choices=(1, -1))
    p.add_argument("--h", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dicke-star",
                                 description="Exact diagonalization and entanglement of XYZ spin-star networks.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="diagonalize one block and print its spectrum")
    _params(sp)
    _common(sp)
    sp.add_argument("--deg-tol", type=float, default=1e-4)
    sp.add_argument("--dump-matrix", metavar="PATH", help="write the block as (row, col, value) CSV")
    sp.add_argument("--levels", type=int, default=10, help="number of levels to print")

    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run a {_COMMANDS[name]} config")
        p.add_argument("--config", required=name not in ("oracle-check",), help="JSON config file")
        _common(p)

    rp = sub.add_parser("reproduce", help="run a canned figure sweep with fit report")
    rp.add_argument("figure", choices=sorted(PRESETS))
    _common(rp)
    return ap


def _load(args, experiment: str) -> ExperimentConfig:
    d = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            d = json.load(fh)
    d.setdefault("experiment", experiment)
    if d["experiment"] != experiment:
        raise ConfigError([f"experiment: config says {d['experiment']!r} but subcommand runs {experiment!r}"])
    if args.seed is not None:
        d["seed"] = args.seed
    if args.workers is not None:
        d["workers"] = args.workers
    d.setdefault("output", experiment)
    return ExperimentConfig.from_dict(d)


def _spectrum(args) -> int:
    p = SpinStarParams(args.n0, args.np_, args.gamma, args.delta, args.sign, args.h)
    block = build_block(p)
    if args.dump_matrix:
        write_matrix_csv(block, args.dump_matrix)
    spec = diagonalize(block)
    man = ground_manifold(spec, p, args.deg_tol)
    print(f"# n0={p.n0} np={p.np} gamma={p.gamma} delta={p.delta} sign={p.sign} h={p.h} dim={block.dim}")
    print(f"# ground: {man.kind}  gap={man.gap:.6e}")
    for i, e in enumerate(spec.eigenvalues[:args.levels]):
        print(f"{i}\t{e:.12f}")
    return 0


def _reproduce(args) -> int:
    runs, fits = PRESETS[args.figure]()
    out = Path(args.out) / args.figure
    csvs = {}
    for name, d in runs:
        d = dict(d, output=name, seed=args.seed or 0)
        if args.workers:
            d["workers"] = args.workers
        cfg = ExperimentConfig.from_dict(d)
        log.info("running %s/%s", args.figure, name)
        csvs[name] = run(cfg, out, args.emit_plot_script)[0]
    rows = []
    for f in fits:
        rows += fit_rows(read_csv(csvs[f["source"]]), [f], args.seed or 0)
    path = write_csv(out / "fits.csv", rows, FIT_COLUMNS + ["error"],
                     {"tool": f"dicke_star {__version__}", "experiment": f"reproduce {args.figure}"})
    for r in rows:
        vals = " ".join("   -  " if r.get(k) is None else f"{r[k]:+.4f}" for k in ("a", "b", "m"))
        ref = " ".join("   -  " if r.get(k) is None else f"{r[k]:+.4f}" for k in ("ref_a", "ref_b", "ref_m"))
        print(f"{r['figure_tag']:<22} {r['model']:<9} fit {vals}   ref {ref}")
    print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(all="ignore")
    try:
        if args.command == "spectrum":
            return _spectrum(args)
        if args.command == "reproduce":
            return _reproduce(args)
        cfg = _load(args, _COMMANDS[args.command])
        paths = run(cfg, args.out, args.emit_plot_script)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(f"wrote {p}")
    if cfg.experiment == "oracle-check":
        failed = [r for r in read_csv(paths[0]) if r["passed"] != "true"]
        print(f"oracle check: {'all passed' if not failed else f'{len(failed)} failures'}")
        return 1 if failed else 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
