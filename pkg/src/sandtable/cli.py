"""Command-line front end.

Subcommands: run (one simulation), eoc (convergence table), wellbalance
(single-step steady-state errors), t41-check (single-step drift vs its
closed form).  A plain key=value file can seed any flag via --config;
explicit flags win.  Exit codes: 0 success, 2 configuration error, 3 halted
on a violated time-step condition.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import CFLError, ConfigError
from .experiments import (
    RunConfig,
    eoc_experiment_1d,
    eoc_experiment_2d,
    run,
    single_step_drift_check,
    wellbalance_experiment,
    write_eoc_tables,
)
from .grids import SchemeConfig
from .stateio import FLOAT_FMT, _write_rows


def _parse_source(text: str):
    """'const:V' or 'rect:V:x0,y0,x1,y1[;...]' -> (value, rect list)."""
    parts = text.split(":")
    if parts[0] == "const" and len(parts) == 2:
        return float(parts[1]), []
    if parts[0] == "rect" and len(parts) == 3:
        rects = []
        for chunk in parts[2].split(";"):
            coords = [float(c) for c in chunk.split(",")]
            if len(coords) != 4:
                raise ConfigError(f"rectangle needs 4 coordinates, got {chunk!r}")
            rects.append(tuple(coords))
        return float(parts[1]), rects
    raise ConfigError(f"cannot parse source spec {text!r}")


def _parse_meshes(text: str):
    return [int(tok) for tok in text.split(",") if tok]


def _load_config_file(path):
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line {line!r} (expected key=value)")
        key, val = line.split("=", 1)
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _add_common(p):
    p.add_argument("--scheme", choices=["fo", "so", "so-theta"], default="so-theta")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--lambda", dest="lam", type=float, default=0.45)
    p.add_argument("--table", choices=["open", "partial"], default="open")
    p.add_argument("--config", default=None, help="key=value file; flags override it")


def build_parser():
    parser = argparse.ArgumentParser(prog="sandtable",
                                     description="Finite-volume sandpile solvers")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one simulation and write CSV artifacts")
    _add_common(p)
    p.add_argument("--dim", type=int, choices=[1, 2], default=1)
    p.add_argument("--M", type=int, default=100)
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--n-steps", type=int, default=None)
    p.add_argument("--source", default="const:0.5")
    p.add_argument("--oracle", choices=["f1_unit", "f_half", "open2d", "partial2d"],
                   default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--history", action="store_true")
    p.add_argument("--no-cfl-check", action="store_true",
                   help="warn instead of halting when a step condition fails")

    p = sub.add_parser("eoc", help="convergence table over a halving mesh family")
    _add_common(p)
    p.add_argument("--dim", type=int, choices=[1, 2], default=1)
    p.add_argument("--t-final", type=float, required=True)
    p.add_argument("--meshes", default="40,80,160,320,640")
    p.add_argument("--source", default="const:0.5")
    p.add_argument("--reference-M", type=int, default=None,
                   help="1D only: fine-mesh SO reference (default: oracle)")
    p.add_argument("--oracle", choices=["f1_unit", "f_half"], default=None)
    p.add_argument("--out", default="eoc_out")

    p = sub.add_parser("wellbalance", help="single-step errors from the steady state")
    _add_common(p)
    p.add_argument("--meshes", default="50,100,200,400")
    p.add_argument("--source", default="const:0.5")
    p.add_argument("--out", default=None)

    p = sub.add_parser("t41-check", help="single-step drift vs closed form")
    _add_common(p)
    p.add_argument("--M", default="10,20,50")
    p.add_argument("--thetas", default="0.25,0.5")
    p.add_argument("--lambdas", default="0.3,0.45")
    p.add_argument("--tol", type=float, default=1e-12)
    return parser


def _apply_config_file(parser, argv):
    # peek for --config, then seed parser defaults from the file
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv[1:])
    if known.config is None:
        return argv
    values = _load_config_file(known.config)
    flags = []
    for key, val in values.items():
        flag = "--" + key.replace("_", "-")
        if val.lower() in ("true", "false"):
            if val.lower() == "true":
                flags.append(flag)
        else:
            flags.extend([flag, val])
    # file-provided flags go first so explicit argv wins
    return [argv[0], argv[1]] + flags + argv[2:]


def _cmd_run(args):
    value, rects = _parse_source(args.source)
    cfg = RunConfig(
        dim=args.dim,
        scheme=SchemeConfig(kind=args.scheme, theta=args.theta, lam=args.lam,
                            table=args.table),
        M=args.M,
        t_final=args.t_final,
        n_steps=args.n_steps,
        source_value=value,
        source_rects=rects,
        oracle=args.oracle,
        outdir=args.out,
        history=args.history,
        enforce_cfl=not args.no_cfl_check,
    )
    report = run(cfg)
    for key in sorted(report):
        print(f"{key} = {report[key]}")
    return 0


def _cmd_eoc(args):
    value, rects = _parse_source(args.source)
    if rects:
        raise ConfigError("EOC experiments use constant sources")
    meshes = _parse_meshes(args.meshes)
    schemes = ("fo", "so", "so-theta")
    if args.dim == 1:
        tables = eoc_experiment_1d(meshes, args.t_final, args.lam, theta=args.theta,
                                   source_value=value, schemes=schemes,
                                   reference_M=args.reference_M, oracle=args.oracle)
    else:
        tables = eoc_experiment_2d(meshes, args.t_final, args.lam, theta=args.theta,
                                   source_value=value, schemes=schemes)
    paths = write_eoc_tables(tables, args.out)
    for kind in schemes:
        print(f"# {kind} -> {paths[kind]}")
        print("h, err_u, eoc_u, err_v, eoc_v")
        for row in tables[kind]:
            # display rounds to 4 significant digits; the CSV keeps 17
            print(", ".join("%.4g" % x for x in row))
    return 0


def _cmd_wellbalance(args):
    value, _ = _parse_source(args.source)
    meshes = _parse_meshes(args.meshes)
    tables = wellbalance_experiment(meshes=meshes, lam=args.lam, theta=args.theta,
                                    source_value=value)
    rows = []
    for kind, entries in tables.items():
        print(f"# {kind}")
        print("dx, err_u_sup, err_v_l1")
        for dx, eu, ev in entries:
            print(", ".join(FLOAT_FMT % x for x in (dx, eu, ev)))
            rows.append((dx, eu, ev))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for kind, entries in tables.items():
            _write_rows(out / f"wellbalance_{kind.replace('-', '_')}.csv",
                        ["dx", "err_u_sup", "err_v_l1"], entries)
    return 0


def _cmd_t41(args):
    worst, rows = single_step_drift_check(
        M_values=_parse_meshes(args.M),
        thetas=[float(t) for t in args.thetas.split(",")],
        lams=[float(t) for t in args.lambdas.split(",")],
    )
    print("M, theta, lambda, max|dv - closed form|, max|du|")
    for M, theta, lam, ev, eu in rows:
        print(f"{M}, {theta}, {lam}, {FLOAT_FMT % ev}, {FLOAT_FMT % eu}")
    print(f"worst = {FLOAT_FMT % worst}")
    if worst > args.tol:
        print(f"FAIL: worst mismatch {worst:.3e} exceeds tolerance {args.tol:.3e}",
              file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    argv = list(sys.argv if argv is None else argv)
    if len(argv) < 2:
        build_parser().parse_args(argv[1:])  # emits usage, exits 2
        return 2
    try:
        argv = _apply_config_file(build_parser(), argv)
        args = build_parser().parse_args(argv[1:])
        handler = {
            "run": _cmd_run,
            "eoc": _cmd_eoc,
            "wellbalance": _cmd_wellbalance,
            "t41-check": _cmd_t41,
        }[args.command]
        return handler(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except CFLError as exc:
        print(f"time-step halt: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
