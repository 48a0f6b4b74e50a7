"""Command-line entry point: ``qmasat <subcommand> [options]``.

Verdicts are data: the exit status is nonzero only when a command fails.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import harness, optics, sat
from .errors import QmaSatError
from .provers import parse_strategy
from .states import parse_state
from .verifier import enumerate_matchings, swap_reject_prob


GLOBAL_DEFAULTS = {"seed": 0, "shots": 10_000, "k": 3, "format": "csv", "out": None}


def _global_flags(defaults: bool) -> argparse.ArgumentParser:
    # Subcommand copies suppress their defaults so that flags given before the
    # subcommand name are not overwritten.
    d = (lambda name: GLOBAL_DEFAULTS[name]) if defaults else (lambda name: argparse.SUPPRESS)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=d("seed"), help="64-bit seed for sampling runs")
    p.add_argument("--shots", type=int, default=d("shots"), help="number of sampled rounds")
    p.add_argument("--k", type=int, default=d("k"), help="copies per Merlin")
    p.add_argument("--format", choices=("csv", "json"), default=d("format"))
    p.add_argument("--out", type=Path, default=d("out"), help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmasat", description=__doc__, parents=[_global_flags(True)])
    common = _global_flags(False)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("grid", parents=[common], help="15 x 64 clause-projection grid")

    p = sub.add_parser("theta-sweep", parents=[common], help="uniformity reject vs theta")
    p.add_argument("--matching-index", type=int, default=0)
    p.add_argument("--ks", default="3,4,5,6", help="comma-separated copy numbers")
    p.add_argument("--points", type=int, default=50)

    p = sub.add_parser("verify", parents=[common], help="run a seeded protocol scenario")
    p.add_argument("--scenario", choices=sorted(harness.builtin_scenarios()), help="built-in scenario")
    p.add_argument("--instance", default="builtin:phi1", help="path, builtin:<name> or census:<index>")
    p.add_argument("--strategy", default="honest")
    p.add_argument("--test", choices=harness.TESTS, default="composite")
    p.add_argument("--matching-index", type=int, help="fix the uniformity matching")
    p.add_argument("--weights", default="0.25,0.25,0.25,0.25")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("census", parents=[common], help="satisfiability census of m-clause instances")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--m", type=int, default=8)

    p = sub.add_parser("swap", parents=[common], help="optical swap test between two states")
    p.add_argument("--state-a", required=True)
    p.add_argument("--state-b", required=True)
    p.add_argument("--gamma", type=float, default=1.0)

    p = sub.add_parser("hom-scan", parents=[common], help="swap test against photon delay")
    p.add_argument("--state-a", required=True)
    p.add_argument("--state-b", required=True)
    p.add_argument("--delays", default="-3:3:61", help="start:stop:count")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--width", type=float, default=2.0)
    p.add_argument("--visibility", type=float, default=1.0)

    p = sub.add_parser("reduce", parents=[common], help="3-SAT (DIMACS) to 2-out-of-4 SAT (JSON)")
    p.add_argument("--cnf", type=Path, required=True)
    p.add_argument("--check", action="store_true", help="brute-force both sides and report")

    p = sub.add_parser("matchings", parents=[common], help="list perfect matchings")
    p.add_argument("--n", type=int, default=6)
    return parser


def load_instance(source: str) -> sat.SatInstance24:
    if source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        if name not in harness.INSTANCES:
            raise QmaSatError(f"unknown built-in instance {name!r}")
        return harness.INSTANCES[name]
    if source.startswith("census:"):
        return sat.census_instance(6, 8, int(source.split(":", 1)[1]))
    return sat.parse_instance(Path(source).read_text())


def _emit(args, header, rows):
    text = harness.rows_to_csv(header, rows) if args.format == "csv" else harness.rows_to_json(header, rows)
    _write(args, text)


def _write(args, text):
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)


def cmd_grid(args):
    _emit(args, ("clause", "assignment", "p_c", "satisfied"), harness.grid_rows())


def cmd_theta_sweep(args):
    m = enumerate_matchings(6)[args.matching_index]
    ks = [int(k) for k in args.ks.split(",")]
    curves = harness.theta_sweep(m, ks, np.linspace(0, math.pi / 2, args.points))
    rows = [(float(t), k, float(curves[k][i])) for k in ks for i, t in enumerate(curves["theta"])]
    _emit(args, ("theta", "k", "reject"), rows)


def cmd_verify(args):
    if args.scenario:
        cfg = harness.builtin_scenarios(args.seed, args.shots, args.workers)[args.scenario]
        if args.k != cfg.k:
            cfg = dataclasses.replace(cfg, k=args.k)
    else:
        inst = load_instance(args.instance)
        matching = None
        if args.matching_index is not None:
            matching = enumerate_matchings(inst.n_vars)[args.matching_index]
        cfg = harness.ScenarioConfig(
            name=args.instance,
            instance=inst,
            strategy=parse_strategy(args.strategy, inst.n_vars),
            test=args.test,
            k=args.k,
            weights=tuple(float(w) for w in args.weights.split(",")),
            seed=args.seed,
            shots=args.shots,
            matching=matching,
            workers=args.workers,
        )
    _write(args, harness.run_scenario(cfg).render(args.format))


def cmd_census(args):
    c = sat.census(args.n, args.m)
    hist = {}
    for cnt in c.solution_counts:
        hist[cnt] = hist.get(cnt, 0) + 1
    if args.format == "json":
        _write(args, json.dumps({"n": args.n, "m": args.m, "total": c.total, "satisfiable": c.satisfiable,
                                 "solution_histogram": {str(k): v for k, v in sorted(hist.items())}}) + "\n")
    else:
        _emit(args, ("n", "m", "total", "satisfiable"), [(args.n, args.m, c.total, c.satisfiable)])


def cmd_swap(args):
    a = parse_state(args.state_a)
    b = parse_state(args.state_b, a.size)
    res = optics.two_photon_channels(a, b, optics.PhotonModel(args.gamma))
    if args.format == "json":
        _write(args, json.dumps({
            "exact_reject": swap_reject_prob(a, b),
            "reject": res.reject,
            "accept_registered": res.accept_registered,
            "accept_corrected": res.accept_corrected,
            "same_detector": res.same_detector,
            "channels": [dict(zip(("channel", "d1", "d2", "class", "probability"), r)) for r in res.rows()],
        }, indent=1) + "\n")
    else:
        _write(args, res.to_csv())


def cmd_hom_scan(args):
    start, stop, count = args.delays.split(":")
    delays = np.linspace(float(start), float(stop), int(count))
    a = parse_state(args.state_a)
    b = parse_state(args.state_b, a.size)
    model = optics.PhotonModel(1.0, optics.gaussian_sinc_profile(args.sigma, args.width, args.visibility))
    rows = optics.hom_scan(a, b, delays, model)
    header = ("delay", "gamma", "reject", "accept_registered", "accept_corrected", "same_detector")
    _emit(args, header, [tuple(r[h] for h in header) for r in rows])


def cmd_reduce(args):
    cnf = sat.parse_cnf(args.cnf.read_text())
    inst = sat.reduce_3sat(cnf)
    if not args.check:
        _write(args, sat.serialize_instance(inst) + "\n")
        return
    rows = [(cnf.n_vars, len(cnf.clauses), inst.n_vars, len(inst.clauses),
             sat.is_satisfiable(cnf), sat.is_satisfiable(inst))]
    _emit(args, ("cnf_vars", "cnf_clauses", "vars", "clauses", "cnf_satisfiable", "satisfiable"), rows)


def cmd_matchings(args):
    rows = [(i, str(m)) for i, m in enumerate(enumerate_matchings(args.n))]
    _emit(args, ("index", "matching"), rows)


COMMANDS = {
    "grid": cmd_grid,
    "theta-sweep": cmd_theta_sweep,
    "verify": cmd_verify,
    "census": cmd_census,
    "swap": cmd_swap,
    "hom-scan": cmd_hom_scan,
    "reduce": cmd_reduce,
    "matchings": cmd_matchings,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (QmaSatError, OSError, ValueError) as exc:
        print(f"qmasat {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
