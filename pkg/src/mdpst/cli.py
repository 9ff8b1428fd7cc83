"""Command-line entry point: ``mdpst <subcommand> ...``.

Exit codes: 0 success, 1 validation or file error, 2 usage error.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import jsonio
from .automata import (
    AutomatonError,
    Dra,
    automaton_to_dict,
    fixture_dra,
    fixture_ldba,
    load_automaton,
    validate_dra,
    validate_ldba,
)
from .hexworld import HexConfig, default_layout, generate_hexworld, load_layout, ORIENT
from .model import ModelError, load_model, loads_json, model_from_dict, model_to_dict, validate_model
from .montecarlo import SimConfig, simulate
from .oracle import OracleError, brute_force_value
from .product import build_product, build_product_dra, load_product, product_to_dict, to_dot
from .synthesis import MdpstStrategy, StrategyError, solve
from .winning_region import compute_winning_region, winning_region_rabin

PERSIST_AVOID_GROUPS = [["b1", "b2"], ["b3"], ["b4", "b5"]]


def _automaton(spec: str):
    """A file path, or ``fixture:<kind>[:<atoms>]`` for the built-in automata.

    ``fixture:persist_avoid`` and ``fixture:persist_avoid_dra`` use goal
    groups {b1,b2}, {b3}, {b4,b5} and avoid ``obs``; ``fixture:gf:a`` and
    ``fixture:gf_conj:a,b`` take atoms.
    """
    if not spec.startswith("fixture:"):
        return load_automaton(spec)
    parts = spec.split(":")
    kind = parts[1]
    if kind == "persist_avoid":
        return fixture_ldba("persist_avoid", PERSIST_AVOID_GROUPS, "obs")
    if kind == "persist_avoid_dra":
        return fixture_dra("persist_avoid", PERSIST_AVOID_GROUPS, "obs")
    if kind == "gf" and len(parts) == 3:
        return fixture_ldba("gf", parts[2])
    if kind == "gf_conj" and len(parts) == 3:
        return fixture_ldba("gf_conj", parts[2].split(","))
    raise ModelError(f"unknown automaton fixture {spec!r}")


def _product(model, aut):
    return build_product_dra(model, aut) if isinstance(aut, Dra) else build_product(model, aut)


def cmd_validate(args):
    with open(args.path) as f:
        text = f.read()
    if text.lstrip().startswith("HOA:"):
        data = None
    else:
        data = loads_json(text, args.path)
    if data is None or (isinstance(data, dict) and "kind" in data):
        a = load_automaton(args.path)
        rep = validate_dra(a) if isinstance(a, Dra) else validate_ldba(a)
        print(f"{a!r}")
        print(rep)
        return 0 if rep.ok else 1
    rep = validate_model(model_from_dict(data, check=False))
    print(rep)
    return 0 if rep.ok else 1


def cmd_product(args):
    model = load_model(args.model)
    aut = _automaton(args.automaton)
    p = _product(model, aut)
    jsonio.dump(product_to_dict(p), args.output)
    if args.dot:
        with open(args.dot, "w") as f:
            f.write(to_dot(p))
    print(f"product: {p.n_states} states, {p.n_transitions()} transitions")
    return 0


def cmd_wr(args):
    p = load_product(args.product)
    if p.is_rabin:
        w = winning_region_rabin(p, args.theta, args.classifier, args.kappa)
    else:
        w = compute_winning_region(p, args.theta, args.classifier, args.kappa)
    d = w.to_dict()
    d["names"] = [p.state_name(s) for s in sorted(w.states)]
    jsonio.dump(d, args.output)
    print(f"winning region: {len(w.states)} states after {w.iterations} iterations")
    return 0


def cmd_synth(args):
    if args.product:
        model, aut = load_product(args.product), None
    else:
        if not (args.model and args.automaton):
            raise _Usage("synth needs --product, or both --model and --automaton")
        model, aut = load_model(args.model), _automaton(args.automaton)
    report, strat = solve(model, aut, theta=args.theta, classifier=args.classifier,
                          kappa=args.kappa, round_robin=args.round_robin)
    jsonio.dump(strat.to_dict(), args.output)
    if args.report:
        jsonio.dump(report.to_dict(), args.report)
    print(f"value {report.value:.6g}; winning region {report.wr_size} of "
          f"{report.product_states} product states")
    return 0


def cmd_hexworld(args):
    lay = load_layout(args.layout) if args.layout else default_layout(args.nx, args.ny)
    if args.layout and (lay.nx, lay.ny) != (args.nx, args.ny):
        raise ModelError("layout size does not match --nx/--ny")
    m = generate_hexworld(HexConfig(lay))
    jsonio.dump(model_to_dict(m), args.output)
    if args.layout_out:
        jsonio.dump(lay.to_dict(), args.layout_out)
    print(f"hexworld {lay.nx}x{lay.ny}: {m.n_states} states, obstacles {sorted(lay.obstacles)}")
    return 0


def cmd_simulate(args):
    model = load_model(args.model)
    aut = _automaton(args.automaton)
    with open(args.strategy) as f:
        strat = MdpstStrategy.from_dict(loads_json(f.read(), args.strategy))
    cfg = SimConfig(runs=args.runs, horizon=args.steps, seed=args.seed, nature=args.nature,
                    windows=(args.windows[0], args.windows[1]),
                    trajectory_run=0 if args.trajectory else None)
    values = ranks = None
    if args.nature == "adversarial":
        report, _ = solve(model, aut, theta=args.theta)
        ps = report.product_strategy
        values = ps.values.values
        ranks = dict(ps.prefix_rank)
        ranks.update(ps.ranks)
    rep = simulate(model, aut, strat, cfg, values=values, ranks=ranks)
    jsonio.dump(rep.to_dict(), args.output)
    if args.csv:
        rep.write_csv(args.csv)
    if args.trajectory:
        names = model.names
        hexlike = all(n and n.startswith("q") and "," in n for n in names)
        cells = (lambda s: (s // 4, ORIENT[s % 4])) if hexlike else None
        rep.write_trajectory(args.trajectory, cells)
    print(f"satisfied {sum(v.satisfied for v in rep.verdicts)}/{len(rep.verdicts)} "
          f"({rep.satisfied_fraction:.4f})")
    return 0


def cmd_oracle(args):
    p = load_product(args.product)
    targets = args.targets if args.targets else None
    v = brute_force_value(p, args.objective, targets)
    out = {"objective": args.objective, "value": v,
           "targets": sorted(p.accepting if targets is None else targets)}
    if args.output:
        jsonio.dump(out, args.output)
    print(f"value {v:.12g}")
    return 0


def cmd_automaton(args):
    a = _automaton(args.automaton)
    jsonio.dump(automaton_to_dict(a), args.output)
    print(f"{a!r}")
    return 0


class _Usage(Exception):
    pass


def build_parser():
    ap = argparse.ArgumentParser(prog="mdpst", description="Robust LTL synthesis for MDPSTs")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model (or automaton) JSON file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    def solver_opts(p):
        p.add_argument("--theta", type=float, default=1e-3)
        p.add_argument("--classifier", choices=("qualitative", "numeric"), default="qualitative")
        p.add_argument("--kappa", type=float, default=1e-2)

    p = sub.add_parser("product", help="build the product of a model and an automaton")
    p.add_argument("--model", required=True)
    p.add_argument("--automaton", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--dot")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("wr", help="winning region of a product")
    p.add_argument("--product", required=True)
    p.add_argument("-o", "--output", required=True)
    solver_opts(p)
    p.set_defaults(func=cmd_wr)

    p = sub.add_parser("synth", help="synthesize an optimal robust strategy")
    p.add_argument("--model")
    p.add_argument("--automaton")
    p.add_argument("--product")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report")
    p.add_argument("--round-robin", action="store_true")
    solver_opts(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("hexworld", help="generate a hexagonal grid-world model")
    p.add_argument("--nx", type=int, required=True)
    p.add_argument("--ny", type=int, required=True)
    p.add_argument("--layout")
    p.add_argument("--layout-out")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_hexworld)

    p = sub.add_parser("simulate", help="Monte Carlo evaluation of a strategy")
    p.add_argument("--model", required=True)
    p.add_argument("--automaton", required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--nature", choices=("random", "adversarial"), default="random")
    p.add_argument("--windows", type=int, nargs=2, default=(5, 200), metavar=("M", "W"))
    p.add_argument("--theta", type=float, default=1e-3)
    p.add_argument("--csv")
    p.add_argument("--trajectory")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="brute-force value of a small product")
    p.add_argument("--product", required=True)
    p.add_argument("--objective", choices=("buchi", "reach"), default="buchi")
    p.add_argument("--targets", type=int, nargs="*")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("automaton", help="write an automaton (file or fixture) as JSON")
    p.add_argument("--automaton", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_automaton)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except _Usage as e:
        parser.print_usage(sys.stderr)
        print(f"mdpst: error: {e}", file=sys.stderr)
        return 2
    except (ModelError, AutomatonError, OracleError, StrategyError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
