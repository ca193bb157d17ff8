"""Command-line entry point: ``circrep {build,verify,solve,certify,render}``.

Exit codes: 0 on success, 1 when a verification or certification does not
go through, 2 on usage errors (bad flags, unreadable or malformed input).
The global tolerance can be overridden with the ``CREP_EPS`` environment
variable.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import graphs
from .chains import DEFAULT_TAU, contradiction_certificate
from .errors import CircRepError, PreconditionError
from .representation import CircleSet, render_svg, verify_representation
from .solver import DEFAULT_MU, Assignment, build_constraint_system, solve_feasibility

BUILDERS = ("octahedron", "mini-gadget", "mini-bigadget", "m", "counterexample68")
SYSTEMS = {"induced": "induced", "symmetric": "symmetric", "single-chain": "single_chain_top"}


class UsageError(Exception):
    pass


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write_json(path: str, data: dict) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _print(data: dict) -> None:
    print(json.dumps(data, indent=2))


def cmd_build(args) -> int:
    extra = {}
    if args.graph == "octahedron":
        G = graphs.build_octahedron()
    elif args.graph == "mini-gadget":
        G, a = graphs.build_mini_gadget_octahedral()
        extra["attach"] = [a]
    elif args.graph == "mini-bigadget":
        G, a, b = graphs.build_mini_bigadget_octahedral()
        extra["attach"] = [a, b]
    elif args.graph == "m":
        G, labels, reds = graphs.build_base_multigraph_m()
        extra["red"] = reds
    else:
        G, instances = graphs.build_counterexample_68(args.variant)
        extra["instances"] = [inst.to_json() for inst in instances]
    _write_json(args.output, G.to_json())
    _print({"graph": args.graph, **graphs.validate(G).to_json(), **extra})
    return 0


def cmd_verify(args) -> int:
    cs = CircleSet.from_json(_read_json(args.circles))
    target = graphs.PlaneMultigraph.from_json(_read_json(args.graph))
    report = verify_representation(cs, target)
    _print(report.to_json())
    return 0 if report.ok else 1


def cmd_solve(args) -> int:
    system = build_constraint_system(SYSTEMS[args.system], mu=args.mu)
    result = solve_feasibility(system, seed=args.seed, restarts=args.restarts, iterations=args.iters)
    print(f"best residual: {result.residual:.6e}")
    data = result.to_json(args.system)
    if args.output:
        _write_json(args.output, data)
    else:
        _print(data)
    return 0


def cmd_certify(args) -> int:
    cfg = Assignment.from_json(_read_json(args.assignment)).to_config("symmetric")
    try:
        report = contradiction_certificate(cfg, args.tol)
    except PreconditionError as exc:
        print(f"{type(exc).__name__}: {exc}")
        return 1
    _print(report.to_json())
    return 0 if report.conflict else 1


def cmd_render(args) -> int:
    if args.circles:
        obj = CircleSet.from_json(_read_json(args.circles))
    else:
        obj = graphs.PlaneMultigraph.from_json(_read_json(args.graph))
    render_svg(obj, args.output)
    print(f"wrote {args.output}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="circrep", description="Circle representations of 4-regular plane graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build one of the named graphs and write its JSON")
    b.add_argument("graph", choices=BUILDERS)
    b.add_argument("--variant", choices=("gadget", "bigadget"), default="gadget")
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="check a circle set against a graph")
    v.add_argument("--circles", required=True)
    v.add_argument("--graph", required=True)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", help="multistart feasibility search on a tangency system")
    s.add_argument("--system", choices=tuple(SYSTEMS), required=True)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--restarts", type=int, default=20)
    s.add_argument("--iters", type=int, default=500)
    s.add_argument("--mu", type=float, default=DEFAULT_MU, help="minimum gap for strict inequalities")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("certify", help="contradiction certificate for a symmetric assignment")
    c.add_argument("--assignment", required=True)
    c.add_argument("--tol", type=float, default=DEFAULT_TAU)
    c.set_defaults(func=cmd_certify)

    r = sub.add_parser("render", help="write an SVG drawing")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--circles")
    src.add_argument("--graph")
    r.add_argument("-o", "--output", required=True)
    r.set_defaults(func=cmd_render)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CircRepError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
