"""Command-line interface.

Every command reads JSON inputs, prints (or writes with ``--out``) one JSON
report and exits with:

    0  success
    2  input does not parse
    3  dimension or shape mismatch
    4  solver stopped without a certified interval
    5  a verification check failed
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .cones import ConeFamily
from .jsonio import (
    ParseError,
    dumps,
    experiment_from_json,
    load,
    map_from_json,
    povm_from_json,
)
from .matops import BlockAlgebra, DimensionError

EXIT_OK, EXIT_PARSE, EXIT_DIM, EXIT_SOLVER, EXIT_VERIFY = 0, 2, 3, 4, 5

COMMANDS = ("norm", "dual-norm", "deficiency-post", "deficiency-pre", "range-inclusion",
            "cleanness", "experiment", "ovs", "verify")


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _blocks(text: str | None):
    if text is None:
        return None
    try:
        return BlockAlgebra.from_blocks([int(t) for t in text.split(",") if t.strip()])
    except ValueError as exc:
        raise ParseError(f"bad --decision-alg {text!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chandef", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"chandef {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", default="cp", choices=[f.value for f in ConeFamily])
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--tol", type=float, default=1e-6, help="threshold for zero verdicts")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--decision-alg", help='block sizes of the decision algebra, e.g. "1,1,1"')
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("norm", parents=[common], help="diamond norm of a map")
    s.add_argument("--map", required=True)
    s = sub.add_parser("dual-norm", parents=[common], help="dual diamond norm of a map")
    s.add_argument("--map", required=True)
    for name in ("deficiency-post", "deficiency-pre", "range-inclusion"):
        s = sub.add_parser(name, parents=[common], help=f"{name.replace('-', ' ')} of psi w.r.t. phi")
        s.add_argument("--phi", required=True)
        s.add_argument("--psi", required=True)
    s = sub.add_parser("cleanness", parents=[common], help="POVM comparison")
    s.add_argument("--M", required=True)
    s.add_argument("--N", required=True)
    s.add_argument("--direction", choices=["post", "pre"], default="post")
    s = sub.add_parser("experiment", parents=[common], help="experiment deficiency of E w.r.t. F")
    s.add_argument("--E", required=True)
    s.add_argument("--F", required=True)
    s.add_argument("--direction", choices=["post", "pre"], default="post")
    s = sub.add_parser("ovs", parents=[common], help="base section norms of a polyhedral instance")
    s.add_argument("--section", required=True)
    s.add_argument("--x", help="JSON vector; defaults to the 'x' field of the section file")
    s = sub.add_parser("verify", parents=[common], help="run all invariant suites")
    s.add_argument("--suite", action="append", help="restrict to the named suite (repeatable)")
    return p


def _section_from_json(obj):
    from .ovs import BaseSection, PolyCone
    try:
        cone = obj["cone"]
        if "generators" in cone and "facets" in cone:
            Q = PolyCone(np.asarray(cone["generators"], float), np.asarray(cone["facets"], float))
        elif "generators" in cone:
            Q = PolyCone.from_generators(cone["generators"])
        else:
            Q = PolyCone.from_facets(cone["facets"])
        bt = np.asarray(obj["base_functional"], float)
        sub = np.asarray(obj.get("subspace_basis", np.eye(Q.dim)), float).T
        ip = obj.get("interior_point")
        if ip is None:
            g = Q.generators / (Q.generators @ bt)[:, None]
            ip = g.mean(axis=0)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad section: {exc}") from None
    if len(bt) != Q.dim or sub.shape[0] != Q.dim:
        raise DimensionError("section fields do not match the cone dimension")
    return BaseSection(Q, bt, sub, np.asarray(ip, float))


def _ovs_report(args):
    from .ovs import base_section_norm, dual_norm_check, dual_section, sandwich_check
    obj = load(args.section)
    B = _section_from_json(obj)
    x = load(args.x) if args.x else obj.get("x")
    if x is None:
        raise ParseError("no vector given (use --x or an 'x' field)")
    x = np.asarray(x, float)
    if x.shape != (B.dim,):
        raise DimensionError(f"vector of length {x.size} for a cone in dimension {B.dim}")
    Bd = dual_section(B)
    return {"norm": base_section_norm(B, x), "dual_norm": base_section_norm(Bd, x),
            "dual_norm_check": dual_norm_check(B, x),
            "sandwich": sandwich_check(B, x, samples=200, seed=args.seed),
            "vertices": B.vertices(), "dual_section": Bd}


def run(args) -> tuple[int, dict]:
    """Execute one parsed job; returns ``(exit code, report)``."""
    from . import deficiency, norms
    family = args.family
    D = _blocks(args.decision_alg)
    cmd = args.command
    if cmd == "norm":
        return EXIT_OK, norms.diamond_norm(family, map_from_json(load(args.map)), seed=args.seed)
    if cmd == "dual-norm":
        return EXIT_OK, norms.dual_diamond_norm(family, map_from_json(load(args.map)))
    if cmd in ("deficiency-post", "deficiency-pre", "range-inclusion"):
        phi, psi = map_from_json(load(args.phi)), map_from_json(load(args.psi))
        if cmd == "deficiency-post":
            rep = deficiency.post_deficiency(family, phi, psi, D, seed=args.seed)
        elif cmd == "deficiency-pre":
            rep = deficiency.pre_deficiency(family, phi, psi, D, seed=args.seed)
        else:
            rep = deficiency.pre_range_inclusion(phi, psi, seed=args.seed)
        return EXIT_OK, _with_verdict(rep, args.tol)
    if cmd == "cleanness":
        M, N = povm_from_json(load(args.M)), povm_from_json(load(args.N))
        if args.direction == "post":
            rep = deficiency.povm_post_cleanness(M, N, family)
        else:
            rep = deficiency.povm_pre_deficiency(M, N, D, family, seed=args.seed)
        return EXIT_OK, _with_verdict(rep, args.tol)
    if cmd == "experiment":
        E, F = experiment_from_json(load(args.E)), experiment_from_json(load(args.F))
        if args.direction == "post":
            rep = deficiency.experiment_post_deficiency(E, F, D, family, seed=args.seed)
        else:
            rep = deficiency.experiment_pre_deficiency(E, F)
        return EXIT_OK, _with_verdict(rep, args.tol)
    if cmd == "ovs":
        return EXIT_OK, _ovs_report(args)
    if cmd == "verify":
        from .verify import run_all
        checks = run_all(args.seed, args.suite)
        failed = [c for c in checks if not c.ok]
        report = {"seed": args.seed, "passed": len(checks) - len(failed), "failed": len(failed),
                  "checks": checks}
        return (EXIT_VERIFY if failed else EXIT_OK), report
    raise ParseError(f"unknown command {cmd!r}")


def _with_verdict(rep, tol):
    out = rep.to_json()
    out["zero_within_tol"] = bool(rep.eps_hi <= tol)
    out["tol"] = tol
    return out


def main(argv=None) -> int:
    from .norms import SolverFailure
    from .ovs import PolyhedralError
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, report = run(args)
    except (ParseError, KeyError, PolyhedralError) as exc:
        print(f"chandef: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionError as exc:
        print(f"chandef: dimension error: {exc}", file=sys.stderr)
        return EXIT_DIM
    except SolverFailure as exc:
        print(f"chandef: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except FileNotFoundError as exc:
        print(f"chandef: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
