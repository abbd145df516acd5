"""Command-line front end.

Exit codes: 0 success (or SOLVABLE), 3 UNSOLVABLE, 1 usage error, 2 validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import decomp, hodge, kostov, oracle, sigma
from .parsing import load_problem, problem_document, read_json
from .roots import DimVector, StarGraph, enumerate_positive_roots_below, p_value
from .spectral import ValidationError, build_problem

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_UNSOLVABLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        raise UsageError(message)


_VEC = {"type": "array", "items": {"type": "integer"}}

REPORT_SCHEMAS: dict[str, dict[str, Any]] = {
    "analyze": {
        "type": "object",
        "required": ["verdict", "classification", "statement", "d", "graph", "citations"],
        "properties": {
            "verdict": {"enum": ["SOLVABLE", "UNSOLVABLE"]},
            "classification": {"type": "object", "required": ["kind"]},
            "d": _VEC,
            "graph": {"type": "object"},
            "statement": {"type": "string"},
            "citations": {"type": "array", "items": {"type": "string"}},
        },
    },
    "classify": {
        "type": "object",
        "required": ["classification", "d", "p"],
        "properties": {"classification": {"type": "object", "required": ["kind", "trail"]}, "d": _VEC},
    },
    "decompose": {
        "type": "object",
        "required": ["d", "parts", "moduli_dimension", "factorization", "notes"],
        "properties": {"parts": {"type": "array"}, "moduli_dimension": {"type": "integer"}},
    },
    "roots": {
        "type": "object",
        "required": ["bound", "roots"],
        "properties": {
            "roots": {
                "type": "array",
                "items": {"type": "object", "required": ["d", "kind", "p"]},
            }
        },
    },
    "weights": {
        "type": "object",
        "required": ["dolbeault", "e", "c", "anchor", "weight", "mode", "wall_count", "certified"],
        "properties": {"certified": {"type": "boolean"}, "e": {"type": "integer"}},
    },
    "search": {
        "type": "object",
        "required": ["found", "restarts", "seed", "tol"],
        "properties": {"found": {"type": "boolean"}},
    },
}


def _emit(args, payload: dict[str, Any], text: str) -> None:
    if args.json:
        json.dump(payload, sys.stdout, indent=2, default=str)
        sys.stdout.write("\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _load(args):
    doc = read_json(args.problem)
    classes, theta = load_problem(doc)
    if getattr(args, "theta", None):
        extra = read_json(args.theta)
        if not isinstance(extra, dict):
            raise ValidationError("theta file must be an object", "/")
        for k, v in extra.items():
            try:
                theta[k] = Fraction(v)
            except (TypeError, ValueError, ZeroDivisionError):
                raise ValidationError(f"expected a rational, got {v!r}", f"/{k}") from None
    return classes, theta


def _graph_info(problem) -> dict[str, Any]:
    g = problem.graph
    return {
        "legs": list(g.legs),
        "labels": [g.label(v) for v in range(g.n_vertices)],
        "input_labels": [problem.user_label(v) for v in range(g.n_vertices)],
        "leg_origin": [j + 1 for j in problem.leg_origin],
        "q": [str(x) for x in problem.q.entries],
        "theta": [str(t) for t in problem.theta],
    }


def cmd_analyze(args) -> int:
    classes, theta = _load(args)
    verdict = sigma.ds_verdict(classes, theta)
    p = verdict.problem
    c = verdict.classification
    cites = ["criterion: irreducible solutions exist iff d lies in Sigma_(q,theta)"]
    if c.kind is sigma.Kind.AFF:
        cites.append("nonexistence for almost generic semisimple affine families")
    if c.kind is sigma.Kind.AFF_INF:
        cites.append("flat roots e_inf + m*delta carry no stable representation")
    payload = {
        "verdict": verdict.label,
        "classification": c.to_dict(),
        "statement": verdict.statement,
        "d": list(p.d.entries),
        "graph": _graph_info(p),
        "citations": cites,
    }
    text = "\n".join(
        [
            f"verdict: {verdict.label}",
            f"graph: {p.graph}  d = {p.d}",
            f"classification: {c.summary()}",
            verdict.statement,
        ]
    )
    _emit(args, payload, text)
    return EXIT_OK if verdict.solvable else EXIT_UNSOLVABLE


def cmd_classify(args) -> int:
    classes, theta = _load(args)
    p = build_problem(classes, theta)
    c = sigma.classify(p.d, p.q, p.theta)
    payload = {"classification": c.to_dict(), "d": list(p.d.entries), "p": p_value(p.d), "graph": _graph_info(p)}
    lines = [f"graph: {p.graph}  d = {p.d}  p(d) = {p_value(p.d)}", f"classification: {c.summary()}"]
    if c.trail:
        lines.append("reflection trail: " + " ".join(p.graph.label(v) for v in c.trail))
    if c.certificate is not None and c.certificate.parts:
        lines.append("witness: " + " + ".join(str(x) for x in c.certificate.parts))
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_decompose(args) -> int:
    classes, theta = _load(args)
    p = build_problem(classes, theta)
    try:
        report = decomp.moduli_report(p.d, p.q, p.theta)
    except decomp.DecompositionError as exc:
        raise ValidationError(str(exc), "/classes") from None
    lines = [f"d = {p.d}", "parts:"]
    lines += [f"  {part} x{m}  (p = {p_value(part)})" for part, m in report.parts]
    lines.append(f"moduli: {report.factorization()}")
    lines.append(f"dimension: {report.moduli_dimension}")
    lines += [f"[{tag}] {fact}" for tag, fact in report.notes]
    _emit(args, report.to_dict(), "\n".join(lines))
    return EXIT_OK


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of integers") from None


def cmd_roots(args) -> int:
    if args.problem:
        classes, _ = _load(args)
        p = build_problem(classes)
        graph, bound = p.graph, p.d
    else:
        if args.legs is None:
            raise UsageError("give a problem file or --legs")
        graph = StarGraph.canonical(_int_list(args.legs, "--legs"))
        bound = None
    if args.bound is not None:
        vals = _int_list(args.bound, "--bound")
        if len(vals) != graph.n_vertices:
            raise UsageError(f"--bound needs {graph.n_vertices} entries for {graph}")
        if any(v < 0 for v in vals):
            raise ValidationError("bound entries must be nonnegative", "/bound")
        bound = DimVector(graph, tuple(vals))
    if bound is None:
        raise UsageError("--bound is required with --legs")
    roots = enumerate_positive_roots_below(bound)
    payload = {
        "graph": {"legs": list(graph.legs), "labels": [graph.label(v) for v in range(graph.n_vertices)]},
        "bound": list(bound.entries),
        "roots": [{"d": list(r.entries), "kind": rc.kind.value, "p": p_value(r)} for r, rc in roots],
    }
    lines = [f"{len(roots)} positive roots below {bound} on {graph}"]
    lines += [f"  {r}  {rc.kind.value}  p={p_value(r)}" for r, rc in roots]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_kostov(args) -> int:
    try:
        fam = kostov.family(args.diagram, args.m, args.l)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise UsageError(str(exc)) from None
    doc = problem_document(fam.classes, description=f"{fam.diagram.display} family, m={fam.m}, l={fam.l}")
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def weights_pipeline(classes, mode: str = "almost-generic", seed: int = 0) -> dict[str, Any]:
    """Betti data with weights beta_i = i, its Dolbeault side, and a certified weight."""
    betti = tuple(
        tuple(
            hodge.BettiPiece(Fraction(i), xi, s) for i, (xi, s) in enumerate(zip(c.eigenvalues, c.increments()))
        )
        for c in classes
    )
    dol = hodge.betti_to_dolbeault(betti)
    alpha_prime = hodge.dolbeault_weights(dol)
    # refined type: one index per Betti piece, ordered by (alpha, beta)
    sigma_map, sizes = [], []
    for pieces in dol:
        starts, leg_sizes = [], []
        for piece in pieces:
            starts.append(len(leg_sizes))
            leg_sizes.extend(r.size for r in piece.residues)
        sigma_map.append(tuple(starts))
        sizes.append(leg_sizes)
    c = tuple(tuple(sum(s[i:]) for i in range(len(s))) for s in sizes)
    nu = [len(s) - 1 for s in sizes]
    anchor = hodge.pushforward_weight(tuple(sigma_map), alpha_prime, nu)
    d_prime = hodge.dolbeault_dims(dol)
    e = -hodge.filtered_degree(d_prime, alpha_prime)
    if e.denominator != 1:
        raise ValidationError("eigenvalue angles do not sum to an integer (q^d != 1)", "/classes")
    e = int(e)
    if mode == "generic" and hodge.is_divisible(e, c):
        raise ValidationError("generic weights do not exist: (e, c) is divisible", "/classes")
    note = ""
    try:
        alpha = hodge.pick_weight(e, c, anchor, mode=mode, seed=seed)
    except hodge.WeightSearchError as exc:
        alpha, note = None, str(exc)
    certified = alpha is not None and hodge.segment_meets_wall(anchor, alpha, e, c) is None
    if certified:
        certified = (hodge.is_generic if mode == "generic" else hodge.is_almost_generic)(alpha, e, c)
    return {
        "dolbeault": [
            [
                {"alpha": str(p.alpha), "size": p.size, "residues": [[str(r.b), str(r.modulus), r.size] for r in p.residues]}
                for p in pieces
            ]
            for pieces in dol
        ],
        "e": e,
        "c": [list(x) for x in c],
        "anchor": [[str(x) for x in leg] for leg in anchor],
        "weight": None if alpha is None else [[str(x) for x in leg] for leg in alpha],
        "mode": mode,
        "wall_count": hodge.wall_count(e, c),
        "certified": certified,
        "note": note,
    }


def cmd_weights(args) -> int:
    classes, _ = _load(args)
    payload = weights_pipeline(classes, args.mode, args.seed)
    text = "\n".join(
        [
            f"degree e = {payload['e']}, refined ranks c = {payload['c']}",
            f"anchor weight: {payload['anchor']}",
            f"{payload['mode']} weight: {payload['weight']}",
            f"walls: {payload['wall_count']}, segment certified wall-free: {payload['certified']}",
        ]
        + ([payload["note"]] if payload["note"] else [])
    )
    _emit(args, payload, text)
    return EXIT_OK


def cmd_search(args) -> int:
    classes, _ = _load(args)
    if len(classes) < 2:
        raise ValidationError("the numerical search needs at least two classes", "/classes")
    w = oracle.search(classes, restarts=args.restarts, tol=args.tol, seed=args.seed)
    payload: dict[str, Any] = {"found": w is not None, "restarts": args.restarts, "seed": args.seed, "tol": args.tol}
    if w is not None:
        payload["witness"] = w.to_dict()
        text = f"witness from restart {w.restart}: residual {w.residual:.3e}, burnside dim {w.burnside_dim}, irreducible {w.irreducible}"
    else:
        text = "no witness found (budget exhausted; this is not a proof of nonexistence)"
    _emit(args, payload, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tameds", description="Deligne-Simpson solvability toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def problem_cmd(name: str, help_text: str, optional: bool = False) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        if optional:
            p.add_argument("problem", nargs="?", help="problem file, or - for stdin")
        else:
            p.add_argument("problem", help="problem file, or - for stdin")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--theta", help="JSON file mapping vertex labels to rational weights")
        return p

    problem_cmd("analyze", "decide whether an irreducible solution exists").set_defaults(func=cmd_analyze)
    problem_cmd("classify", "classify d against Sigma").set_defaults(func=cmd_classify)
    problem_cmd("decompose", "minimal decomposition and moduli report").set_defaults(func=cmd_decompose)
    p = problem_cmd("roots", "positive roots below a bound", optional=True)
    p.add_argument("--legs", help="leg lengths, e.g. 1,1,1,1 (instead of a problem file)")
    p.add_argument("--bound", help="bound vector, comma separated in vertex order")
    p.set_defaults(func=cmd_roots)
    p = sub.add_parser("kostov", help="emit an affine family as a problem file")
    p.add_argument("--diagram", required=True, choices=sorted(kostov.AFFINE_DIAGRAMS))
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--l", type=int, default=None, help="order of q^delta (default m)")
    p.set_defaults(func=cmd_kostov)
    p = problem_cmd("weights", "Dolbeault data and a certified parabolic weight")
    p.add_argument("--mode", choices=["generic", "almost-generic"], default="almost-generic")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_weights)
    p = problem_cmd("search", "numerical search for a solution")
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--tol", type=float, default=oracle.RESIDUAL_TOL)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_search)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) == "kostov" and args.l is None:
            args.l = args.m
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except ValidationError as exc:
        sys.stderr.write(f"validation error at {exc.pointer or '/'}: {exc.args[0]}\n")
        return EXIT_INVALID
    except OSError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
