"""Command line entry point: one subcommand per pipeline stage plus ``batch``.

Every command prints a single JSON document on stdout. Inputs are files (or
``-`` for stdin) in the formats understood by :mod:`polyreal.core` and
:mod:`polyreal.sphere`.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .certify import bfp, certify_nonrealizable, complete, gp_propagate
from .core import Chirotope, RationalConfiguration, chirotope_of_points, facets_of, is_matroid_polytope, is_neighborly
from .errors import Contradiction, PolyrealError
from .exact import rationalize_config, verify
from .pipeline import (
    ClassifyOptions,
    LedgerRecord,
    classify,
    read_ledger,
    realize,
    replay,
    run_batch,
    summarize,
)
from .solver import Budget, build_face_system, solve_feasibility
from .sphere import PartialChirotope, f_vector, load_sphere, partial_from_sphere

__all__ = ["main", "classify", "run_batch", "LedgerRecord", "ClassifyOptions", "replay"]

log = logging.getLogger("polyreal")


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _is_sign_text(text: str) -> bool:
    head = text.split(None, 2)[:2]
    return len(head) == 2 and all(h.isdigit() for h in head)


def load_signs(text: str):
    """Chirotope, PartialChirotope, or the partial chirotope forced by a sphere."""
    if _is_sign_text(text):
        body = "".join(text.split()[2:])
        if "?" in body:
            return PartialChirotope.from_text(text)
        return Chirotope.from_text(text)
    return partial_from_sphere(load_sphere(text))


def load_target(text: str):
    return Chirotope.from_text(text) if _is_sign_text(text) else load_sphere(text)


def load_config(text: str) -> RationalConfiguration:
    data = json.loads(text)
    if isinstance(data, dict):
        data = data.get("coordinates", data.get("points"))
    return RationalConfiguration.from_json(data)


def _options(args) -> ClassifyOptions:
    data = {}
    if args.config:
        data.update(json.loads(Path(args.config).read_text()))
    for key in ("epsilon", "restarts", "iterations", "seed", "coordinate_bound"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    if args.pin_north_pole:
        data["pin_north_pole"] = True
    if args.budget is not None:
        data["time_budget"] = args.budget
    return ClassifyOptions.from_mapping(data)


def _signs_json(signs) -> dict:
    out = {"n": signs.n, "r": signs.r, "signs": signs.to_text().split("\n")[1]}
    if isinstance(signs, PartialChirotope):
        out["known"] = signs.known
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_chirotope_of(args, opts):
    chi = chirotope_of_points(load_config(_read(args.input)))
    return {**_signs_json(chi), "uniform": chi.is_uniform}


def cmd_facets(args, opts):
    chi = Chirotope.from_text(_read(args.input))
    facets = sorted(facets_of(chi))
    return {"facets": [list(f) for f in facets], "matroid_polytope": is_matroid_polytope(chi),
            "neighborly": is_neighborly(chi)}


def cmd_fvector(args, opts):
    s = load_sphere(_read(args.input))
    return {"n": s.n, "d": s.d, "f_vector": list(f_vector(s)), "digest": s.digest()}


def cmd_partial(args, opts):
    return _signs_json(partial_from_sphere(load_sphere(_read(args.input))))


def cmd_propagate(args, opts):
    signs = load_signs(_read(args.input))
    try:
        out = gp_propagate(signs)
    except Contradiction as exc:
        t = exc.triple
        return {"contradiction": {"lambda": list(t.lam), "quad": list(t.quad)}}
    return _signs_json(out)


def cmd_complete(args, opts):
    result = complete(load_signs(_read(args.input)), cap=args.cap or opts.completion_cap, node_cap=opts.node_cap)
    return {"status": result.status, "truncated": result.truncated, "nodes": result.nodes,
            "completions": [_signs_json(c)["signs"] for c in result.completions]}


def cmd_bfp(args, opts):
    cert = bfp(load_signs(_read(args.input)))
    return {"certificate": None if cert is None else cert.to_json()}


def _realize(args, opts, inscribed: bool):
    text = _read(args.input)
    if _is_sign_text(text):
        config, outcome = realize(Chirotope.from_text(text), opts, inscribed=inscribed)
    else:
        sphere = load_sphere(text)
        problem = build_face_system(sphere, inscribed=inscribed, epsilon=opts.epsilon,
                                    coordinate_bound=opts.coordinate_bound)
        outcome = solve_feasibility(problem, Budget(opts.restarts, opts.iterations, opts.time_budget),
                                    seed=opts.seed, pin_north_pole=opts.pin_north_pole)
        config = rationalize_config(outcome.config, inscribed, sphere)[0] if outcome.feasible else None
    return {"status": "feasible" if config is not None else "budget_exhausted",
            "coordinates": None if config is None else config.to_json(),
            "residual": outcome.residual, "restarts_used": outcome.restarts_used, "seed": opts.seed}


def cmd_realize(args, opts):
    return _realize(args, opts, inscribed=False)


def cmd_inscribe(args, opts):
    return _realize(args, opts, inscribed=True)


def cmd_verify(args, opts):
    report = verify(load_config(_read(args.config_file)), load_target(_read(args.target)), inscribed=args.inscribed)
    return {**asdict(report), "positive": report.positive}


def cmd_certify(args, opts):
    v = certify_nonrealizable(load_sphere(_read(args.input)), cap=opts.completion_cap, node_cap=opts.node_cap)
    return {"verdict": v.kind, "witness": v.witness, "diagnostics": v.diagnostics,
            "certificates": [{"signs": _signs_json(s)["signs"], "certificate": c.to_json()} for s, c in v.certificates]}


def cmd_classify(args, opts):
    text = _read(args.input)
    record = classify(load_sphere(text), opts, instance_id=args.id or "")
    if args.ledger:
        with open(args.ledger, "a") as out:
            out.write(record.to_json() + "\n")
    return asdict(record)


def cmd_batch(args, opts):
    if not args.ledger:
        raise SystemExit("batch needs --ledger")
    summary = run_batch(args.input, args.ledger, jobs=args.jobs, seed=opts.seed, options=opts)
    summary["ledger"] = summarize(read_ledger(args.ledger))
    return summary


def cmd_replay(args, opts):
    records = read_ledger(args.input)
    failures = [r.instance_id for r in records if not replay(r)]
    return {"records": len(records), "failures": failures}


COMMANDS = {
    "chirotope-of": (cmd_chirotope_of, "exact chirotope of a rational configuration (JSON p/q rows)"),
    "facets": (cmd_facets, "facets of a uniform chirotope"),
    "fvector": (cmd_fvector, "f-vector of a simplicial sphere"),
    "partial": (cmd_partial, "partial chirotope forced by a sphere's facets"),
    "propagate": (cmd_propagate, "three-term sign propagation"),
    "complete": (cmd_complete, "enumerate chirotopes compatible with a partial one"),
    "bfp": (cmd_bfp, "search for a biquadratic final polynomial"),
    "realize": (cmd_realize, "rational realization of a chirotope or sphere"),
    "inscribe": (cmd_inscribe, "rational realization on the unit sphere"),
    "verify": (cmd_verify, "exact check of coordinates against a target"),
    "certify": (cmd_certify, "non-realizability certificate for a sphere"),
    "classify": (cmd_classify, "full decision procedure for one sphere"),
    "batch": (cmd_batch, "classify a corpus into a resumable ledger"),
    "replay": (cmd_replay, "re-verify every record of a ledger"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--epsilon", type=float, default=None)
    common.add_argument("--budget", type=float, default=None, help="wall-time seconds for the solver stages")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--ledger", default=None)
    common.add_argument("--restarts", type=int, default=None)
    common.add_argument("--iterations", type=int, default=None)
    common.add_argument("--coordinate-bound", dest="coordinate_bound", type=float, default=None)
    common.add_argument("--pin-north-pole", dest="pin_north_pole", action="store_true")
    common.add_argument("--config", default=None, help="JSON file of option keys")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="polyreal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, parents=[common])
        if name == "verify":
            p.add_argument("config_file", metavar="coordinates")
            p.add_argument("target")
            p.add_argument("--inscribed", action="store_true")
        else:
            p.add_argument("input")
        if name == "complete":
            p.add_argument("--cap", type=int, default=None)
        if name == "classify":
            p.add_argument("--id", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        opts = _options(args)
        result = COMMANDS[args.command][0](args, opts)
    except (PolyrealError, ValueError, OSError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    json.dump(result, sys.stdout, indent=None, default=str)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
