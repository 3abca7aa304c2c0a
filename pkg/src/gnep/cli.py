"""Command-line front end.

Reports are JSON on stdout; a short human summary goes to stderr. The
input may be an economy file or ``corpus:NAME`` for a bundled economy.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import corpus, fileformat, niso, solver
from .config import Config
from .economy import EconomyError, EmptySliceError, validate
from .expr import EvaluationError
from .reply import is_nash_equilibrium
from .report import digest, dumps


def _load(source):
    if source.startswith("corpus:"):
        return corpus.get(source[len("corpus:"):]).economy
    return fileformat.load(source)


def _decision(econ, text, what):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise EconomyError(f"{what}: invalid JSON ({err.msg})") from None
    if not isinstance(raw, list):
        raise EconomyError(f"{what}: expected a JSON array with one entry per player")
    return econ.decision(raw)


def _default_start(econ):
    return tuple(s.labels[0] if s.kind == "finite" else tuple(s.lower) for s in econ.spaces)


def _config(args) -> Config:
    return Config().with_(tol_eq=args.tol_eq, tol_cert=args.tol_cert, seed=args.seed,
                          budget=args.budget, grid=args.grid, max_iter=args.max_iter)


def cmd_validate(args, cfg):
    econ = _load(args.input)
    rep = validate(econ, args.probe_budget or cfg.budget, cfg)
    summary = (f"fixed point {'found' if rep.fixed_point_found else 'NOT found'}, "
               f"{'strict' if rep.strict else 'NOT strict'}, own-independent {rep.own_independent}")
    return econ, {"validation": rep}, summary


def cmd_verify(args, cfg):
    econ = _load(args.input)
    x = _decision(econ, args.point, "--point")
    report = is_nash_equilibrium(econ, x, args.tol, cfg)
    certs = []
    notes = []
    if report.feasible:
        for method in ("v", "tilde_v"):
            try:
                certs.append(niso.certify(econ, x, method, cfg=cfg))
            except EconomyError as err:
                notes.append(f"{method}: {err}")
    else:
        notes.append("point is infeasible; certificates skipped")
    summary = f"verdict: {report.verdict}"
    for c in certs:
        if c.applicable:
            summary += f"; {c.kind} = {c.value:.6g} ({c.conclusion})"
    return econ, {"report": report, "certificates": certs, "notes": notes}, summary


def cmd_solve(args, cfg):
    econ = _load(args.input)
    algo = args.algorithm
    if algo == "enumerate":
        res = solver.enumerate_equilibria(econ, cfg)
    elif algo == "best-response":
        start = _decision(econ, args.start, "--start") if args.start else _default_start(econ)
        res = solver.best_response_iteration(econ, start, cfg.max_iter, cfg.tol_eq, cfg)
    else:
        method = "v" if algo == "minimize-v" else "tilde_v"
        res = solver.minimize_v(econ, method, cfg.budget, cfg)
    payload = {"solve": res}
    if not args.trace and algo != "best-response":
        payload = {"solve": {**{k: v for k, v in vars(res).items() if k != "trace"},
                             "trace_length": len(res.trace)}}
    summary = f"{algo}: {res.status}, {len(res.equilibria)} equilibria"
    for f in res.equilibria[:5]:
        summary += f"\n  {f.point}"
    return econ, payload, summary


def cmd_eval(args, cfg):
    econ = _load(args.input)
    x = _decision(econ, args.x, "--x")
    y = _decision(econ, args.y, "--y")
    value = niso.psi(econ, x, y)
    out = {"psi": value, "V": None, "tilde_V": None, "notes": []}
    try:
        out["V"] = niso.big_v(econ, x, cfg)
    except EmptySliceError as err:
        out["notes"].append(f"V: {err}")
    try:
        out["tilde_V"] = niso.tilde_v(econ, x, cfg)
    except (EconomyError, ValueError) as err:
        out["notes"].append(f"tilde_V: {err}")
    summary = f"psi = {value.value:.17g}"
    if out["V"] is not None:
        summary += f", V = {out['V'].value:.17g}"
    if out["tilde_V"] is not None:
        summary += f", tilde_V = {out['tilde_V'].value:.17g}"
    return econ, out, summary


def cmd_probe(args, cfg):
    econ = _load(args.input)
    x = _decision(econ, args.point, "--point")
    rep = solver.probe_quasiconcavity(econ, args.player, x, args.samples, cfg)
    summary = f"player {rep.player}: {rep.verdict} ({rep.violation_count} violations)"
    if rep.argmax_contiguous is not None:
        summary += f", grid argmax {'contiguous' if rep.argmax_contiguous else 'NOT contiguous'}"
    return econ, {"probe": rep}, summary


def cmd_corpus(args, cfg):
    if args.list or not args.name:
        return None, {"available": list(corpus.CORPUS)}, "available: " + ", ".join(corpus.CORPUS)
    named = corpus.get(args.name)
    truth = {"description": named.truth.description, "method": named.truth.method,
             "equilibria": named.truth.equilibria}
    out = {"name": named.name, "ground_truth": truth}
    if args.export:
        with open(args.export, "w", encoding="utf-8") as fh:
            fh.write(fileformat.dumps(named.economy))
        out["exported_to"] = args.export
    else:
        out["document"] = fileformat.economy_to_dict(named.economy)
    return named.economy, out, f"{named.name}: {named.truth.description}"


COMMANDS = {
    "validate": cmd_validate, "verify": cmd_verify, "solve": cmd_solve,
    "eval": cmd_eval, "probe": cmd_probe, "corpus": cmd_corpus,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-eq", type=float)
    common.add_argument("--tol-cert", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--budget", type=int)
    common.add_argument("--grid", type=int, help="initial grid points per axis")
    common.add_argument("--max-iter", type=int)
    common.add_argument("--timing", action="store_true", help="add wall time to the report")

    parser = argparse.ArgumentParser(prog="gnep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check that the economy is playable")
    p.add_argument("input")
    p.add_argument("--probe-budget", type=int)

    p = sub.add_parser("verify", parents=[common], help="check one global decision")
    p.add_argument("input")
    p.add_argument("--point", required=True, help='JSON array, e.g. \'["D", "D"]\' or "[0.5, 0.5]"')
    p.add_argument("--tol", type=float, help="equilibrium tolerance for this check")

    p = sub.add_parser("solve", parents=[common], help="search for equilibria")
    p.add_argument("input")
    p.add_argument("--algorithm", required=True,
                   choices=["enumerate", "best-response", "minimize-v", "minimize-tilde-v"])
    p.add_argument("--start", help="starting point for best-response (JSON array)")
    p.add_argument("--trace", action="store_true", help="include the full search trace")

    p = sub.add_parser("eval", parents=[common], help="Nikaido-Isoda values at (x, y)")
    p.add_argument("input")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)

    p = sub.add_parser("probe", parents=[common], help="sample quasi-concavity of a payoff")
    p.add_argument("input")
    p.add_argument("--player", type=int, required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--samples", type=int, default=200)

    p = sub.add_parser("corpus", parents=[common], help="materialize a bundled economy")
    p.add_argument("name", nargs="?")
    p.add_argument("--export", metavar="PATH")
    p.add_argument("--list", action="store_true")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    cfg = _config(args)
    started = time.perf_counter()
    try:
        econ, result, summary = COMMANDS[args.command](args, cfg)
    except (EconomyError, KeyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (EmptySliceError, EvaluationError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - started
    report = {"command": argv}
    if econ is not None:
        report["economy"] = digest(econ)
    report["config"] = cfg.as_dict()
    report["result"] = result
    if args.timing:
        report["timing_seconds"] = elapsed
    sys.stdout.write(dumps(report))
    print(summary, file=sys.stderr)
    print(f"({elapsed:.2f} s)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
