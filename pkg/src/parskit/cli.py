"""Command-line front end.

Exit codes: 0 success, 1 IO or usage error, 2 validation failure,
3 analysis refused (open frontier or violated precondition).
Wherever a system path is expected, ``corpus:NAME`` names a corpus entry and
``corpus:NAME/source`` / ``corpus:NAME/target`` the two sides of its mapping.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__, ars, prob
from .certify import LyapunovCertificate, check_lyapunov, load_certificate, min_margin
from .corpus import builtin, finite_row
from .errors import (
    MissingValuation,
    ParseError,
    ParsError,
    PartialMapping,
    TargetNotNormalForm,
    TargetUnreachable,
    UnknownEntry,
    UnknownState,
    ValidationError,
)
from .model import GeneratedPars, Pars, explore, serialize, system_from_dict, validate
from .montecarlo import monte_carlo
from .transform import check_conditions, conclude, load_mapping, mapping_to_dict
from .window import PROPERTIES, window_row

SCHEMA = 1
EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_REFUSED = 0, 1, 2, 3

EXTRA = {
    "normalizing": ars.check_normalizing,
    "unique_nf": ars.check_unique_nf,
    "prob_normalizing": prob.check_prob_normalizing,
}


class CliError(Exception):
    def __init__(self, code, message, details=None):
        super().__init__(message)
        self.code = code
        self.details = details or {}


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror}", {"error": "IOError"}) from exc


def _corpus(ref: str):
    name, _, side = ref[len("corpus:"):].partition("/")
    try:
        entry = builtin(name)
    except UnknownEntry as exc:
        raise CliError(EXIT_IO, str(exc), {"error": "UnknownEntry"}) from exc
    return entry, side


def load(ref: str, check: bool = True):
    """Resolve a path or corpus reference to a Pars or GeneratedPars."""
    if ref.startswith("corpus:"):
        entry, side = _corpus(ref)
        if not side:
            return entry.system
        if entry.mapping is None or side not in ("source", "target"):
            raise CliError(EXIT_IO, f"{ref}: no such mapping side")
        return getattr(entry.mapping, side)
    text = _read(ref)
    try:
        system = system_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INVALID, f"{ref}: malformed JSON: {exc}", {"error": "ParseError"}) from exc
    except ParseError as exc:
        raise CliError(EXIT_INVALID, f"{ref}: {exc}", {"error": "ParseError"}) from exc
    if check:
        report = validate(system)
        if not report.ok:
            raise CliError(EXIT_INVALID, f"{ref}: validation failed", {"validation": report.to_dict()})
    return system


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, Pars):
            h.update(serialize(p).encode())
        elif isinstance(p, GeneratedPars):
            h.update(f"generated:{p.name}".encode())
        else:
            h.update(json.dumps(p, sort_keys=True, default=str).encode())
        h.update(b"\0")
    return h.hexdigest()


def _finite(system, depth):
    if isinstance(system, Pars):
        return system
    if depth is None:
        raise CliError(EXIT_REFUSED, "generated system: pass --depth to analyse a window",
                       {"error": "FrontierPresent"})
    return explore(system, depth)


# -- commands ---------------------------------------------------------------------

def cmd_validate(args):
    if args.path.startswith("corpus:"):
        system = load(args.path, check=False)
        if isinstance(system, GeneratedPars):
            system = explore(system, 10).core
    else:
        system = load(args.path, check=False)
    report = validate(system)
    lines = ["ok" if report.ok else "invalid"]
    lines += [f"  {i.severity}: {i.code} at {i.where}: {i.message}" for i in report.issues]
    code = EXIT_OK if report.ok else EXIT_INVALID
    return code, {"validation": report.to_dict()}, lines, [system]


def cmd_analyze(args):
    system = load(args.path)
    props = args.properties.split(",") if args.properties else list(PROPERTIES)
    unknown = [p for p in props if p not in PROPERTIES and p not in EXTRA]
    if unknown:
        raise CliError(EXIT_IO, f"unknown properties: {', '.join(unknown)}")
    results, lines = {}, []
    if isinstance(system, GeneratedPars):
        if args.depth is None:
            raise CliError(EXIT_REFUSED, "generated system: pass --depth to analyse a window",
                           {"error": "FrontierPresent"})
        cert = None
        if args.path.startswith("corpus:"):
            cert = _corpus(args.path)[0].certificate
        cells = window_row(system, args.depth, args.iterate or args.depth, cert)
        for p in props:
            if p in cells:
                results[p] = cells[p].to_dict()
                lines.append(f"{p:22s} {_sign(cells[p].verdict.value)}  {cells[p].basis}")
            else:
                results[p] = {"verdict": "unknown", "basis": "not decidable on a window"}
                lines.append(f"{p:22s} ?")
    else:
        decisions = finite_row(system, [p for p in props if p in PROPERTIES])
        for p in props:
            if p in EXTRA:
                if p == "prob_normalizing" and not system.probabilistic:
                    continue
                decisions[p] = EXTRA[p](system)
        for p in props:
            if p not in decisions:
                continue
            d = decisions[p]
            results[p] = d.to_dict()
            wit = "" if d.witness is None else f"  witness {ars._jsonable(d.witness)}"
            lines.append(f"{p:22s} {_sign(d.verdict.value)}{wit}")
    row = "".join(_sign(results[p]["verdict"]) for p in PROPERTIES if p in results)
    lines.append(f"row: {row}")
    return EXIT_OK, {"properties": results, "row": row}, lines, [system]


def _sign(v):
    return {"yes": "+", "no": "-"}.get(v, "?")


def cmd_prob(args):
    system = load(args.path)
    if isinstance(system, GeneratedPars):
        if args.depth is None:
            raise CliError(EXIT_REFUSED, "generated system: pass --depth for a bracket",
                           {"error": "FrontierPresent"})
        n = args.iterate if args.iterate is not None else args.depth
        bracket = prob.divergence_bracket(system, args.start, args.depth, n)
        window = explore(system, args.depth, roots=(args.start,))
        step = prob.pn_iterate(window, args.start, n)
        res = {"start": args.start, "method": prob.BRACKET, "depth": args.depth, "n": n,
               "divergence": {**bracket.to_dict(), "lo_float": float(bracket.lo),
                              "hi_float": float(bracket.hi)},
               "settled_float": {t: float(p) for t, p in sorted(step.settled.items())},
               "alive_float": float(step.alive_mass)}
        lines = [f"P({args.start} -> inf) in [{float(bracket.lo):.10f}, {float(bracket.hi):.10f}]"
                 f"  (depth {args.depth}, n {n}, width {float(bracket.width):.3g})"]
        return EXIT_OK, res, lines, [system, args.depth, n]

    if args.to is not None:
        try:
            p = prob.reach_probability(system, args.start, args.to)
        except TargetNotNormalForm as exc:
            raise CliError(EXIT_REFUSED, str(exc), {"error": "TargetNotNormalForm",
                                                    "explanation": exc.EXPLANATION}) from exc
        except TargetUnreachable as exc:
            raise CliError(EXIT_REFUSED, str(exc), {"error": "TargetUnreachable"}) from exc
        return EXIT_OK, {"start": args.start, "target": args.to, "p": str(p)}, \
            [f"P({args.start} ->* {args.to}) = {p}"], [system]

    report = prob.absorption_solve(system).get(args.start)
    if report is None:
        raise UnknownState(args.start)
    res = report.to_dict()
    lines = [f"P({args.start} ->* {t}) = {p}" for t, p in sorted(report.reach.items())]
    lines.append(f"P({args.start} -> inf) = {report.divergence}")
    if args.iterate is not None:
        trace = [s.to_dict() for s in prob.pn_trace(system, args.start, args.iterate)]
        res["trace"] = trace
        for s in trace:
            lines.append(f"  n={s['n']:<4d} alive={s['alive']}  settled={s['settled']}")
    return EXIT_OK, res, lines, [system]


def cmd_simulate(args):
    system = load(args.path)
    system = _finite(system, args.depth)
    if args.samples < 1 or args.steps < 0:
        raise CliError(EXIT_IO, "--samples must be >= 1 and --steps >= 0")
    rep = monte_carlo(system, args.start, args.steps, args.samples, args.seed, workers=args.workers)
    res = rep.to_dict()
    lines = [f"seed {rep.seed}, {rep.samples} samples, at most {rep.max_steps} steps"]
    lines += [f"  {t}: {c} ({rep.fraction(t):.5f} +/- {rep.stderr(t):.5f})"
              for t, c in sorted(rep.counts.items())]
    lines.append(f"  censored: {rep.censored} ({rep.censored_fraction:.5f})")
    if rep.frontier:
        lines.append(f"  stopped at frontier: {rep.frontier}")
    return EXIT_OK, res, lines, [system if isinstance(system, Pars) else system.core,
                                 args.samples, args.steps, args.seed]


def _certificate(ref: str) -> LyapunovCertificate:
    if ref.startswith("corpus:"):
        entry, _ = _corpus(ref)
        if entry.certificate is None:
            raise CliError(EXIT_IO, f"{ref} ships no certificate")
        return entry.certificate
    try:
        return load_certificate(_read(ref))
    except ParseError as exc:
        raise CliError(EXIT_INVALID, f"{ref}: {exc}", {"error": "ParseError"}) from exc


def cmd_certify(args):
    system = _finite(load(args.path), args.depth)
    cert = _certificate(args.certificate)
    try:
        report = check_lyapunov(system, cert)
    except MissingValuation as exc:
        raise CliError(EXIT_REFUSED, str(exc), {"error": "MissingValuation"}) from exc
    res = report.to_dict()
    lines = [f"verdict: {report.verdict}", f"epsilon: {cert.epsilon}",
             f"coverage: {report.coverage}, {report.states_checked} states checked"]
    if report.margins:
        s, m = min_margin(report)
        lines.append(f"min margin: {m} at {s}")
    if report.violations:
        lines.append(f"violations: {', '.join(report.violations[:10])}")
    if cert.argument:
        lines.append(f"argument (not machine-checked): {cert.argument}")
        res["argument"] = cert.argument
    return EXIT_OK, res, lines, [system if isinstance(system, Pars) else system.core,
                                 cert.to_dict() if cert.builtin or not callable(cert.valuation) else None]


def cmd_transform(args):
    source, target = load(args.source), load(args.target)
    for s in (source, target):
        if isinstance(s, GeneratedPars):
            raise CliError(EXIT_REFUSED, "transformations need finite systems",
                           {"error": "FrontierPresent"})
    if args.map.startswith("corpus:"):
        entry, _ = _corpus(args.map)
        if entry.mapping is None:
            raise CliError(EXIT_IO, f"{args.map} ships no mapping")
        doc = mapping_to_dict(entry.mapping)
    else:
        try:
            doc = json.loads(_read(args.map))
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_INVALID, f"{args.map}: {exc}", {"error": "ParseError"}) from exc
    try:
        mapping = load_mapping(doc, source, target, args.mode)
        report = check_conditions(mapping)
    except ParseError as exc:
        raise CliError(EXIT_INVALID, str(exc), {"error": "ParseError"}) from exc
    except PartialMapping as exc:
        raise CliError(EXIT_REFUSED, str(exc), {"error": "PartialMapping"}) from exc

    if args.as_term_cert:
        margins = check_lyapunov(source, _certificate(args.as_term_cert))
        verdict = ars.Verdict.YES if margins.verdict == "yes" else ars.Verdict.UNKNOWN
        evidence = ars.Decision("as_termination", verdict, None, {"certificate": margins.verdict})
    elif source.probabilistic:
        evidence = prob.check_as_termination(source)
    else:
        evidence = None
    conclusion = conclude(report, evidence)
    res = report.to_dict()
    res["as_termination_evidence"] = None if evidence is None else evidence.to_dict()
    res["conclusion"] = conclusion.value
    lines = [f"mode {report.mode}"]
    lines += [f"  {k:4s} {_sign(c.verdict.value)}" + ("" if c.holds else f"  witness {ars._jsonable(c.witness)}")
              for k, c in report.conditions.items()]
    lines.append(f"target confluent: {report.target_confluence.verdict.value}")
    lines.append(f"a.s. termination evidence: {'none' if evidence is None else evidence.verdict.value}")
    lines.append(f"conclusion: {conclusion.value}")
    return EXIT_OK, res, lines, [source, target, doc]


def export_dot(system) -> str:
    out = ["digraph pars {"]
    for s in system.states:
        out.append(f"  {json.dumps(s)};")
    for r in system.rules:
        label = "" if r.p is None else f" [label={json.dumps(str(r.p))}]"
        out.append(f"  {json.dumps(r.source)} -> {json.dumps(r.target)}{label};")
    out.append("}")
    return "\n".join(out) + "\n"


def cmd_export_dot(args):
    system = load(args.path)
    if isinstance(system, GeneratedPars):
        system = explore(system, args.depth if args.depth is not None else 10).core
    return EXIT_OK, {"dot": export_dot(system)}, None, [system]


# -- plumbing -------------------------------------------------------------------------

def _default_seed():
    try:
        return int(os.environ.get("PARSKIT_SEED", "0"))
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parskit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"parskit {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the full JSON report")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common])
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", parents=[common])
    p.add_argument("path")
    p.add_argument("--properties", help="comma-separated list; default: the six table properties")
    p.add_argument("--depth", type=int)
    p.add_argument("--iterate", type=int, help="steps for divergence brackets on generated systems")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("prob", parents=[common])
    p.add_argument("path")
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--to")
    p.add_argument("--iterate", type=int)
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("simulate", parents=[common])
    p.add_argument("path")
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--depth", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("certify", parents=[common])
    p.add_argument("path")
    p.add_argument("--certificate", required=True)
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("transform", parents=[common])
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--map", required=True)
    p.add_argument("--mode", choices=["C", "Cprime"])
    p.add_argument("--as-term-cert")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("export-dot", parents=[common])
    p.add_argument("path")
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_export_dot)
    return parser


def _report(args, results, inputs, elapsed):
    rep = {"schema": SCHEMA, "tool": "parskit", "version": __version__,
           "command": args.command, "input_digest": _digest(*inputs), "results": results}
    if getattr(args, "timing", False):
        rep["timing"] = {"seconds": round(elapsed, 6)}
    return rep


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK
    t0 = time.perf_counter()
    try:
        code, results, lines, inputs = args.func(args)
    except CliError as exc:
        code, lines, inputs = exc.code, [f"error: {exc}"], []
        results = {"error": "UsageError", **exc.details, "message": str(exc)}
    except ValidationError as exc:
        code, lines, inputs = EXIT_INVALID, [f"error: {exc}"], []
        results = {"error": "ValidationError", "message": str(exc), "validation": exc.report.to_dict()}
    except ParsError as exc:
        code, lines, inputs = EXIT_REFUSED, [f"error: {exc}"], []
        results = {"error": type(exc).__name__, "message": str(exc)}
    elapsed = time.perf_counter() - t0
    if args.json:
        print(json.dumps(_report(args, results, inputs, elapsed), indent=2, default=str), file=stdout)
    elif args.command == "export-dot" and code == EXIT_OK:
        stdout.write(results["dot"])
    else:
        for line in lines or []:
            print(line, file=stdout)
        if args.timing:
            print(f"({elapsed:.3f} s)", file=stdout)
    return code



def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
