"""Command-line surface for the library.

One binary with subcommands; JSON for structures, CSV for sweeps.  Every
emitted file gets a sibling manifest recording the exact command, resolved
configuration, seed, and output paths — re-running that command reproduces
the emitted files byte for byte (manifests themselves carry timestamps and
are not part of the byte-identity contract).

Exit codes: 0 = pass, 1 = property violation found, 2 = out of regime /
unsupported structure / undecided, 3 = usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .avoider_k4 import avoid_k4
from .avoider_k6 import avoid_k6
from .colouring import decide_arrows, is_proper, rainbow_copies
from .emergence import (
    MARGIN_LINEAR,
    MARGIN_UNIT,
    ScanConfig,
    density_condition,
    janson_bound,
    parse_probability,
    scan_rows_to_csv,
    threshold_scan,
)
from .errors import (
    OutOfRegime,
    ParameterError,
    SearchExhausted,
    StructureUnsupported,
)
from .graph import Graph, clique, graph_from_json, graph_to_json, parse_graph_spec
from .lemma_lab import LEMMA_NAMES, certify_lemma
from .model import sample_perturbed
from .tiled_k8 import avoid_k8_perturbed, colour_tiled, phi
from .verification import (
    _is_total,
    _rainbow_violations,
    _side_rainbow_k4_missing_red,
    _certificate_covers,
    _class_allows,
    check_tiled_corpus,
    results_to_json_dict,
    run_all,
)

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_UNSUPPORTED = 2
EXIT_USAGE = 3


# -- manifests -------------------------------------------------------------------


@dataclass
class RunManifest:
    command: list[str]
    config: dict
    seed: int | None
    version: str
    started: str
    finished: str
    outputs: list[str]
    passed: bool | None

    def to_json(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "config": self.config,
                "seed": self.seed,
                "version": self.version,
                "started": self.started,
                "finished": self.finished,
                "outputs": self.outputs,
                "passed": self.passed,
            },
            indent=2,
            sort_keys=True,
        )


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _manifest_path(output: Path) -> Path:
    if output.is_dir():
        return output / "manifest.json"
    return output.with_name(output.name + ".manifest.json")


def _resolve_output(emit: str, default_name: str) -> Path:
    """Map --emit (file or directory) to the concrete output file path."""
    target = Path(emit)
    if target.suffix == "" and not target.exists():
        target.mkdir(parents=True, exist_ok=True)
    out = target / default_name if target.is_dir() else target
    out.parent.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(args, out: Path, *, passed, started: str) -> None:
    config = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "_argv") and v is not None
    }
    manifest = RunManifest(
        command=["rainbow-lab"] + getattr(args, "_argv", []),
        config=config,
        seed=getattr(args, "seed", None),
        version=__version__,
        started=started,
        finished=_now(),
        outputs=[str(out)],
        passed=passed,
    )
    _manifest_path(out).write_text(manifest.to_json() + "\n")


def _emit(
    args,
    text: str,
    *,
    passed: bool | None,
    started: str,
    default_name: str,
) -> None:
    """Print `text`, and when --emit is set write it plus a manifest."""
    print(text)
    if not getattr(args, "emit", None):
        return
    out = _resolve_output(args.emit, default_name)
    out.write_text(text + ("\n" if not text.endswith("\n") else ""))
    _write_manifest(args, out, passed=passed, started=started)


def _load_graph(spec: str) -> Graph:
    p = Path(spec)
    if spec.endswith(".json") or p.exists():
        try:
            return graph_from_json(p.read_text())
        except OSError as exc:
            raise ParameterError(f"cannot read graph file {spec!r}: {exc}") from exc
    return parse_graph_spec(spec)


def _default_threads(value) -> int:
    if value is not None:
        return value
    env = os.environ.get("RAINBOW_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ParameterError(
                f"RAINBOW_LAB_THREADS must be an integer, got {env!r}"
            ) from exc
    return 1


# -- subcommand handlers -----------------------------------------------------------


def _cmd_construct(args) -> int:
    started = _now()
    g = _load_graph(args.graph)
    _emit(args, graph_to_json(g), passed=True, started=started, default_name="graph.json")
    return EXIT_PASS


def _cmd_decide(args) -> int:
    started = _now()
    g = _load_graph(args.graph)
    h = _load_graph(args.target)
    budget = 200_000_000 if args.budget == "full" else 2_000_000
    verdict = decide_arrows(g, h, node_budget=budget)
    out = {"outcome": verdict.outcome, "nodes": verdict.nodes}
    if verdict.witness is not None:
        out["witness"] = [
            [u, v, verdict.witness.get(u, v)] for u, v in verdict.witness.domain()
        ]
    decided = verdict.outcome in ("arrows", "witness")
    _emit(
        args,
        json.dumps(out, sort_keys=True),
        passed=decided,
        started=started,
        default_name="decision.json",
    )
    return EXIT_PASS if decided else EXIT_UNSUPPORTED


def _run_avoider(args, ell: int) -> int:
    started = _now()
    n = args.n
    p = parse_probability(args.p, n)
    validated = 0
    out_of_regime: list[str] = []
    violations: list[str] = []
    for trial in range(args.trials):
        rng = np.random.default_rng([args.seed, ell, trial])
        instance = sample_perturbed(n, p, rng)
        try:
            if ell == 4:
                psi = avoid_k4(instance)
            elif ell == 6:
                psi = avoid_k6(instance)
            else:
                psi = avoid_k8_perturbed(instance)
        except (StructureUnsupported, OutOfRegime, SearchExhausted) as exc:
            out_of_regime.append(f"trial {trial}: {type(exc).__name__}: {exc}")
            continue
        g = instance.graph()
        if not _is_total(g, psi) or not is_proper(g, psi):
            violations.append(f"trial {trial}: colouring not total+proper")
            continue
        if ell == 8:
            quad = _side_rainbow_k4_missing_red(instance, psi)
            if quad is not None:
                violations.append(f"trial {trial}: rainbow K4 without red at {quad}")
                continue
        rainbow = _rainbow_violations(instance, psi, ell)
        if rainbow:
            violations.append(f"trial {trial}: rainbow K{ell} at {rainbow[0]}")
            continue
        validated += 1

    result = {
        "pattern": f"K{ell}",
        "n": n,
        "p": p,
        "seed": args.seed,
        "trials": args.trials,
        "validated": validated,
        "out_of_regime": out_of_regime,
        "violations": violations,
    }
    passed = not violations and validated > 0
    _emit(
        args,
        json.dumps(result, sort_keys=True),
        passed=passed,
        started=started,
        default_name=f"avoid-k{ell}.json",
    )
    if violations:
        return EXIT_VIOLATION
    if validated == 0:
        return EXIT_UNSUPPORTED
    return EXIT_PASS


def _cmd_tiled(args) -> int:
    started = _now()
    if args.graph is None:
        result = check_tiled_corpus(args.seed, args.budget)
        payload = {
            "summary": result.summary,
            "passed": result.passed,
            **result.details,
        }
        _emit(
            args,
            json.dumps(payload, sort_keys=True),
            passed=result.passed,
            started=started,
            default_name="tiled-corpus.json",
        )
        return EXIT_PASS if result.passed else EXIT_VIOLATION

    g = _load_graph(args.graph)
    f = phi(g)
    psi, cert = colour_tiled(g)
    quads = rainbow_copies(g, psi, clique(4))
    sound = _certificate_covers(cert, quads)
    class_ok = _class_allows(cert, f)
    payload = {
        "phi": f,
        "certificate": {
            "kind": cert.kind,
            "triangle": list(cert.triangle) if cert.triangle else None,
            "matching": [list(e) for e in cert.matching] if cert.matching else None,
        },
        "colours": [[u, v, psi.get(u, v)] for u, v in g.edges],
        "rainbow_k4_count": len(quads),
        "proper": is_proper(g, psi),
        "sound": sound,
        "class_consistent": class_ok,
    }
    ok = sound and class_ok and payload["proper"]
    _emit(
        args,
        json.dumps(payload, sort_keys=True),
        passed=ok,
        started=started,
        default_name="tiled.json",
    )
    return EXIT_PASS if ok else EXIT_VIOLATION


def _cmd_certify(args) -> int:
    started = _now()
    names = LEMMA_NAMES if args.lemma == "all" else (args.lemma,)
    archive_dir = None
    if args.emit:
        target = Path(args.emit)
        archive_dir = target if target.suffix == "" else target.parent
    reports = [
        certify_lemma(name, trials=args.trials, seed=args.seed, archive_dir=archive_dir)
        for name in names
    ]
    payload = {
        "trials": args.trials,
        "seed": args.seed,
        "reports": [r.to_json_dict(include_timing=False) for r in reports],
        "passed": all(r.passed for r in reports),
    }
    _emit(
        args,
        json.dumps(payload, sort_keys=True),
        passed=payload["passed"],
        started=started,
        default_name="certify.json",
    )
    return EXIT_PASS if payload["passed"] else EXIT_VIOLATION


def _cmd_janson(args) -> int:
    started = _now()
    h = _load_graph(args.graph)
    est = janson_bound(h, args.n, args.p)
    _emit(
        args,
        json.dumps(est.to_json_dict(), sort_keys=True),
        passed=True,
        started=started,
        default_name="janson.json",
    )
    return EXIT_PASS


def _cmd_density(args) -> int:
    started = _now()
    h = _load_graph(args.graph)
    try:
        exponent = Fraction(args.exponent)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"exponent {args.exponent!r} is not a fraction") from exc
    report = density_condition(h, exponent, args.margin)
    _emit(
        args,
        json.dumps(report.to_json_dict(), sort_keys=True),
        passed=report.satisfied,
        started=started,
        default_name="density.json",
    )
    return EXIT_PASS if report.satisfied else EXIT_VIOLATION


def _cmd_scan(args) -> int:
    started = _now()
    config = ScanConfig(
        ell=args.ell,
        n_values=tuple(args.n),
        p_specs=tuple(args.p),
        trials=args.trials,
        mode=args.mode,
        seed=args.seed,
        threads=_default_threads(args.threads),
    )
    rows = threshold_scan(config)
    # Emitted files zero the timing column so a re-run reproduces them
    # byte for byte; the console copy keeps measured timings.
    print(scan_rows_to_csv(rows, deterministic=False), end="")
    if args.emit:
        out = _resolve_output(args.emit, "scan.csv")
        out.write_text(scan_rows_to_csv(rows, deterministic=True))
        _write_manifest(args, out, passed=True, started=started)
    return EXIT_PASS


def _cmd_verify_all(args) -> int:
    started = _now()
    threads = _default_threads(args.threads)
    archive_dir = Path(args.emit) / "counterexamples" if args.emit else None
    results = run_all(args.seed, args.budget, threads, archive_dir)
    for r in results:
        print(r.line())
    payload = results_to_json_dict(args.seed, args.budget, results)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.emit:
        target = Path(args.emit)
        target.mkdir(parents=True, exist_ok=True)
        out = target / "results.json"
        out.write_text(text + "\n")
        _write_manifest(args, out, passed=payload["passed"], started=started)
    return EXIT_PASS if payload["passed"] else EXIT_VIOLATION


# -- parser ------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="rainbow-lab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=handler)
        return p

    p = add("construct", _cmd_construct, "build a named graph and print it as JSON")
    p.add_argument("--graph", required=True, help="graph spec (e.g. K5, HatK(3,4)) or JSON file")
    p.add_argument("--emit", help="output file or directory")

    p = add("decide", _cmd_decide, "decide whether every proper colouring yields a rainbow target")
    p.add_argument("--graph", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--budget", choices=("quick", "full"), default="quick")
    p.add_argument("--emit")

    for ell in (4, 6, 8):
        p = add(
            f"avoid-k{ell}",
            lambda a, _ell=ell: _run_avoider(a, _ell),
            f"colour perturbed instances with no rainbow K{ell} and validate",
        )
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--p", required=True, help='probability or "c*n^-a/b" expression')
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=1)
        p.add_argument("--emit")

    p = add("tiled", _cmd_tiled, "colour one K4-tiled graph, or audit a random corpus")
    p.add_argument("--graph", help="graph spec/file; omit to run the corpus audit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", choices=("quick", "full"), default="quick")
    p.add_argument("--emit")

    p = add("certify", _cmd_certify, "randomized falsification runs for the extraction lemmas")
    p.add_argument("--lemma", default="all", help=f"one of {', '.join(LEMMA_NAMES)} or 'all'")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit", help="directory for counterexample archives and the report")

    p = add("janson", _cmd_janson, "nonexistence bound for copies of a pattern in G(n,p)")
    p.add_argument("--graph", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--emit")

    p = add("density", _cmd_density, "check the induced-subgraph density margin")
    p.add_argument("--graph", required=True)
    p.add_argument("--exponent", required=True, help="rational exponent x, e.g. 7/15")
    p.add_argument("--margin", choices=(MARGIN_UNIT, MARGIN_LINEAR), default=MARGIN_UNIT)
    p.add_argument("--emit")

    p = add("scan", _cmd_scan, "Monte Carlo threshold sweep over an (n, p) grid")
    p.add_argument("--mode", required=True,
                   choices=("avoider-success-rate", "containment-rate", "decider-on-tiny"))
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--p", nargs="+", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    p.add_argument("--emit")

    p = add("verify-all", _cmd_verify_all, "run the acceptance suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--budget", choices=("quick", "full"), default="quick")
    p.add_argument("--threads", type=int)
    p.add_argument("--emit", help="directory for results.json and the manifest")

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        args._argv = argv
        return args.func(args)
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StructureUnsupported, OutOfRegime) as exc:
        print(f"out of regime / unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except SearchExhausted as exc:
        print(f"undecided within budget: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
