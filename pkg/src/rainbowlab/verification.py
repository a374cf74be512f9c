"""Acceptance harness behind the ``verify-all`` command.

Each acceptance criterion is a callable producing a :class:`CheckResult`;
``run_all`` composes them.  Results carry no timestamps or timings, so the
JSON rendering of a run is a pure function of (seed, budget) regardless of
thread count.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .avoider_k4 import avoid_k4
from .avoider_k6 import avoid_k6, find_matchings, triangle_union, verify_quadruple
from .colouring import EdgeColouring, decide_arrows, is_proper, rainbow_copies
from .emergence import MARGIN_LINEAR, MARGIN_UNIT, density_condition, janson_bound
from .errors import (
    OutOfRegime,
    ParameterError,
    SearchExhausted,
    StructureUnsupported,
)
from .graph import (
    Graph,
    clique,
    components,
    densities,
    hat_k,
    k_delta,
    r7,
    star,
    t_graph,
)
from .lemma_lab import LEMMA_NAMES, certify_lemma
from .model import PerturbedInstance, sample_perturbed
from .tiled_k8 import (
    RED,
    avoid_k8_perturbed,
    colour_tiled,
    find_stretched_sequence,
    phi,
    random_tiled_graph,
)
from .emergence import verify_structure

BUDGETS = ("quick", "full")

_RESOLVE_BUDGET = 2_000_000


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one acceptance criterion."""

    name: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.summary}"

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "summary": self.summary,
            "details": self.details,
        }


def _require_budget(budget: str) -> None:
    if budget not in BUDGETS:
        raise ParameterError(f"budget must be one of {BUDGETS}, got {budget!r}")


def _is_total(g: Graph, psi: EdgeColouring) -> bool:
    return all(psi.get(u, v) is not None for u, v in g.edges)


def _map_trials(fn, n_trials: int, threads: int) -> list:
    """Apply fn to 0..n_trials-1, in order, optionally on a thread pool.

    Per-trial work derives its randomness from the trial index alone, so
    the reduced list is identical for every thread count.
    """
    if threads <= 1:
        return [fn(t) for t in range(n_trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_trials)))


# -- clique enumeration in perturbed instances ---------------------------------


def _side_cliques(part: Graph, k: int, shift: int) -> list[tuple[int, ...]]:
    if k == 0:
        return [()]
    if k == 1:
        return [(v + shift,) for v in range(part.n)]
    return [tuple(v + shift for v in c) for c in part.cliques(k)]


def perturbed_cliques(instance: PerturbedInstance, r: int) -> list[tuple[int, ...]]:
    """Every r-clique of the perturbed graph.

    The seed is complete bipartite, so an r-set is a clique exactly when
    its intersection with each side is a clique of that side's random
    graph; enumerating side-clique pairs is exhaustive.
    """
    off = instance.u_size
    out = []
    for k in range(r + 1):
        left = _side_cliques(instance.left, k, 0)
        if not left:
            continue
        for right in _side_cliques(instance.right, r - k, off):
            if not right and r - k > 0:
                continue
            for a in left:
                out.append(a + right)
    return out


def _rainbow_violations(instance, psi, r: int) -> list[tuple[int, ...]]:
    found = []
    for vs in perturbed_cliques(instance, r):
        cols = [psi.get(u, v) for u, v in combinations(vs, 2)]
        if None not in cols and len(set(cols)) == len(cols):
            found.append(vs)
    return found


def _side_rainbow_k4_missing_red(instance, psi):
    """A rainbow K4 inside one random half that avoids RED, or None."""
    off = instance.u_size
    for part, shift in ((instance.left, 0), (instance.right, off)):
        for quad in part.cliques(4):
            vs = tuple(v + shift for v in quad)
            cols = [psi.get(u, v) for u, v in combinations(vs, 2)]
            if None not in cols and len(set(cols)) == 6 and RED not in cols:
                return vs
    return None


# -- criterion 1: decide_arrows certificate suite -------------------------------


def check_certificates(budget: str = "quick") -> CheckResult:
    """K3 vs K3 and HatK(3,4) vs K4 arrow; K4 vs K4 and K5 vs K4 witnesses."""
    _require_budget(budget)
    details: dict = {}
    problems: list[str] = []

    cases = [
        ("k3-vs-k3", clique(3), clique(3), "arrows"),
        ("k4-vs-k4", clique(4), clique(4), "witness"),
        ("hatk34-vs-k4", hat_k(3, 4), clique(4), "arrows"),
        ("k5-vs-k4", clique(5), clique(4), "witness"),
    ]
    for label, g, h, want in cases:
        verdict = decide_arrows(g, h, node_budget=50_000_000)
        details[label] = {"outcome": verdict.outcome, "nodes": verdict.nodes}
        if verdict.outcome != want:
            problems.append(f"{label}: expected {want}, got {verdict.outcome}")
        if label == "k5-vs-k4" and verdict.outcome == "witness":
            w = verdict.witness
            rainbow = rainbow_copies(g, w, clique(4))
            good = (
                is_proper(g, w)
                and _is_total(g, w)
                and len(w.colours_used()) == 5
                and not rainbow
            )
            details[label]["witness_colours"] = len(w.colours_used())
            if not good:
                problems.append("k5-vs-k4 witness is not a rainbow-K4-free proper 5-colouring")

    summary = (
        "all four decide_arrows verdicts and the K5 witness check out"
        if not problems
        else "; ".join(problems)
    )
    return CheckResult("certificates", not problems, summary, details)


# -- criterion 2: avoid_k4 sweep -------------------------------------------------


def check_avoid_k4(seed: int, budget: str = "quick", threads: int = 1) -> CheckResult:
    ns = (50, 100, 200, 400)
    cs = (0.3, 0.7)
    per_cell = 63 if budget == "full" else 6
    _require_budget(budget)

    cells = [(ni, ci) for ni in range(len(ns)) for ci in range(len(cs))]
    classified = 0
    unclassified = 0
    violations: list[str] = []

    def one(args):
        ni, ci, trial = args
        n, c = ns[ni], cs[ci]
        rng = np.random.default_rng([seed, 2, ni, ci, trial])
        instance = sample_perturbed(n, c * n ** -1.25, rng)
        try:
            psi = avoid_k4(instance)
        except (StructureUnsupported, OutOfRegime, SearchExhausted) as exc:
            return ("skip", f"n={n} c={c} trial={trial}: {type(exc).__name__}")
        g = instance.graph()
        if not _is_total(g, psi):
            return ("bad", f"n={n} c={c} trial={trial}: colouring not total")
        if not is_proper(g, psi):
            return ("bad", f"n={n} c={c} trial={trial}: colouring not proper")
        rainbow = _rainbow_violations(instance, psi, 4)
        if rainbow:
            return ("bad", f"n={n} c={c} trial={trial}: rainbow K4 at {rainbow[0]}")
        return ("ok", "")

    work = [(ni, ci, t) for ni, ci in cells for t in range(per_cell)]
    results = _map_trials(lambda i: one(work[i]), len(work), threads)
    for kind, msg in results:
        if kind == "ok":
            classified += 1
        elif kind == "skip":
            unclassified += 1
        else:
            violations.append(msg)

    total = len(work)
    rate = classified / total
    passed = not violations and rate >= 0.95
    summary = (
        f"{classified}/{total} classified ({rate:.1%}), zero rainbow K4 on validated"
        if passed
        else f"rate {rate:.1%}, violations: {violations[:3]}"
    )
    details = {
        "instances": total,
        "classified": classified,
        "unclassified": unclassified,
        "violations": violations[:10],
    }
    return CheckResult("avoid-k4-sweep", passed, summary, details)


# -- criterion 3: avoid_k6 sweep -------------------------------------------------


def check_avoid_k6(seed: int, budget: str = "quick", threads: int = 1) -> CheckResult:
    ns = (100, 200, 300)
    per_cell = 100 if budget == "full" else 4
    _require_budget(budget)

    def one(args):
        ni, trial = args
        n = ns[ni]
        rng = np.random.default_rng([seed, 3, ni, trial])
        instance = sample_perturbed(n, n ** -0.7, rng)
        off = instance.u_size
        try:
            for part in (instance.left, instance.right):
                tu = triangle_union(part)
                for sub, _back in components(tu):
                    if sub.m == 0:
                        continue
                    quad = find_matchings(sub)
                    if not verify_quadruple(sub.triangles(), quad):
                        return ("bad", f"n={n} trial={trial}: quadruple fails direct scan")
            psi = avoid_k6(instance)
        except (StructureUnsupported, OutOfRegime, SearchExhausted) as exc:
            return ("skip", f"n={n} trial={trial}: {type(exc).__name__}")
        g = instance.graph()
        if not _is_total(g, psi) or not is_proper(g, psi):
            return ("bad", f"n={n} trial={trial}: colouring not total+proper")
        rainbow = _rainbow_violations(instance, psi, 6)
        if rainbow:
            return ("bad", f"n={n} trial={trial}: rainbow K6 at {rainbow[0]}")
        return ("ok", "")

    work = [(ni, t) for ni in range(len(ns)) for t in range(per_cell)]
    results = _map_trials(lambda i: one(work[i]), len(work), threads)
    ok = sum(1 for kind, _ in results if kind == "ok")
    skipped = [msg for kind, msg in results if kind == "skip"]
    violations = [msg for kind, msg in results if kind == "bad"]

    passed = not violations
    summary = (
        f"{ok}/{len(work)} validated (matchings scan + proper + zero rainbow K6), "
        f"{len(skipped)} out-of-regime"
        if passed
        else f"violations: {violations[:3]}"
    )
    details = {
        "instances": len(work),
        "validated": ok,
        "out_of_regime": len(skipped),
        "violations": violations[:10],
    }
    return CheckResult("avoid-k6-sweep", passed, summary, details)


# -- criterion 4: K4-tiled corpus ------------------------------------------------


def _certificate_covers(cert, quads) -> bool:
    if cert.kind == "no-rainbow":
        return not quads
    if cert.kind == "triangle":
        t = set(cert.triangle)
        return all(t <= set(q) for q in quads)
    matching = cert.matching or ()
    if len(matching) > 3:
        return False
    return all(
        any(u in q and v in q for u, v in matching) for q in quads
    )


def _class_allows(cert, f: int) -> bool:
    if f <= 2:
        return cert.kind == "no-rainbow"
    if f <= 5:
        return cert.rank <= 1
    return cert.rank <= 2


def check_tiled_corpus(seed: int, budget: str = "quick", threads: int = 1) -> CheckResult:
    corpus_size = 10_000 if budget == "full" else 1_000
    resolve_size = 500 if budget == "full" else 75
    _require_budget(budget)

    def one(index):
        # Mixed step counts diversify the deficiency classes; graphs with
        # phi > 7 fall outside the certificate classes and are redrawn.
        rng = random.Random(f"corpus:{seed}:{index}")
        while True:
            g = random_tiled_graph(rng, steps=rng.randint(1, 6))
            f = phi(g)
            if f <= 7:
                break
        problems = []
        try:
            psi, cert = colour_tiled(g)
        except (OutOfRegime, SearchExhausted) as exc:
            return [f"graph {index}: colour_tiled raised {type(exc).__name__}"]
        if not _is_total(g, psi) or not is_proper(g, psi):
            problems.append(f"graph {index}: colouring not total+proper")
        if not _class_allows(cert, f):
            problems.append(f"graph {index}: certificate {cert.kind} not allowed for phi={f}")
        quads = rainbow_copies(g, psi, clique(4))
        if not _certificate_covers(cert, quads):
            problems.append(f"graph {index}: certificate {cert.kind} unsound")
        if index < resolve_size:
            try:
                seq = find_stretched_sequence(g, node_budget=_RESOLVE_BUDGET)
            except SearchExhausted:
                problems.append(f"graph {index}: re-solve budget exhausted")
            else:
                if sorted(seq.all_edges()) != list(g.edges):
                    problems.append(f"graph {index}: re-solved sequence misses edges")
                if seq.phi_value() != f:
                    problems.append(
                        f"graph {index}: phi {f} != 2*gamma+beta value {seq.phi_value()}"
                    )
        return problems

    all_problems: list[str] = []
    for chunk in _map_trials(one, corpus_size, threads):
        all_problems.extend(chunk)

    passed = not all_problems
    summary = (
        f"{corpus_size} graphs: certificates class-consistent and sound, "
        f"phi identity re-solved on {resolve_size}"
        if passed
        else f"violations: {all_problems[:3]}"
    )
    details = {
        "corpus": corpus_size,
        "resolved": resolve_size,
        "violations": all_problems[:10],
    }
    return CheckResult("tiled-corpus", passed, summary, details)


# -- criterion 5: avoid_k8 sweep -------------------------------------------------


def check_avoid_k8(seed: int, budget: str = "quick", threads: int = 1) -> CheckResult:
    ns = (80, 120)
    per_cell = 100 if budget == "full" else 8
    _require_budget(budget)

    def one(args):
        ni, trial = args
        n = ns[ni]
        rng = np.random.default_rng([seed, 5, ni, trial])
        instance = sample_perturbed(n, n ** -0.45, rng)
        off = instance.u_size
        inside = list(instance.left.edges) + [
            (u + off, v + off) for u, v in instance.right.edges
        ]
        random_part = Graph(instance.n, sorted(inside))
        audit = verify_structure(random_part)
        try:
            psi = avoid_k8_perturbed(instance)
        except (StructureUnsupported, OutOfRegime) as exc:
            return ("regime", f"n={n} trial={trial}: {type(exc).__name__}: {exc}")
        except SearchExhausted as exc:
            return ("bad", f"n={n} trial={trial}: SearchExhausted: {exc}")
        if not audit.ok:
            return (
                "bad",
                f"n={n} trial={trial}: colouring produced despite structural "
                f"violation {audit.violations[0].claim}",
            )
        g = instance.graph()
        if not _is_total(g, psi) or not is_proper(g, psi):
            return ("bad", f"n={n} trial={trial}: colouring not total+proper")
        quad = _side_rainbow_k4_missing_red(instance, psi)
        if quad is not None:
            return ("bad", f"n={n} trial={trial}: rainbow K4 without red at {quad}")
        rainbow = _rainbow_violations(instance, psi, 8)
        if rainbow:
            return ("bad", f"n={n} trial={trial}: rainbow K8 at {rainbow[0]}")
        return ("ok", "")

    work = [(ni, t) for ni in range(len(ns)) for t in range(per_cell)]
    results = _map_trials(lambda i: one(work[i]), len(work), threads)
    ok = sum(1 for kind, _ in results if kind == "ok")
    regime = [msg for kind, msg in results if kind == "regime"]
    violations = [msg for kind, msg in results if kind == "bad"]

    total = len(work)
    regime_rate = len(regime) / total
    passed = not violations and regime_rate < 0.05
    summary = (
        f"{ok}/{total} validated (structure + proper + red cover + zero rainbow K8), "
        f"out-of-regime {regime_rate:.1%}"
        if passed
        else f"violations: {violations[:3]}, out-of-regime {regime_rate:.1%}"
    )
    details = {
        "instances": total,
        "validated": ok,
        "out_of_regime": len(regime),
        "out_of_regime_rate": round(regime_rate, 4),
        "violations": violations[:10],
    }
    return CheckResult("avoid-k8-sweep", passed, summary, details)


# -- criterion 6: lemma falsification --------------------------------------------


def check_lemma_falsification(
    seed: int, budget: str = "quick", archive_dir=None
) -> CheckResult:
    trials = 10_000 if budget == "full" else 1_000
    _require_budget(budget)
    details: dict = {"trials_per_lemma": trials, "lemmas": {}}
    failures: list[str] = []
    for name in LEMMA_NAMES:
        report = certify_lemma(name, trials=trials, seed=seed, archive_dir=archive_dir)
        details["lemmas"][name] = {
            "trials": report.trials,
            "failures": report.failures,
            "archive": report.archive,
        }
        if report.failures:
            failures.append(f"{name}: counterexample archived at {report.archive}")
    passed = not failures
    summary = (
        f"{len(LEMMA_NAMES)} extractors x {trials} trials, zero counterexamples"
        if passed
        else "; ".join(failures)
    )
    return CheckResult("lemma-falsification", passed, summary, details)


# -- criterion 7: reference bounds ------------------------------------------------


def check_reference_bounds(budget: str = "quick") -> CheckResult:
    _require_budget(budget)
    problems: list[str] = []
    details: dict = {}

    density_table = [
        ("k3", clique(3), Fraction(2, 3), Fraction(1)),
        ("star4", star(4), Fraction(1), Fraction(1)),
        ("r7", r7(), Fraction(2, 3), Fraction(1, 3)),
        ("t10", t_graph(10), Fraction(2, 3), Fraction(1)),
        ("hatk34", hat_k(3, 4), Fraction(7, 15), Fraction(0)),
        ("kdelta55", k_delta(5, 5), Fraction(7, 15), Fraction(23, 15)),
    ]
    margins = {}
    for label, h, x, want in density_table:
        report = density_condition(h, x, MARGIN_UNIT)
        margins[label] = str(report.min_value)
        if report.min_value != want:
            problems.append(f"{label}: min {report.min_value} != {want}")
        if not report.satisfied:
            problems.append(f"{label}: margin omega(1) unexpectedly unsatisfied")
    details["density_minima"] = margins

    degen = density_condition(k_delta(25, 49), Fraction(7, 15), MARGIN_LINEAR)
    details["kdelta2549_strategy"] = degen.strategy
    if not (degen.strategy == "degeneracy" and degen.satisfied):
        problems.append("kdelta(25,49) degeneracy certificate did not hold")

    worst_rel = 0.0
    for n, p in [(10, 0.5), (10, 0.001), (100, 0.01), (100, 0.001), (316, 0.001), (2000, 1e-6)]:
        est = janson_bound(clique(2), n, p)
        target = math.exp(-math.comb(n, 2) * p)
        rel = abs(est.nonexistence_bound - target) / target
        worst_rel = max(worst_rel, rel)
    details["janson_k2_worst_rel_error"] = worst_rel
    if worst_rel > 1e-12:
        problems.append(f"janson_bound(K2) off by {worst_rel:.2e} relative")

    m2_exact = all(
        densities(clique(r)).m2 == Fraction(r + 1, 2) for r in range(3, 13)
    )
    details["m2_clique_identity"] = m2_exact
    if not m2_exact:
        problems.append("m2(K_r) != (r+1)/2 for some r in 3..12")

    passed = not problems
    summary = (
        "density minima, janson K2 closed form, and m2 clique identity all exact"
        if passed
        else "; ".join(problems)
    )
    return CheckResult("reference-bounds", passed, summary, details)


# -- composition -----------------------------------------------------------------


def run_all(
    seed: int,
    budget: str = "quick",
    threads: int = 1,
    archive_dir=None,
) -> list[CheckResult]:
    """Run every acceptance criterion; deterministic w.r.t. (seed, budget)."""
    _require_budget(budget)
    return [
        check_certificates(budget),
        check_avoid_k4(seed, budget, threads),
        check_avoid_k6(seed, budget, threads),
        check_tiled_corpus(seed, budget, threads),
        check_avoid_k8(seed, budget, threads),
        check_lemma_falsification(seed, budget, archive_dir),
        check_reference_bounds(budget),
    ]


def results_to_json_dict(seed: int, budget: str, results) -> dict:
    return {
        "seed": seed,
        "budget": budget,
        "passed": all(r.passed for r in results),
        "results": [r.to_json_dict() for r in results],
    }
