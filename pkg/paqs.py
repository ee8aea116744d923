#!/usr/bin/env python3
"""
paqs - paraconsistent quantum situations

Command-line front end: quantum situations of a scenario, seeded
measurement runs with the square-of-opposition and non-collapse reports,
Schrodinger evolution, C1 logic verdicts, subspace-lattice law checks and
reports over recorded runs.

    python paqs.py situations stern_gerlach
    python paqs.py measure stern_gerlach --record
    python paqs.py logic check "(A & ~A) -> B" --expect invalid
    python paqs.py lattice verify --dim 2 3 4 --trials 1000 --seed 7
"""
import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import config
import experiment_db
import experiment_report
from errors import EXIT_NEGATIVE, EXIT_OK, PaqsError, ProofScriptError, ScenarioReferenceError
from hilbert import encode_vector
from logic_c1 import (check_proof, format_formula, is_valid, parse_formula, parse_proof_script,
                      render_valuation, trivializes)
from omlattice import commutes, distributivity_witness, verify_lattice_laws
from powers import (Consistency, build_quantum_situation, effectuations, evolve_psa, p_true_statements,
                    potential_consistency_check, psa_fingerprint, run_experiment, square_of_opposition_check,
                    superposition_formula)
from rng import GENERATOR_NAME, ShotStream, draw_seed
from scenario import ExperimentBlock, load_scenario

logger = logging.getLogger("paqs")

fmt = config.fmt_real


def emit(args, payload, lines):
    """Print either the text transcript or one JSON document"""
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in lines:
            print(line)


def _round(x):
    return config.round_sig(x)


# ---------------------------------------------------------------------------
# situations
# ---------------------------------------------------------------------------

def _situation_lines(qs):
    lines = [f"📊 QS({qs.psa_id}, {qs.basis_label}) = {qs.superposition_text()}",
             f"   {'Power':<12} | {'Potentia':>15}",
             "   " + "-" * 30]
    for power, p in qs.pairs:
        lines.append(f"   {power.name:<12} | {fmt(p):>15}")
    for s in p_true_statements(qs):
        lines.append(f"   ✅ p-true: ({s.power}, {fmt(s.potentia)})")
    lines.append("")
    return lines


def cmd_situations(args):
    scenario = load_scenario(args.scenario)
    psa_ids = [args.psa] if args.psa else list(scenario.psas)
    labels = args.basis or list(scenario.bases)
    situations = [scenario.situation(psa_id, label) for psa_id in psa_ids for label in labels]

    lines = []
    for qs in situations:
        lines.extend(_situation_lines(qs))
    payload = {"scenario": scenario.name, "situations": [
        {"psa": qs.psa_id, "basis": qs.basis_label,
         "pairs": [{"power": power.name, "potentia": _round(p)} for power, p in qs.pairs]}
        for qs in situations]}
    emit(args, payload, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# measure
# ---------------------------------------------------------------------------

def _blocks(args, scenario):
    if args.psa or args.basis:
        if not (args.psa and args.basis):
            raise ScenarioReferenceError("--psa and --basis must be given together")
        return [ExperimentBlock(args.psa, args.basis, args.shots or 1000, args.seed)]
    blocks = []
    for index, block in enumerate(scenario.experiments):
        seed = block.seed
        if args.seed is not None:
            # one --seed, an independent stream per block
            seed = ShotStream(args.seed).for_path(block.psa, block.basis, index).seed
        blocks.append(ExperimentBlock(block.psa, block.basis, args.shots or block.shots, seed))
    if not blocks:
        raise ScenarioReferenceError(f"Scenario {scenario.name!r} has no experiment blocks; give --psa and --basis")
    return blocks


def _run_block(scenario, block):
    psa = scenario.psa(block.psa)
    qs = build_quantum_situation(psa, scenario.basis(block.basis))
    before = psa_fingerprint(psa)
    result = run_experiment(qs, block.shots, block.seed)
    oppositions = [square_of_opposition_check(pair, effectuations(qs, block.shots, block.seed))
                   for pair in scenario.pairs_for(block.basis)]
    after = psa_fingerprint(psa)
    return result, oppositions, before, after


def cmd_measure(args):
    scenario = load_scenario(args.scenario)
    blocks = _blocks(args, scenario)
    lines = []
    seeded = []
    for block in blocks:
        if block.seed is None:
            seed = draw_seed()
            lines.append(f"⚠️  No seed for ({block.psa}, {block.basis}); drew seed {seed}")
            block = ExperimentBlock(block.psa, block.basis, block.shots, seed)
        seeded.append(block)

    # output always follows declaration order, whatever the pool does
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        outcomes = list(pool.map(lambda b: _run_block(scenario, b), seeded))

    status = EXIT_OK
    payload = {"scenario": scenario.name, "generator": GENERATOR_NAME, "experiments": []}
    for result, oppositions, before, after in outcomes:
        lines.append(f"📊 Experiment ({result.psa_id}, {result.basis_label}): "
                     f"{result.shots} shots, seed {result.seed} ({GENERATOR_NAME})")
        lines.append(f"   {'Power':<12} | {'Potentia':>15} | {'Count':>8} | {'Frequency':>15} | {'4-sigma bound':>15}")
        lines.append("   " + "-" * 78)
        for _, row in result.to_frame().iterrows():
            inside = abs(row["Frequency"] - row["Potentia"]) <= row["Bound"] + 1e-12
            lines.append(f"   {row['Power']:<12} | {fmt(row['Potentia']):>15} | {row['Count']:>8} | "
                         f"{fmt(row['Frequency']):>15} | {fmt(row['Bound']):>15} {'✅' if inside else '⚠️'}")
        for report in oppositions:
            mark = "✅" if report.passed else "❌"
            lines.append(f"   {mark} Square of opposition {report.pair.power_a}/{report.pair.power_b}: "
                         f"{report.checked} effectuations, {len(report.violations)} violations")
        unchanged = before == after
        lines.append(f"   🔒 PSA hash before {before[:16]}, after {after[:16]} "
                     f"{'✅ unchanged' if unchanged else '❌ CHANGED'}")
        if args.record:
            run_id = experiment_db.record_run(args.db, result, scenario.name, after)
            lines.append(f"   💾 Recorded as run {run_id} in {args.db}")
        lines.append("")
        if not unchanged or not all(r.passed for r in oppositions):
            status = EXIT_NEGATIVE

        payload["experiments"].append({
            "psa": result.psa_id, "basis": result.basis_label, "shots": result.shots, "seed": result.seed,
            "powers": [{"power": n, "potentia": _round(p), "count": c, "frequency": _round(c / result.shots)}
                       for n, p, c in zip(result.names, result.potentias, result.counts)],
            "within_bounds": result.within_bounds(),
            "opposition": [{"pair": [r.pair.power_a, r.pair.power_b], "checked": r.checked,
                            "violations": len(r.violations)} for r in oppositions],
            "psa_hash_before": before, "psa_hash_after": after,
        })
    emit(args, payload, lines)
    return status


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------

def cmd_evolve(args):
    scenario = load_scenario(args.scenario)
    evolution = scenario.evolution
    psa_id = args.psa or (evolution.psa if evolution else None)
    label = args.basis or (evolution.basis if evolution else None)
    h_name = args.hamiltonian or (evolution.hamiltonian if evolution else None)
    times = args.times or (list(evolution.times) if evolution else None)
    if not (psa_id and label and h_name and times):
        raise ScenarioReferenceError(
            f"Scenario {scenario.name!r} has no evolution block; give --psa, --basis, --hamiltonian and --times")
    hbar = args.hbar if args.hbar is not None else (evolution.hbar if evolution else 1.0)

    psa, basis, h = scenario.psa(psa_id), scenario.basis(label), scenario.observable(h_name)
    lines = [f"⏱️  Evolution of {psa_id} under {h_name} (hbar = {fmt(hbar)}), read in basis {label}"]
    payload = {"scenario": scenario.name, "psa": psa_id, "hamiltonian": h_name, "basis": label,
               "hbar": _round(hbar), "steps": []}
    for t in times:
        evolved = evolve_psa(psa, h, t, hbar)
        qs = build_quantum_situation(evolved, basis)
        cells = "  ".join(f"{power.name}={fmt(p)}" for power, p in qs.pairs)
        lines.append(f"   t = {fmt(t):<15} {cells}")
        payload["steps"].append({"t": _round(t), "psi": encode_vector(evolved.psi.amplitudes),
                                 "potentia": {power.name: _round(p) for power, p in qs.pairs}})
    emit(args, payload, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# logic
# ---------------------------------------------------------------------------

def _expectation(args, outcome):
    if args.expect and args.expect != outcome:
        return EXIT_NEGATIVE
    return EXIT_OK


def cmd_logic_check(args):
    f = parse_formula(args.formula)
    verdict = is_valid(f, args.max_closure)
    outcome = "valid" if verdict.valid else "invalid"
    lines = [f"{'✅ VALID' if verdict.valid else '❌ INVALID'}: {format_formula(f)}"]
    payload = {"formula": format_formula(f), "verdict": outcome}
    if verdict.countermodel is not None:
        lines.append("   Countermodel:")
        lines.extend(f"     {line}" for line in render_valuation(verdict.countermodel))
        payload["countermodel"] = verdict.countermodel.as_dict()
    emit(args, payload, lines)
    return _expectation(args, outcome)


def _scenario_formulas(args):
    if not (args.psa and args.basis):
        raise ScenarioReferenceError("--scenario needs --psa and --basis")
    scenario = load_scenario(args.scenario)
    qs = scenario.situation(args.psa, args.basis)
    return superposition_formula(qs, scenario.pairs_for(args.basis), reinforce=args.reinforce)


def cmd_logic_trivial(args):
    formulas = [parse_formula(text) for text in args.formulas]
    if args.scenario:
        formulas.extend(_scenario_formulas(args))
    formulas = tuple(dict.fromkeys(formulas))

    verdict = trivializes(formulas, args.max_closure)
    report = potential_consistency_check(formulas, args.max_closure)
    outcome = "trivial" if verdict.trivial else "nontrivial"
    shown = "{" + ", ".join(format_formula(f) for f in formulas) + "}"
    lines = [f"{'❌ TRIVIAL' if verdict.trivial else '✅ NONTRIVIAL'}: {shown}",
             f"   Classification: {report.classification.value}"]
    payload = {"formulas": [format_formula(f) for f in formulas], "verdict": outcome,
               "classification": report.classification.value}
    if report.classification is Consistency.WEAKLY_INCONSISTENT_NONTRIVIAL:
        lines.append("   Weak contradictions on: " + ", ".join(format_formula(a) for a in report.contradictions))
        payload["contradictions"] = [format_formula(a) for a in report.contradictions]
    if verdict.witness is not None:
        lines.append("   Witness:")
        lines.extend(f"     {line}" for line in render_valuation(verdict.witness))
        payload["witness"] = verdict.witness.as_dict()
    emit(args, payload, lines)
    return _expectation(args, outcome)


def cmd_logic_proof(args):
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as e:
        raise ProofScriptError(f"Cannot read proof script {args.file!r}: {e.strerror}") from e
    result = check_proof(parse_proof_script(text))
    if result.ok:
        lines = [f"✅ PROOF ACCEPTED: {format_formula(result.proved)}"]
        if result.hypotheses:
            lines.append("   from hypotheses: " + ", ".join(format_formula(h) for h in result.hypotheses))
        payload = {"verdict": "accepted", "proved": format_formula(result.proved),
                   "hypotheses": [format_formula(h) for h in result.hypotheses]}
    else:
        lines = [f"❌ PROOF REJECTED at step {result.step}: {result.reason}"]
        payload = {"verdict": "rejected", "step": result.step, "reason": result.reason}
    emit(args, payload, lines)
    return EXIT_OK if result.ok else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# lattice
# ---------------------------------------------------------------------------

def cmd_lattice_verify(args):
    report = verify_lattice_laws(args.dim, args.trials, args.seed)
    lines = [f"🔷 Lattice laws over dims {', '.join(map(str, report.dims))}: "
             f"{report.trials} cases, seed {report.seed}"]
    for _, row in report.frame.iterrows():
        mark = "✅" if row["Failures"] == 0 else "❌"
        lines.append(f"   {mark} {row['Law']:<24} {row['Checked']:>6} checked, {row['Failures']} failures")
    payload = {"dims": list(report.dims), "trials": report.trials, "seed": report.seed,
               "laws": [{"law": row["Law"], "checked": int(row["Checked"]), "failures": int(row["Failures"])}
                        for _, row in report.frame.iterrows()],
               "passed": report.passed}
    emit(args, payload, lines)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_lattice_witness(args):
    w = distributivity_witness(args.dim)
    lines = [f"🔷 Distributivity fails in dimension {args.dim}:",
             "   a = span{e1}, b = span{e2}, c = span{(e1 + e2)/sqrt 2}",
             f"   c ^ (a v b)         has rank {w.lhs.rank} (equals c: {w.lhs == w.c})",
             f"   (c ^ a) v (c ^ b)   has rank {w.rhs.rank}",
             f"   a and c commute: {commutes(w.a, w.c)}"]
    payload = {"dim": args.dim, "a_c_commute": commutes(w.a, w.c),
               **{k: getattr(w, k).to_json() for k in ("a", "b", "c", "lhs", "rhs")}}
    emit(args, payload, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def cmd_report(args):
    if args.clear:
        removed = experiment_db.clear_runs(args.db)
        emit(args, {"cleared": removed}, [f"✅ Cleared {removed} recorded runs from {args.db}"])
        return EXIT_OK
    summary = experiment_report.summarize_runs(experiment_db.load_runs(args.db))
    if args.format == "json":
        emit(args, {"db": args.db, "summary": json.loads(summary.to_json(orient="records"))}, [])
    else:
        experiment_report.display_header()
        experiment_report.show_summary(summary)
    if args.export:
        experiment_report.export_report_to_csv(summary, args.export)
        if args.format != "json":
            print(f"📄 Summary exported to {args.export}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser(settings):
    parser = argparse.ArgumentParser(prog="paqs", description="Paraconsistent quantum situations toolkit")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--log-level", choices=config.LOG_LEVELS, default=settings.log_level)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("situations", help="Quantum situations of a PSA in each basis")
    p.add_argument("scenario")
    p.add_argument("--psa")
    p.add_argument("--basis", nargs="+")
    p.set_defaults(handler=cmd_situations)

    p = sub.add_parser("measure", help="Seeded measurement runs (non-collapse)")
    p.add_argument("scenario")
    p.add_argument("--psa")
    p.add_argument("--basis")
    p.add_argument("--shots", type=_positive_int)
    p.add_argument("--seed", type=_seed, help="Base seed; each scenario block derives its own stream from it")
    p.add_argument("--record", action="store_true", help="Store results in the experiment ledger")
    p.add_argument("--db", default=settings.db_path)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.set_defaults(handler=cmd_measure)

    p = sub.add_parser("evolve", help="Potentia along a Schrodinger trajectory")
    p.add_argument("scenario")
    p.add_argument("--psa")
    p.add_argument("--basis")
    p.add_argument("--hamiltonian")
    p.add_argument("--times", type=float, nargs="+")
    p.add_argument("--hbar", type=float)
    p.set_defaults(handler=cmd_evolve)

    logic = sub.add_parser("logic", help="C1 verdicts").add_subparsers(dest="logic_command", required=True)
    p = logic.add_parser("check", help="Validity of one formula")
    p.add_argument("formula")
    p.add_argument("--expect", choices=("valid", "invalid"))
    p.add_argument("--max-closure", type=_positive_int, default=settings.max_closure)
    p.set_defaults(handler=cmd_logic_check)

    p = logic.add_parser("trivial", help="Triviality of a formula set")
    p.add_argument("formulas", nargs="*")
    p.add_argument("--scenario")
    p.add_argument("--psa")
    p.add_argument("--basis")
    p.add_argument("--reinforce", action="store_true")
    p.add_argument("--expect", choices=("trivial", "nontrivial"))
    p.add_argument("--max-closure", type=_positive_int, default=settings.max_closure)
    p.set_defaults(handler=cmd_logic_trivial)

    p = logic.add_parser("proof", help="Check a Hilbert-style proof script")
    p.add_argument("file")
    p.set_defaults(handler=cmd_logic_proof)

    lattice = sub.add_parser("lattice", help="Subspace lattice").add_subparsers(dest="lattice_command", required=True)
    p = lattice.add_parser("verify", help="Lattice laws on seeded random cases")
    p.add_argument("--dim", type=int, nargs="+", default=[2, 3, 4])
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=_seed, default=7)
    p.set_defaults(handler=cmd_lattice_verify)

    p = lattice.add_parser("witness", help="Distributivity counterexample")
    p.add_argument("--dim", type=int, default=2)
    p.set_defaults(handler=cmd_lattice_witness)

    p = sub.add_parser("report", help="Summary of recorded runs")
    p.add_argument("--db", default=settings.db_path)
    p.add_argument("--export", metavar="FILE")
    p.add_argument("--clear", action="store_true")
    p.set_defaults(handler=cmd_report)
    return parser


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2**64), got {value}")
    return value


def main(argv=None):
    try:
        settings = config.load_settings()
    except PaqsError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code

    args = build_parser(settings).parse_args(argv)
    config.setup_logging(args.log_level)
    try:
        return args.handler(args)
    except PaqsError as e:
        logger.debug("command failed", exc_info=True)
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
