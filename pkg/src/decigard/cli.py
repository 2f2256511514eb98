"""Command-line entry point.

Exit codes, uniform across subcommands:
    0  aligned / halts / closure ok / contradiction demonstrated
    1  misaligned / diverges / closure violation / no answer within fuel
    2  trivial judge, budget exceeded, or verifier divergence
    3  usage or parse errors

Budgets default to desk-scale values and are explicit flags; exceeding one
is a distinct verdict, never a silent truncation. `--workers` (or the
DG_WORKERS variable) parallelizes exhaustive scans without changing any
report byte; `--deterministic` drops the wall-time line so identical runs
are byte-identical.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import List, Optional

from . import diagonal
from .agent import parse_agent
from .guard import clip_guard, filter_model, misalign_model
from .ir import parse_program, print_program
from .judges import parse_judge
from .kernel import (BitVec, DecigardError, ParseError, ResourceExceeded,
                     TrivialJudgeError, Verdict, VerifierDivergence,
                     format_rat, parse_rat)
from .linear import Box, box
from .micro import MicroProgram, assemble_text, from_binary, run_micro
from .regions import network_from_program
from .report import Report
from .verify import (check_final_closure, verify_exhaustive_stats,
                     verify_halting, verify_regions_stats)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_BUDGET = 2
EXIT_USAGE = 3


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _load_model(path: str):
    return parse_program(_read(path))


def _load_judge(path: str):
    return parse_judge(_read(path))


def _load_micro(path: str) -> MicroProgram:
    if path.endswith(".mpa"):
        return assemble_text(_read(path))
    try:
        with open(path, "rb") as handle:
            return from_binary(handle.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _parse_box(spec: str) -> Box:
    los, his = [], []
    for part in spec.split(";"):
        pieces = part.split(",")
        if len(pieces) != 2:
            raise ParseError(f"bad box interval {part!r}")
        los.append(parse_rat(pieces[0]))
        his.append(parse_rat(pieces[1]))
    return box(los, his)


def _emit(report_text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(report_text)
    else:
        sys.stdout.write(report_text)


def _finish(report: Report, args, started: float) -> None:
    if not args.deterministic:
        report.add("wall-time-ms", int((time.monotonic() - started) * 1000))
    _emit(report.render(), args.out)


def _verdict_exit(verdict: Verdict) -> int:
    if verdict.outcome == Verdict.ALIGNED:
        return EXIT_OK
    if verdict.outcome == Verdict.MISALIGNED:
        return EXIT_NEGATIVE
    return EXIT_BUDGET


def _describe_output(output) -> str:
    if isinstance(output, BitVec):
        return str(output)
    return "[" + ", ".join(format_rat(v) for v in output) + "]"


# ---------------------------------------------------------------------------
# verify


def _cmd_verify_exhaustive(args) -> int:
    started = time.monotonic()
    model = _load_model(args.model)
    judge = _load_judge(args.judge)
    width = args.bits if args.bits is not None else judge.in_width
    verdict, stats = verify_exhaustive_stats(
        model, judge, width, max_width=args.max_l, workers=args.workers)
    report = Report("verify.exhaustive")
    report.add("verdict", verdict.outcome)
    report.add("input-bits", width)
    report.add("inputs-total", stats.inputs_total)
    report.add("inputs-checked", stats.inputs_checked)
    report.add("model-fuel-bound", model.fuel_bound)
    report.add("model-steps", stats.model_steps)
    report.add("judge-steps", stats.judge_steps)
    if verdict.counterexample is not None:
        ce_in, ce_out = verdict.counterexample
        report.add("counterexample-input", ce_in)
        report.add("counterexample-output", _describe_output(ce_out))
    if verdict.reason:
        report.add("reason", verdict.reason)
    if verdict.budget:
        report.add("budget", verdict.budget)
        report.add("limit", verdict.limit)
    _finish(report, args, started)
    return _verdict_exit(verdict)


def _cmd_verify_regions(args) -> int:
    started = time.monotonic()
    net = network_from_program(_load_model(args.model))
    judge = _load_judge(args.judge)
    domain = _parse_box(args.box)
    verdict, stats = verify_regions_stats(net, judge, domain,
                                          max_neurons=args.max_neurons)
    report = Report("verify.regions")
    report.add("verdict", verdict.outcome)
    report.add("region-count", stats.region_count)
    report.add("regions-checked", stats.regions_checked)
    report.add("systems-solved", stats.systems_solved)
    if verdict.witness_point is not None:
        report.add_list("witness-point",
                        (format_rat(v) for v in verdict.witness_point))
        report.add_list("witness-output",
                        (format_rat(v) for v in verdict.witness_output))
    if verdict.budget:
        report.add("budget", verdict.budget)
        report.add("limit", verdict.limit)
    _finish(report, args, started)
    return _verdict_exit(verdict)


def _cmd_verify_halting(args) -> int:
    started = time.monotonic()
    agent = parse_agent(_read(args.agent))
    initial = BitVec.from_string(args.initial)
    input_bits = BitVec.from_string(args.input)
    result = verify_halting(agent, initial, input_bits,
                            memory_bound=args.memory_bound,
                            step_budget=args.step_budget)
    report = Report("verify.halting")
    report.add("result", result.status)
    if result.steps is not None:
        report.add("steps", result.steps)
    if result.cycle_start is not None:
        report.add("cycle-start", result.cycle_start)
        report.add("cycle-length", result.cycle_length)
    report.add("states-seen", result.states_seen)
    _finish(report, args, started)
    if result.status == "halts":
        return EXIT_OK
    if result.status == "diverges":
        return EXIT_NEGATIVE
    return EXIT_BUDGET


def _cmd_verify_closure(args) -> int:
    started = time.monotonic()
    agent = parse_agent(_read(args.agent))
    result = check_final_closure(agent, max_state_bits=args.max_state_bits)
    report = Report("verify.closure")
    report.add("result", result.status)
    if result.state is not None:
        report.add("state", result.state)
        report.add("input", result.input_bits)
        report.add("successor", result.successor)
    report.add("pairs-checked", result.pairs_checked)
    _finish(report, args, started)
    return EXIT_OK if result.status == "ok" else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# guard


def _cmd_guard(args) -> int:
    model = _load_model(args.model)
    if args.guard_cmd == "clip":
        guarded = clip_guard(model, parse_rat(args.lo), parse_rat(args.hi))
    else:
        judge = _load_judge(args.judge)
        if args.guard_cmd == "filter":
            guarded = filter_model(model, judge)
        else:
            guarded = misalign_model(model, judge)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(print_program(guarded) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# demo


def _verifier_specs(spec: str) -> List[diagonal.CandidateVerifier]:
    if spec.endswith(".list"):
        entries = [ln.strip() for ln in _read(spec).splitlines()
                   if ln.strip() and not ln.strip().startswith("#")]
        out = []
        for entry in entries:
            out.extend(_verifier_specs(entry))
        return out
    if spec.startswith("zoo:"):
        name = spec[4:]
        if name == "all":
            return diagonal.verifier_zoo()
        try:
            return [diagonal.zoo_member(name)]
        except KeyError:
            raise ParseError(f"unknown zoo verifier {name!r}") from None
    name = os.path.splitext(os.path.basename(spec))[0]
    return [diagonal.CandidateVerifier(name, _load_micro(spec))]


def _default_samples(judge: diagonal.MicroJudge) -> List[bytes]:
    width = len(judge.neg_input)
    if width <= 6:
        samples = [diagonal.bits_to_bytes(v) for v in BitVec.enumerate(width)]
    else:
        samples = [judge.neg_input]
    if judge.neg_input not in samples:
        samples.insert(0, judge.neg_input)
    return samples


def _cmd_demo_adversary(args) -> int:
    started = time.monotonic()
    judge = diagonal.load_micro_judge(_read(args.judge))
    verifiers = _verifier_specs(args.verifier)
    samples = _default_samples(judge)
    blocks = []
    contradicted = 0
    for verifier in verifiers:
        demo = diagonal.demonstrate_contradiction(
            verifier, judge, samples, fuel=args.fuel)
        report = Report("demo.adversary")
        report.add("verifier", demo.verifier)
        report.add("judge", demo.judge)
        report.add("claimed", "aligned" if demo.claimed else "misaligned")
        report.add("contradicted", "yes" if demo.contradicted else "no")
        if demo.contradicting_input is not None:
            report.add("contradicting-input", demo.contradicting_input.hex())
        for k, sample in enumerate(demo.samples):
            report.add(f"sample-{k}",
                       f"{sample.input_bytes.hex() or '-'} -> "
                       f"{sample.output_bytes.hex() or '-'} "
                       f"judge={sample.judge_bit}")
        report.add("verifier-steps", demo.verifier_steps)
        report.add("adversary-bytes", demo.adversary_size)
        blocks.append(report)
        contradicted += 1 if demo.contradicted else 0
    summary = Report("demo.adversary.summary")
    summary.add("verifiers", len(verifiers))
    summary.add("contradicted", contradicted)
    blocks.append(summary)
    text = "\n".join(b.render() for b in blocks)
    if not args.deterministic:
        text += f"wall-time-ms: {int((time.monotonic() - started) * 1000)}\n"
    _emit(text, args.out)
    return EXIT_OK if contradicted == len(verifiers) else EXIT_NEGATIVE


def _cmd_demo_reduction(args) -> int:
    started = time.monotonic()
    machine = _load_micro(args.machine)
    p_pos = _load_micro(args.p_pos)
    try:
        machine_input = bytes.fromhex(args.input) if args.input else b""
    except ValueError as exc:
        raise ParseError(f"bad hex input: {exc}") from None
    reduction = diagonal.build_halting_reduction(machine, machine_input, p_pos)
    probes = [b"", b"\x01", b"\x02\x03"]
    if args.probes:
        probes = [bytes.fromhex(p) if p else b""
                  for p in args.probes.split(",")]
    report = Report("demo.reduction")
    report.add("machine-bytes", len(machine.code))
    report.add("reduction-bytes", len(reduction.code))
    report.add("fuel", args.fuel)
    matches = 0
    answered = 0
    for k, probe in enumerate(probes):
        got = run_micro(reduction, probe, args.fuel)
        want = run_micro(p_pos, probe, args.fuel)
        if got.halted:
            answered += 1
            same = want.halted and got.output == want.output
            matches += 1 if same else 0
            report.add(f"probe-{k}",
                       f"{probe.hex() or '-'} -> {got.output.hex() or '-'} "
                       f"match={'yes' if same else 'no'}")
        else:
            report.add(f"probe-{k}", f"{probe.hex() or '-'} -> no-answer")
    report.add("probes-answered", answered)
    report.add("probes-matched", matches)
    verdict = "behaves-as-p-pos" if answered == len(probes) and \
        matches == len(probes) else "no-halt-within-fuel" if answered == 0 \
        else "mixed"
    report.add("evidence", verdict)
    _finish(report, args, started)
    if verdict == "behaves-as-p-pos":
        return EXIT_OK
    return EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# argument plumbing


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="write the report to a file")
    parser.add_argument("--deterministic", action="store_true",
                        help="suppress the wall-time line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dg", description="decidable-by-construction model toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a verification procedure")
    vsub = verify.add_subparsers(dest="verify_cmd", required=True)

    exhaustive = vsub.add_parser("exhaustive",
                                 help="enumerate every input of width L")
    exhaustive.add_argument("-m", "--model", required=True)
    exhaustive.add_argument("-j", "--judge", required=True)
    exhaustive.add_argument("-L", "--bits", type=int, default=None)
    exhaustive.add_argument("--max-L", dest="max_l", type=int, default=24)
    exhaustive.add_argument("--workers", type=int,
                            default=int(os.environ.get("DG_WORKERS", "1")))
    _add_common(exhaustive)
    exhaustive.set_defaults(func=_cmd_verify_exhaustive)

    regions = vsub.add_parser("regions",
                              help="enumerate linear regions and check each")
    regions.add_argument("-m", "--model", required=True)
    regions.add_argument("-j", "--judge", required=True)
    regions.add_argument("--box", required=True,
                         help="per-dimension lo,hi pairs separated by ';'")
    regions.add_argument("--max-neurons", type=int, default=20)
    _add_common(regions)
    regions.set_defaults(func=_cmd_verify_regions)

    halting = vsub.add_parser("halting",
                              help="decide halting of an unbounded agent loop")
    halting.add_argument("-a", "--agent", required=True)
    halting.add_argument("--initial", required=True, help="initial state bits")
    halting.add_argument("--input", required=True, help="held input bits")
    halting.add_argument("--memory-bound", type=int, default=20)
    halting.add_argument("--step-budget", type=int, default=None)
    _add_common(halting)
    halting.set_defaults(func=_cmd_verify_halting)

    closure = vsub.add_parser("closure",
                              help="check the final-state set is absorbing")
    closure.add_argument("-a", "--agent", required=True)
    closure.add_argument("--max-state-bits", type=int, default=16)
    _add_common(closure)
    closure.set_defaults(func=_cmd_verify_closure)

    guard = sub.add_parser("guard", help="emit a guarded model")
    gsub = guard.add_subparsers(dest="guard_cmd", required=True)
    for name, needs_judge in (("filter", True), ("misalign", True),
                              ("clip", False)):
        g = gsub.add_parser(name)
        g.add_argument("-m", "--model", required=True)
        if needs_judge:
            g.add_argument("-j", "--judge", required=True)
        else:
            g.add_argument("--lo", required=True)
            g.add_argument("--hi", required=True)
        g.add_argument("-o", "--out", required=True)
        g.set_defaults(func=_cmd_guard)

    demo = sub.add_parser("demo", help="undecidability demonstrations")
    dsub = demo.add_subparsers(dest="demo_cmd", required=True)

    adversary = dsub.add_parser("adversary",
                                help="contradict a candidate verifier")
    adversary.add_argument("-v", "--verifier", required=True,
                           help=".mp/.mpa path, zoo:<name>, zoo:all, or .list")
    adversary.add_argument("-j", "--judge", required=True,
                           help="judge file with micro-witness/micro-body")
    adversary.add_argument("--fuel", type=int,
                           default=diagonal.DEFAULT_DEMO_FUEL)
    _add_common(adversary)
    adversary.set_defaults(func=_cmd_demo_adversary)

    reduction = dsub.add_parser("reduction",
                                help="halting reduction construction")
    reduction.add_argument("-m", "--machine", required=True)
    reduction.add_argument("-i", "--input", default="",
                           help="machine input as hex")
    reduction.add_argument("--p-pos", dest="p_pos", required=True)
    reduction.add_argument("--fuel", type=int, default=1_000_000)
    reduction.add_argument("--probes", default=None,
                           help="comma-separated hex probe inputs")
    _add_common(reduction)
    reduction.set_defaults(func=_cmd_demo_reduction)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ParseError, ValueError) as exc:
        print(f"dg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TrivialJudgeError, ResourceExceeded, VerifierDivergence) as exc:
        print(f"dg: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DecigardError as exc:
        print(f"dg: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
