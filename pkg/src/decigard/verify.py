"""Decidable verification procedures.

verify_exhaustive enumerates the full 2^L input space in lexicographic
order; verify_regions checks one linear system per activation region of a
piecewise-linear network; verify_halting and check_final_closure decide
halting and absorbing-set closure for bounded agents by exact simulation
and full transition scans.

Exhaustive scans can be partitioned across worker processes. The verdict,
the reported counterexample, and all report counters are computed from the
canonical prefix that ends at the first violation, so results are
byte-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .agent import AgentLoop, step_once
from .kernel import (BitVec, DEFAULT_MAX_ENUM_BITS, JudgeKindError, Rat,
                     RatVec, ResourceExceeded, Verdict, WidthError)
from .ir import TotalProgram, bits, eval_program
from .judges import (Judge, LinAnd, LinAtom, LinExpr, LinOr, check_nontrivial,
                     eval_judge_with_steps)
from .linear import Box, Ineq, find_point
from .regions import PwlNetwork, Region, enumerate_regions, forward

CHUNK = 1 << 12  # inputs per work unit; fixed so reports ignore worker count

DEFAULT_MEMORY_BOUND = 20
DEFAULT_CLOSURE_BITS = 16


@dataclass(frozen=True)
class ExhaustiveStats:
    inputs_total: int
    inputs_checked: int
    model_steps: int
    judge_steps: int


def _scan_range(model: TotalProgram, judge: Judge, width: int,
                lo: int, hi: int):
    """Scan inputs [lo, hi); returns the first violation and step totals.

    The cumulative counters are reported twice: frozen at the violation
    (canonical prefix) and for the full range (used when no earlier chunk
    violates first).
    """
    model_steps = judge_steps = 0
    for value in range(lo, hi):
        i = BitVec(width, value)
        output, m_steps = eval_program(model, i)
        bit, j_steps = eval_judge_with_steps(judge, i, output)
        model_steps += m_steps
        judge_steps += j_steps
        if bit != 1:
            return value, output, model_steps, judge_steps
    return None, None, model_steps, judge_steps


def verify_exhaustive_stats(
        model: TotalProgram, judge: Judge, width: int, *,
        max_width: int = DEFAULT_MAX_ENUM_BITS, workers: int = 1,
        nontrivial_checked: bool = False) -> Tuple[Verdict, ExhaustiveStats]:
    """Verdict plus deterministic counters for reporting."""
    empty = ExhaustiveStats(1 << width, 0, 0, 0)
    if width > max_width:
        return Verdict.resource_exceeded("max_input_bits", max_width), empty
    if model.in_shape != bits(width):
        raise WidthError(f"model consumes {model.in_shape}, asked bits {width}")
    if judge.in_width != width:
        raise WidthError(f"judge in={judge.in_width}, asked {width}")
    if not nontrivial_checked:
        check = check_nontrivial(judge, width, max_width=max_width)
        if not check:
            if check.status == Verdict.TRIVIAL_JUDGE:
                return Verdict.trivial_judge(check.reason), empty
            return Verdict.resource_exceeded("max_input_bits", max_width), empty

    total = 1 << width
    chunks = [(lo, min(lo + CHUNK, total)) for lo in range(0, total, CHUNK)]
    results = []
    if workers <= 1 or len(chunks) == 1:
        for lo, hi in chunks:
            result = _scan_range(model, judge, width, lo, hi)
            results.append(result)
            if result[0] is not None:
                break
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_scan_range, model, judge, width, lo, hi)
                       for lo, hi in chunks]
            try:
                for future in futures:
                    result = future.result()
                    results.append(result)
                    if result[0] is not None:
                        break  # strictly later chunks are cancelled below
            finally:
                for future in futures:
                    future.cancel()

    model_steps = judge_steps = 0
    checked = 0
    for (lo, hi), (viol, output, m_steps, j_steps) in zip(chunks, results):
        model_steps += m_steps
        judge_steps += j_steps
        if viol is not None:
            checked += viol - lo + 1
            stats = ExhaustiveStats(total, checked, model_steps, judge_steps)
            return Verdict.misaligned(BitVec(width, viol), output), stats
        checked += hi - lo
    stats = ExhaustiveStats(total, checked, model_steps, judge_steps)
    return Verdict.aligned(), stats


def verify_exhaustive(model: TotalProgram, judge: Judge, width: int, *,
                      max_width: int = DEFAULT_MAX_ENUM_BITS, workers: int = 1,
                      nontrivial_checked: bool = False) -> Verdict:
    """Check judge(i, model(i)) = 1 for every one of the 2^L inputs.

    Misaligned verdicts carry the lexicographically smallest violating
    input and the model's output on it.
    """
    verdict, _ = verify_exhaustive_stats(
        model, judge, width, max_width=max_width, workers=workers,
        nontrivial_checked=nontrivial_checked)
    return verdict


# ---------------------------------------------------------------------------
# Region verification


@dataclass(frozen=True)
class RegionStats:
    region_count: int
    regions_checked: int
    systems_solved: int


def _negation_branches(expr: LinExpr) -> List[List[LinAtom]]:
    """DNF of the negated expression; each branch lists atoms to violate."""
    if isinstance(expr, LinAtom):
        return [[expr]]
    if isinstance(expr, LinAnd):
        branches: List[List[LinAtom]] = []
        for child in expr.children:
            branches.extend(_negation_branches(child))
        return branches
    assert isinstance(expr, LinOr)
    branches = [[]]
    for child in expr.children:
        child_branches = _negation_branches(child)
        branches = [base + extra for base in branches
                    for extra in child_branches]
    return branches


def _violated_atom_row(atom: LinAtom, region: Region, dim: int) -> Ineq:
    """Substitute o = A x + b into the atom and negate it (strictly)."""
    x_part = list(atom.coeffs[:dim])
    o_part = atom.coeffs[dim:]
    const = atom.const
    for co, row, bias in zip(o_part, region.map_matrix, region.map_bias):
        if co:
            for k in range(dim):
                x_part[k] += co * row[k]
            const += co * bias
    # not(const + cx >= 0)  ==  -const - cx > 0
    return Ineq(tuple(-c for c in x_part), -const, True)


def verify_regions_stats(
        net: PwlNetwork, judge: Judge, domain: Box, *,
        max_neurons: int = 20) -> Tuple[Verdict, RegionStats]:
    if judge.kind != "linear":
        raise JudgeKindError("region verification needs a linear judge")
    dim = net.input_dim
    if judge.in_width != dim or judge.out_width != net.output_dim:
        raise WidthError(
            f"judge ({judge.in_width},{judge.out_width}) does not match "
            f"network ({dim},{net.output_dim})")
    try:
        regions = enumerate_regions(net, domain, max_neurons=max_neurons)
    except ResourceExceeded as exc:
        return (Verdict.resource_exceeded(exc.budget, exc.limit),
                RegionStats(0, 0, 0))
    branches = _negation_branches(judge.linear)
    solved = 0
    for checked, region in enumerate(regions, start=1):
        base = list(region.constraints)
        for branch in branches:
            rows = base + [_violated_atom_row(a, region, dim) for a in branch]
            solved += 1
            point = find_point(rows, dim)
            if point is not None:
                output = forward(net, point)
                return (Verdict.misaligned_at_point(point, output),
                        RegionStats(len(regions), checked, solved))
    return Verdict.aligned(), RegionStats(len(regions), len(regions), solved)


def verify_regions(net: PwlNetwork, judge: Judge, domain: Box, *,
                   max_neurons: int = 20) -> Verdict:
    """Aligned iff no region admits a point violating the linear judge.

    A misaligned verdict carries an exact rational witness point inside
    the violating polytope together with the network output there.
    """
    verdict, _ = verify_regions_stats(net, judge, domain,
                                      max_neurons=max_neurons)
    return verdict


# ---------------------------------------------------------------------------
# Halting and closure


HALTS = "halts"
DIVERGES = "diverges"
RESOURCE = "resource_exceeded"


@dataclass(frozen=True)
class HaltingResult:
    status: str                      # halts | diverges | resource_exceeded
    steps: Optional[int] = None      # defined when halts
    cycle_start: Optional[int] = None
    cycle_length: Optional[int] = None
    states_seen: int = 0


def verify_halting(a: AgentLoop, initial_state: BitVec, input_bits: BitVec, *,
                   memory_bound: int = DEFAULT_MEMORY_BOUND,
                   step_budget: Optional[int] = None) -> HaltingResult:
    """Decide the unbounded loop (theta ignored) by exact simulation.

    Every configuration is recorded; a revisit proves divergence, reaching
    the final-state set proves halting. With the default pigeonhole budget
    of 2^state_width + 1 steps one of the two always happens.
    """
    if a.state_width > memory_bound:
        raise ResourceExceeded("memory_bits", memory_bound)
    if initial_state.width != a.state_width:
        raise WidthError("initial state width mismatch")
    if input_bits.width != a.input_width:
        raise WidthError("input width mismatch")
    budget = step_budget if step_budget is not None \
        else (1 << a.state_width) + 1
    seen = {initial_state: 0}
    state = initial_state
    for step in range(budget):
        if state in a.final_states:
            return HaltingResult(HALTS, steps=step, states_seen=len(seen))
        state, _ = step_once(a, state, input_bits)
        first = seen.get(state)
        if first is not None:
            return HaltingResult(DIVERGES, cycle_start=first,
                                 cycle_length=step + 1 - first,
                                 states_seen=len(seen))
        seen[state] = step + 1
    if state in a.final_states:
        return HaltingResult(HALTS, steps=budget, states_seen=len(seen))
    return HaltingResult(RESOURCE, states_seen=len(seen))


OK = "ok"
VIOLATION = "violation"


@dataclass(frozen=True)
class ClosureResult:
    status: str                          # ok | violation
    state: Optional[BitVec] = None
    input_bits: Optional[BitVec] = None
    successor: Optional[BitVec] = None
    pairs_checked: int = 0


def check_final_closure(a: AgentLoop, *,
                        max_state_bits: int = DEFAULT_CLOSURE_BITS) -> ClosureResult:
    """Check the final-state set is absorbing under every input.

    Scans (state, input) pairs in lexicographic order and reports the
    first transition that escapes the set.
    """
    if a.state_width > max_state_bits:
        raise ResourceExceeded("state_bits", max_state_bits)
    if a.input_width > max_state_bits:
        raise ResourceExceeded("input_bits", max_state_bits)
    checked = 0
    for state in sorted(a.final_states):
        for input_bits in BitVec.enumerate(a.input_width):
            successor, _ = step_once(a, state, input_bits)
            checked += 1
            if successor not in a.final_states:
                return ClosureResult(VIOLATION, state, input_bits, successor,
                                     checked)
    return ClosureResult(OK, pairs_checked=checked)
