"""Agent loops: a total step model iterated under a global theta bound.

The loop stops as soon as the state enters the declared final-state set.
If theta runs out first, the final step's output is masked with a fixed
terminal output, so every trace has length at most theta regardless of the
step model's dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Tuple

from .kernel import BitVec, ParseError, StructureError, WidthError
from .ir import (Node, Shape, TotalProgram, _TokenStream, _parse_int,
                 _parse_node, _print_node, _tokenize, bits, eval_program,
                 program)

# Desk-scale budget for the absorbing set, 2^5 states.
MAX_FINAL_STATES = 32

TERMINAL_STATE = "terminal_state"
THETA_EXHAUSTED = "theta_exhausted"


@dataclass(frozen=True)
class AgentLoop:
    step: TotalProgram                  # bits(state+input) -> bits(state+output)
    theta: int
    final_states: FrozenSet[BitVec]
    state_width: int
    input_width: int
    terminal_output: Optional[BitVec] = None  # defaults to zeros

    def __post_init__(self):
        if self.theta < 1:
            raise StructureError("theta must be >= 1")
        if not self.final_states:
            raise StructureError("final-state set must be non-empty")
        if len(self.final_states) > MAX_FINAL_STATES:
            raise StructureError(
                f"final-state set over budget {MAX_FINAL_STATES}")
        if self.step.in_shape != bits(self.state_width + self.input_width):
            raise StructureError(
                f"step model consumes {self.step.in_shape}, agent declares "
                f"bits {self.state_width + self.input_width}")
        if self.step.out_shape.kind != "bits" \
                or self.step.out_shape.size <= self.state_width:
            raise StructureError(
                "step model must emit bits(state + output), output >= 1 bit")
        for s in self.final_states:
            if s.width != self.state_width:
                raise WidthError(f"final state {s} has wrong width")
        terminal = self.terminal_output
        if terminal is None:
            terminal = BitVec.zeros(self.output_width)
            object.__setattr__(self, "terminal_output", terminal)
        if terminal.width != self.output_width:
            raise WidthError("terminal output width != step output width")

    @property
    def output_width(self) -> int:
        return self.step.out_shape.size - self.state_width


@dataclass(frozen=True)
class Trace:
    steps: Tuple[Tuple[BitVec, BitVec], ...]  # (state, output) per iteration
    halted_by: str                            # terminal_state | theta_exhausted


def run_agent(a: AgentLoop, input_bits: BitVec, initial_state: BitVec) -> Trace:
    """Iterate the step model at most theta times on a held input.

    The input is presented unchanged on every iteration; the loop stops the
    first time the new state lands in the final-state set. On theta
    exhaustion the last output is masked with the agent's terminal output.
    """
    if input_bits.width != a.input_width:
        raise WidthError(f"input width {input_bits.width} != {a.input_width}")
    if initial_state.width != a.state_width:
        raise WidthError(f"state width {initial_state.width} != {a.state_width}")
    if initial_state in a.final_states:
        return Trace((), TERMINAL_STATE)
    s_w = a.state_width
    out_w = a.output_width
    state = initial_state
    steps = []
    for _ in range(a.theta):
        combined, _ = eval_program(a.step, state.concat(input_bits))
        state = combined.slice(0, s_w)
        output = combined.slice(s_w, s_w + out_w)
        steps.append((state, output))
        if state in a.final_states:
            return Trace(tuple(steps), TERMINAL_STATE)
    steps[-1] = (steps[-1][0], a.terminal_output)
    return Trace(tuple(steps), THETA_EXHAUSTED)


def step_once(a: AgentLoop, state: BitVec, input_bits: BitVec) -> Tuple[BitVec, BitVec]:
    """One application of the step model, split into (state, output)."""
    combined, _ = eval_program(a.step, state.concat(input_bits))
    return combined.slice(0, a.state_width), \
        combined.slice(a.state_width, a.state_width + a.output_width)


# ---------------------------------------------------------------------------
# Text format


def print_agent(a: AgentLoop) -> str:
    finals = " ".join(str(s) for s in sorted(a.final_states))
    return (f"(agent (state {a.state_width}) (input {a.input_width}) "
            f"(theta {a.theta}) (final {finals}) "
            f"(terminal {a.terminal_output}) (step {_print_node(a.step.root)}))")


def parse_agent(text: str) -> AgentLoop:
    ts = _TokenStream(_tokenize(text))
    ts.expect("(")
    ts.expect("agent")
    fields = {}
    step_node: Optional[Node] = None
    while ts.peek() == "(":
        ts.expect("(")
        key = ts.next()
        if key == "step":
            step_node = _parse_node(ts)
            ts.expect(")")
            continue
        if key == "final":
            states = []
            while ts.peek() != ")":
                states.append(BitVec.from_string(ts.next()))
            ts.expect(")")
            fields["final"] = states
            continue
        if key == "terminal":
            fields["terminal"] = BitVec.from_string(ts.next())
            ts.expect(")")
            continue
        if key in ("state", "input", "theta"):
            fields[key] = _parse_int(ts.next())
            ts.expect(")")
            continue
        raise ParseError(f"unknown agent field {key!r}")
    ts.expect(")")
    if ts.peek() is not None:
        raise ParseError(f"trailing input at token {ts.peek()!r}")
    for required in ("state", "input", "theta", "final"):
        if required not in fields:
            raise ParseError(f"agent missing ({required} ...)")
    if step_node is None:
        raise ParseError("agent missing (step ...)")
    state_w, input_w = fields["state"], fields["input"]
    try:
        step = program(step_node, bits(state_w + input_w))
        return AgentLoop(step, fields["theta"], frozenset(fields["final"]),
                         state_w, input_w, fields.get("terminal"))
    except (StructureError, WidthError) as exc:
        raise ParseError(f"ill-formed agent: {exc}") from None
