"""Executable undecidability demonstrations on the micro machine.

`make_adversary` builds the self-referential model that defeats any
candidate alignment verifier: it obtains its own code with SELF, runs the
verifier on (judge bytes, own bytes) through CALLV, and then does the
opposite of whatever was claimed: emits the judge's recorded negative
output on the negative input if the verifier said "aligned", or emits the
judge-approved witness output on every input if it said "misaligned".

`build_halting_reduction` emits a machine whose behavior reproduces the
halting-problem reduction: it first simulates a given machine on a given
input under an unbounded fuel-escalation loop, then behaves as a supplied
total program; it therefore has that program's property exactly when the
simulated machine halts.

Judges live here as micro-level bundles: the negative pair as raw bytes
plus witness and body as micro programs, so both the adversary and any
simulating verifier can execute them. Bit-vector judges map to this world
one byte per bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .kernel import (BitVec, DecigardError, ParseError, VerifierDivergence)
from .judges import Judge
from .micro import Assembler, MicroOutcome, MicroProgram, run_micro

DEFAULT_DEMO_FUEL = 20_000_000
VERIFIER_FUEL = 2_000_000      # fuel the adversary grants the verifier
WITNESS_FUEL = 1_000_000       # fuel the adversary grants the witness
SIM_FUEL = 10_000              # per-simulation fuel of the bounded verifier
DIVERGED_MARKER = 0xFE         # adversary output when the verifier starves


def _u16(value: int) -> bytes:
    if not 0 <= value < (1 << 16):
        raise DecigardError(f"length {value} does not fit in u16")
    return value.to_bytes(2, "little")


@dataclass(frozen=True)
class MicroJudge:
    """Judge bundle executable by the micro machine.

    The body maps (input bytes ++ output bytes) to one byte 0/1; the
    witness maps input bytes to an output the body approves.
    """

    name: str
    neg_input: bytes
    neg_output: bytes
    witness: MicroProgram
    body: MicroProgram

    def encode(self) -> bytes:
        """Length-prefixed wire format: (i-, o-, witness, body)."""
        return b"".join([
            _u16(len(self.neg_input)), self.neg_input,
            _u16(len(self.neg_output)), self.neg_output,
            _u16(len(self.witness.code)), self.witness.code,
            _u16(len(self.body.code)), self.body.code,
        ])

    @classmethod
    def decode(cls, data: bytes, name: str = "decoded") -> "MicroJudge":
        pos = 0
        fields = []
        for _ in range(4):
            if pos + 2 > len(data):
                raise ParseError("truncated micro judge")
            length = int.from_bytes(data[pos:pos + 2], "little")
            pos += 2
            if pos + length > len(data):
                raise ParseError("truncated micro judge field")
            fields.append(data[pos:pos + length])
            pos += length
        if pos != len(data):
            raise ParseError("trailing bytes after micro judge")
        return cls(name, fields[0], fields[1],
                   MicroProgram(fields[2]), MicroProgram(fields[3]))

    def eval(self, input_bytes: bytes, output_bytes: bytes,
             fuel: int = SIM_FUEL) -> int:
        """Run the body on the concatenated pair; 1 accepts, 0 rejects."""
        outcome = run_micro(self.body, input_bytes + output_bytes, fuel)
        if not outcome.halted:
            raise DecigardError(
                f"judge body of {self.name!r} did not halt within {fuel}")
        return 1 if outcome.output[:1] == b"\x01" else 0


@dataclass(frozen=True)
class CandidateVerifier:
    """An arbitrary program claiming to decide alignment.

    It receives u16(len judge) ++ judge bytes ++ model bytes and must
    write one byte: 1 for aligned, 0 for misaligned.
    """

    name: str
    program: MicroProgram


def frame_verifier_input(judge_bytes: bytes, model_code: bytes) -> bytes:
    return _u16(len(judge_bytes)) + judge_bytes + model_code


def bits_to_bytes(v: BitVec) -> bytes:
    """One byte (0 or 1) per bit, most-significant first."""
    return bytes(v.bits())


def bytes_to_bits(data: bytes) -> BitVec:
    return BitVec.from_bits([1 if b else 0 for b in data])


# ---------------------------------------------------------------------------
# Assembly helpers. Register discipline: r0/r1 belong to CALLV results,
# r2..r5 are operands, r6/r7 are scratch; every helper reloads what it needs.


def _fill(asm: Assembler, buf: int, data: bytes, clear: bool = True) -> None:
    """Materialize constant bytes into a buffer."""
    asm.loadi(6, buf)
    if clear:
        asm.loadi(7, -1)
        asm.bput(6, 7)
    for byte in data:
        asm.loadi(7, byte)
        asm.bput(6, 7)


def _copy_buffer(asm: Assembler, src: int, dst: int, tag: str) -> None:
    """Append the whole src buffer to dst (BGET sentinel loop)."""
    asm.loadi(2, 0)
    asm.loadi(3, src)
    asm.loadi(4, dst)
    asm.label(f"{tag}_loop")
    asm.bget(5, 3, 2)
    asm.mov(7, 5)
    asm.loadi(6, 1)
    asm.add(7, 6)
    asm.jz(7, f"{tag}_done")
    asm.bput(4, 5)
    asm.loadi(6, 1)
    asm.add(2, 6)
    asm.jmp(f"{tag}_loop")
    asm.label(f"{tag}_done")


def _read_all_input(asm: Assembler, dst: int, tag: str) -> None:
    """Read the entire input stream into a buffer (cleared first)."""
    asm.loadi(4, dst)
    asm.loadi(7, -1)
    asm.bput(4, 7)
    asm.label(f"{tag}_loop")
    asm.read(5)
    asm.mov(7, 5)
    asm.loadi(6, 1)
    asm.add(7, 6)
    asm.jz(7, f"{tag}_done")
    asm.bput(4, 5)
    asm.jmp(f"{tag}_loop")
    asm.label(f"{tag}_done")


def _write_buffer(asm: Assembler, src: int, tag: str) -> None:
    """Copy a buffer to the machine output."""
    asm.loadi(2, 0)
    asm.loadi(3, src)
    asm.label(f"{tag}_loop")
    asm.bget(5, 3, 2)
    asm.mov(7, 5)
    asm.loadi(6, 1)
    asm.add(7, 6)
    asm.jz(7, f"{tag}_done")
    asm.write(5)
    asm.loadi(6, 1)
    asm.add(2, 6)
    asm.jmp(f"{tag}_loop")
    asm.label(f"{tag}_done")


def _callv(asm: Assembler, code_buf: int, input_buf: int, fuel: int,
           out_buf: int) -> None:
    asm.loadi(2, code_buf)
    asm.loadi(3, input_buf)
    asm.loadi(4, fuel)
    asm.loadi(5, out_buf)
    asm.callv(2, 3, 4, 5)


def _branch_unless_buffer_equals(asm: Assembler, buf: int, data: bytes,
                                 target: str, tag: str) -> None:
    """Jump to target unless the buffer holds exactly these bytes."""
    for k, byte in enumerate(data):
        asm.loadi(3, buf)
        asm.loadi(2, k)
        asm.bget(5, 3, 2)
        asm.loadi(6, -byte)
        asm.add(5, 6)
        asm.jz(5, f"{tag}_eq{k}")
        asm.jmp(target)
        asm.label(f"{tag}_eq{k}")
    asm.loadi(3, buf)
    asm.loadi(2, len(data))
    asm.bget(5, 3, 2)       # one past the end must be out of range
    asm.loadi(6, 1)
    asm.add(5, 6)
    asm.jz(5, f"{tag}_len_ok")
    asm.jmp(target)
    asm.label(f"{tag}_len_ok")


def make_adversary(verifier: MicroProgram, judge_bytes: bytes, *,
                   verifier_fuel: int = VERIFIER_FUEL,
                   witness_fuel: int = WITNESS_FUEL) -> MicroProgram:
    """Emit the self-referential model that contradicts the verifier.

    Buffer plan: B0 self, B1 judge bytes, B2 verifier code, B3 framed
    verifier input, B4 verifier output, B5 own input, B6 witness code,
    B7 witness output.
    """
    judge = MicroJudge.decode(judge_bytes)  # also validates the bytes
    asm = Assembler()
    asm.loadi(2, 0)
    asm.ins("self", 2)                       # B0 = own code
    _read_all_input(asm, 5, "rd")            # B5 = model input
    _fill(asm, 1, judge_bytes)               # B1 = judge bytes
    _fill(asm, 2, verifier.code)             # B2 = verifier code
    _fill(asm, 3, _u16(len(judge_bytes)))    # B3 = u16(len j) ++ j ++ self
    _copy_buffer(asm, 1, 3, "cpj")
    _copy_buffer(asm, 0, 3, "cps")
    _callv(asm, 2, 3, verifier_fuel, 4)      # consult the verifier about us
    asm.jz(0, "starved")
    asm.loadi(3, 4)                          # answer byte = B4[0]
    asm.loadi(2, 0)
    asm.bget(6, 3, 2)
    asm.mov(5, 6)
    asm.loadi(7, -1)
    asm.add(5, 7)
    asm.jz(5, "claimed_aligned")
    # Claimed misaligned: be aligned everywhere via the witness output.
    asm.label("be_aligned")
    _fill(asm, 6, judge.witness.code)
    _callv(asm, 6, 5, witness_fuel, 7)
    _write_buffer(asm, 7, "wout")
    asm.halt()
    # Claimed aligned: reject the negative input with the negative output.
    asm.label("claimed_aligned")
    _branch_unless_buffer_equals(asm, 5, judge.neg_input, "be_aligned", "cmp")
    for byte in judge.neg_output:
        asm.loadi(2, byte)
        asm.write(2)
    asm.halt()
    asm.label("starved")
    asm.loadi(2, DIVERGED_MARKER)
    asm.write(2)
    asm.halt()
    return asm.assemble()


# ---------------------------------------------------------------------------
# Contradiction demonstration


@dataclass(frozen=True)
class SampleRun:
    input_bytes: bytes
    output_bytes: bytes
    judge_bit: int


@dataclass(frozen=True)
class ContradictionDemo:
    verifier: str
    judge: str
    claimed: int                      # 1 aligned / 0 misaligned
    contradicted: bool
    contradicting_input: Optional[bytes]
    samples: Tuple[SampleRun, ...]
    verifier_steps: int
    adversary_size: int


def demonstrate_contradiction(v: CandidateVerifier, judge: MicroJudge,
                              sample_inputs: Sequence[bytes], *,
                              fuel: int = DEFAULT_DEMO_FUEL) -> ContradictionDemo:
    """Build the adversary for (v, judge), record v's verdict on it, then
    execute the adversary and show the verdict is wrong.

    A verifier that fails to answer within the demo fuel is not a decider;
    that raises VerifierDivergence rather than being scored.
    """
    samples = [bytes(s) for s in sample_inputs]
    if not samples:
        raise ValueError("sample_inputs must be non-empty")
    if judge.neg_input not in samples:
        raise ValueError("sample_inputs must include the judge's negative input")
    judge_bytes = judge.encode()
    adversary = make_adversary(v.program, judge_bytes)
    framed = frame_verifier_input(judge_bytes, adversary.code)
    verdict_run = run_micro(v.program, framed, fuel)
    if not verdict_run.halted:
        raise VerifierDivergence(
            f"verifier {v.name!r} did not answer within fuel {fuel}")
    claimed = 1 if verdict_run.output[:1] == b"\x01" else 0

    runs: List[SampleRun] = []
    contradicting: Optional[bytes] = None
    if claimed == 1:
        # the adversary must actually reject the negative input
        outcome = _run_adversary(adversary, judge.neg_input, fuel)
        bit = judge.eval(judge.neg_input, outcome.output)
        runs.append(SampleRun(judge.neg_input, outcome.output, bit))
        if bit == 0:
            contradicting = judge.neg_input
        contradicted = bit == 0
    else:
        # the adversary must be judge-approved on every sampled input
        contradicted = True
        for sample in samples:
            outcome = _run_adversary(adversary, sample, fuel)
            bit = judge.eval(sample, outcome.output)
            runs.append(SampleRun(sample, outcome.output, bit))
            if bit != 1:
                contradicted = False
                contradicting = sample
                break
    return ContradictionDemo(
        verifier=v.name, judge=judge.name, claimed=claimed,
        contradicted=contradicted,
        contradicting_input=(contradicting if claimed == 1 else None),
        samples=tuple(runs), verifier_steps=verdict_run.steps,
        adversary_size=len(adversary.code))


def _run_adversary(adversary: MicroProgram, input_bytes: bytes,
                   fuel: int) -> MicroOutcome:
    outcome = run_micro(adversary, input_bytes, fuel)
    if not outcome.halted:
        raise DecigardError(
            f"adversary did not halt within fuel {fuel}; raise the demo fuel")
    if outcome.output == bytes([DIVERGED_MARKER]):
        raise VerifierDivergence(
            "verifier starved inside the adversary; raise verifier fuel")
    return outcome


# ---------------------------------------------------------------------------
# Halting reduction


def build_halting_reduction(m: MicroProgram, input_bytes: bytes,
                            p_pos: MicroProgram, *,
                            pos_fuel: int = WITNESS_FUEL) -> MicroProgram:
    """Emit M' that simulates `m` on `input_bytes` under doubling fuel,
    then behaves as `p_pos` on its own input.

    If m halts, M' computes p_pos (it has the property); if m never halts,
    M' diverges on every input (it does not). Non-halting cannot be
    observed by execution, only bounded evidence of it.

    Buffers: B0 machine code, B1 machine input, B2 simulation output,
    B3 p_pos code, B4 own input, B5 p_pos output.
    """
    asm = Assembler()
    _fill(asm, 0, m.code)
    _fill(asm, 1, bytes(input_bytes))
    asm.loadi(6, 1)                     # escalating fuel; doubles each round
    asm.label("escalate")
    asm.loadi(2, 0)
    asm.loadi(3, 1)
    asm.loadi(5, 2)
    asm.callv(2, 3, 6, 5)
    asm.mov(7, 0)
    asm.jz(7, "grow")
    asm.jmp("run_pos")
    asm.label("grow")
    asm.add(6, 6)
    asm.jmp("escalate")
    asm.label("run_pos")
    _read_all_input(asm, 4, "rin")
    _fill(asm, 3, p_pos.code)
    _callv(asm, 3, 4, pos_fuel, 5)
    _write_buffer(asm, 5, "pw")
    asm.halt()
    return asm.assemble()


# ---------------------------------------------------------------------------
# Bundled verifier zoo


def constant_true_verifier() -> CandidateVerifier:
    asm = Assembler()
    asm.loadi(2, 1)
    asm.write(2)
    asm.halt()
    return CandidateVerifier("constant_true", asm.assemble())


def constant_false_verifier() -> CandidateVerifier:
    asm = Assembler()
    asm.loadi(2, 0)
    asm.write(2)
    asm.halt()
    return CandidateVerifier("constant_false", asm.assemble())


def byte_hash_verifier() -> CandidateVerifier:
    """Heuristic: answers with the parity of the byte sum of its input."""
    asm = Assembler()
    asm.loadi(2, 0)
    asm.label("loop")
    asm.read(3)
    asm.mov(4, 3)
    asm.loadi(5, 1)
    asm.add(4, 5)
    asm.jz(4, "sum_done")
    asm.add(2, 3)
    asm.jmp("loop")
    asm.label("sum_done")
    asm.label("mod")
    asm.jz(2, "even")
    asm.mov(4, 2)
    asm.loadi(5, -1)
    asm.add(4, 5)
    asm.jz(4, "odd")
    asm.loadi(5, -2)
    asm.add(2, 5)
    asm.jmp("mod")
    asm.label("even")
    asm.loadi(2, 0)
    asm.write(2)
    asm.halt()
    asm.label("odd")
    asm.loadi(2, 1)
    asm.write(2)
    asm.halt()
    return CandidateVerifier("byte_hash", asm.assemble())


def _read_u16(asm: Assembler, tag: str) -> None:
    """Read a u16le length from the input stream into r2 (clobbers r3, r4)."""
    asm.read(2)
    asm.read(3)
    asm.label(f"{tag}_hi")
    asm.jz(3, f"{tag}_done")
    asm.loadi(4, 256)
    asm.add(2, 4)
    asm.loadi(4, -1)
    asm.add(3, 4)
    asm.jmp(f"{tag}_hi")
    asm.label(f"{tag}_done")


def _read_count_into(asm: Assembler, buf: int, tag: str) -> None:
    """Read r2 bytes from the input into a cleared buffer."""
    asm.loadi(4, buf)
    asm.loadi(5, -1)
    asm.bput(4, 5)
    asm.label(f"{tag}_loop")
    asm.jz(2, f"{tag}_done")
    asm.read(5)
    asm.bput(4, 5)
    asm.loadi(6, -1)
    asm.add(2, 6)
    asm.jmp(f"{tag}_loop")
    asm.label(f"{tag}_done")


def _skip_count(asm: Assembler, tag: str) -> None:
    """Consume r2 input bytes."""
    asm.label(f"{tag}_loop")
    asm.jz(2, f"{tag}_done")
    asm.read(5)
    asm.loadi(6, -1)
    asm.add(2, 6)
    asm.jmp(f"{tag}_loop")
    asm.label(f"{tag}_done")


def simulating_verifier(sim_fuel: int = SIM_FUEL,
                        probes: int = 16) -> CandidateVerifier:
    """Fuel-bounded simulation: try the negative input with its first byte
    swept over `probes` values, simulate the model and the judge body for
    `sim_fuel` steps each, and report misaligned on any rejection or
    non-answer.

    Buffers: B0 negative input, B1 judge body, B2 model, B3 probe input,
    B4 model output, B5 judge input, B6 judge output, B7 probe counter.
    """
    asm = Assembler()
    _read_u16(asm, "lj")                 # judge length, structure is implicit
    _read_u16(asm, "li")
    _read_count_into(asm, 0, "ineg")     # B0 = negative input
    _read_u16(asm, "lo")
    _skip_count(asm, "oneg")             # negative output unused here
    _read_u16(asm, "lw")
    _skip_count(asm, "wit")              # witness unused here
    _read_u16(asm, "lb")
    _read_count_into(asm, 1, "body")     # B1 = judge body
    _read_all_input(asm, 2, "model")     # B2 = model code (rest of frame)
    asm.loadi(3, 7)                      # B7 = probe counter, single byte
    asm.loadi(5, -1)
    asm.bput(3, 5)
    asm.loadi(5, 0)
    asm.bput(3, 5)
    asm.label("probe_loop")
    asm.loadi(3, 7)
    asm.loadi(4, 0)
    asm.bget(2, 3, 4)                    # r2 = probe index
    asm.mov(5, 2)
    asm.loadi(6, -probes)
    asm.add(5, 6)
    asm.jz(5, "all_ok")
    # B3 = probe input: first byte = probe index, rest = B0[1:]
    asm.loadi(3, 3)
    asm.loadi(5, -1)
    asm.bput(3, 5)
    asm.bput(3, 2)
    asm.loadi(4, 1)                      # copy B0[1:] into B3
    asm.label("probe_copy")
    asm.loadi(5, 0)
    asm.bget(6, 5, 4)
    asm.mov(7, 6)
    asm.loadi(5, 1)
    asm.add(7, 5)
    asm.jz(7, "probe_ready")
    asm.bput(3, 6)
    asm.loadi(5, 1)
    asm.add(4, 5)
    asm.jmp("probe_copy")
    asm.label("probe_ready")
    _callv(asm, 2, 3, sim_fuel, 4)       # run the model on the probe
    asm.jz(0, "say_misaligned")
    asm.loadi(3, 5)                      # B5 = probe ++ model output
    asm.loadi(5, -1)
    asm.bput(3, 5)
    _copy_buffer(asm, 3, 5, "ji")
    _copy_buffer(asm, 4, 5, "jo")
    _callv(asm, 1, 5, sim_fuel, 6)       # run the judge body on the pair
    asm.jz(0, "say_misaligned")
    asm.loadi(3, 6)
    asm.loadi(4, 0)
    asm.bget(5, 3, 4)
    asm.loadi(6, -1)
    asm.add(5, 6)
    asm.jz(5, "next_probe")
    asm.jmp("say_misaligned")
    asm.label("next_probe")
    asm.loadi(3, 7)
    asm.loadi(4, 0)
    asm.bget(2, 3, 4)
    asm.loadi(6, 1)
    asm.add(2, 6)
    asm.loadi(5, -1)
    asm.bput(3, 5)
    asm.bput(3, 2)
    asm.jmp("probe_loop")
    asm.label("all_ok")
    asm.loadi(2, 1)
    asm.write(2)
    asm.halt()
    asm.label("say_misaligned")
    asm.loadi(2, 0)
    asm.write(2)
    asm.halt()
    return CandidateVerifier("bounded_simulation", asm.assemble())


def diverging_verifier() -> CandidateVerifier:
    """Refuses to answer; demonstrates the VerifierDivergence report."""
    asm = Assembler()
    asm.label("spin")
    asm.jmp("spin")
    return CandidateVerifier("diverging", asm.assemble())


def verifier_zoo() -> List[CandidateVerifier]:
    """The bundled candidates every demonstration must contradict."""
    return [constant_true_verifier(), constant_false_verifier(),
            byte_hash_verifier(), simulating_verifier()]


def zoo_member(name: str) -> CandidateVerifier:
    for v in verifier_zoo() + [diverging_verifier()]:
        if v.name == name:
            return v
    raise KeyError(name)


# ---------------------------------------------------------------------------
# Bundled micro judges


def parity_micro_judge(width: int = 3) -> MicroJudge:
    """Judge: the single output byte equals the parity of the input bytes.

    Inputs are `width` bytes each 0 or 1 (one byte per bit); the output is
    one byte. The negative pair is all-zeros against 1.
    """
    body = Assembler()
    body.loadi(2, 0)                    # running sum
    body.loadi(3, width)
    body.label("sum")
    body.jz(3, "have_sum")
    body.read(4)
    body.add(2, 4)
    body.loadi(5, -1)
    body.add(3, 5)
    body.jmp("sum")
    body.label("have_sum")
    body.label("mod")                   # r2 mod 2 by repeated subtraction
    body.jz(2, "parity_0")
    body.mov(4, 2)
    body.loadi(5, -1)
    body.add(4, 5)
    body.jz(4, "parity_1")
    body.loadi(5, -2)
    body.add(2, 5)
    body.jmp("mod")
    body.label("parity_0")
    body.loadi(2, 0)
    body.jmp("compare")
    body.label("parity_1")
    body.loadi(2, 1)
    body.label("compare")
    body.read(4)                        # the claimed output byte
    body.sub(4, 2)
    body.jz(4, "accept")
    body.loadi(2, 0)
    body.write(2)
    body.halt()
    body.label("accept")
    body.loadi(2, 1)
    body.write(2)
    body.halt()

    witness = Assembler()
    witness.loadi(2, 0)
    witness.loadi(3, width)
    witness.label("sum")
    witness.jz(3, "have_sum")
    witness.read(4)
    witness.add(2, 4)
    witness.loadi(5, -1)
    witness.add(3, 5)
    witness.jmp("sum")
    witness.label("have_sum")
    witness.label("mod")
    witness.jz(2, "even")
    witness.mov(4, 2)
    witness.loadi(5, -1)
    witness.add(4, 5)
    witness.jz(4, "odd")
    witness.loadi(5, -2)
    witness.add(2, 5)
    witness.jmp("mod")
    witness.label("even")
    witness.loadi(2, 0)
    witness.write(2)
    witness.halt()
    witness.label("odd")
    witness.loadi(2, 1)
    witness.write(2)
    witness.halt()

    return MicroJudge(f"parity{width}", bytes(width), b"\x01",
                      witness.assemble(), body.assemble())


def echo_program() -> MicroProgram:
    """Copies its input to its output; the stock total p_pos."""
    asm = Assembler()
    asm.label("loop")
    asm.read(2)
    asm.mov(3, 2)
    asm.loadi(4, 1)
    asm.add(3, 4)
    asm.jz(3, "done")
    asm.write(2)
    asm.jmp("loop")
    asm.label("done")
    asm.halt()
    return asm.assemble()


def load_micro_judge(text: str) -> MicroJudge:
    """Read a judge file carrying `micro-witness` / `micro-body` hex lines.

    The negative pair comes from the standard `neg` line, mapped one byte
    per bit.
    """
    from .judges import parse_judge

    host = parse_judge(text)
    sections = {}
    for line in text.splitlines():
        line = line.strip()
        for key in ("micro-witness", "micro-body"):
            if line.startswith(key + " "):
                try:
                    sections[key] = bytes.fromhex(line[len(key) + 1:].strip())
                except ValueError as exc:
                    raise ParseError(f"bad hex in {key}: {exc}") from None
    for key in ("micro-witness", "micro-body"):
        if key not in sections:
            raise ParseError(f"judge file has no {key} line")
    neg_i, neg_o = host.negative
    return MicroJudge(host.name, bits_to_bytes(neg_i), bits_to_bytes(neg_o),
                      MicroProgram(sections["micro-witness"]),
                      MicroProgram(sections["micro-body"]))


def micro_judge_lines(judge: MicroJudge) -> str:
    """The `micro-*` lines to append to a judge file."""
    return (f"micro-witness {judge.witness.code.hex()}\n"
            f"micro-body {judge.body.code.hex()}\n")
