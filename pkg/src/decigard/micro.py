"""A small unrestricted register machine for arbitrary (possibly
non-halting) programs, with fuel-metered deterministic interpretation.

Machine state: eight registers R0..R7 holding arbitrary-precision signed
integers, eight byte buffers B0..B7, one input byte stream (consumed by
READ) and one output byte stream (fed by WRITE).

Opcode map (13 opcodes, ISA version 1):

    0x01  LOADI r imm   R[r] = imm (signed LEB128 immediate)
    0x02  MOV   rd rs   R[rd] = R[rs]
    0x03  ADD   rd rs   R[rd] += R[rs]
    0x04  SUB   rd rs   R[rd] -= R[rs]
    0x05  JMP   addr    jump to byte offset addr (u32 little-endian)
    0x06  JZ    r addr  jump when R[r] == 0
    0x07  READ  r       R[r] = next input byte, or -1 when exhausted
    0x08  WRITE r       append R[r] mod 256 to the output
    0x09  BPUT  rb rv   v = R[rv]; if v < 0 clear buffer R[rb] mod 8,
                        else append v mod 256 to it
    0x0A  BGET  rd rb ri  R[rd] = byte R[ri] of buffer R[rb] mod 8,
                          or -1 when the index is out of range
    0x0B  SELF  rb      buffer R[rb] mod 8 = a copy of the running code
    0x0C  CALLV ra rb rf ro  interpret buffer R[ra] mod 8 as a program on
                        input buffer R[rb] mod 8 with fuel R[rf]; the
                        callee's output replaces buffer R[ro] mod 8;
                        R0 = 1 if it halted else 0, R1 = steps it consumed
    0x0D  HALT          stop; the written bytes are the program's output

Every instruction costs one fuel unit; CALLV costs one plus whatever the
callee consumes. The callee's fuel is capped at the caller's remaining
budget minus one: if the cap truncates the request and the callee does not
halt under it, the caller itself runs out of fuel on the spot (nothing is
committed). This keeps halting monotone in fuel: a program that halts at
fuel f behaves identically at any fuel >= f. A code buffer that does not
decode, or a non-positive fuel request, behaves as a callee that never
answers (R0 = 0, zero steps).

Execution falling off the end of the code is a halt. Jump targets must
land on an instruction boundary (or one past the end); this is validated
when the program is decoded, so the instruction stream is unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from .kernel import DecodeError, ParseError

MAGIC = b"MPRG"
ISA_VERSION = 1

OP_LOADI = 0x01
OP_MOV = 0x02
OP_ADD = 0x03
OP_SUB = 0x04
OP_JMP = 0x05
OP_JZ = 0x06
OP_READ = 0x07
OP_WRITE = 0x08
OP_BPUT = 0x09
OP_BGET = 0x0A
OP_SELF = 0x0B
OP_CALLV = 0x0C
OP_HALT = 0x0D

# mnemonic -> (opcode, operand kinds); r = register, i = sleb immediate,
# a = jump target
_MNEMONICS = {
    "loadi": (OP_LOADI, "ri"),
    "mov": (OP_MOV, "rr"),
    "add": (OP_ADD, "rr"),
    "sub": (OP_SUB, "rr"),
    "jmp": (OP_JMP, "a"),
    "jz": (OP_JZ, "ra"),
    "read": (OP_READ, "r"),
    "write": (OP_WRITE, "r"),
    "bput": (OP_BPUT, "rr"),
    "bget": (OP_BGET, "rrr"),
    "self": (OP_SELF, "r"),
    "callv": (OP_CALLV, "rrrr"),
    "halt": (OP_HALT, ""),
}
_OPCODE_TO_MNEMONIC = {op: (name, kinds) for name, (op, kinds) in
                       _MNEMONICS.items()}


def encode_sleb(value: int) -> bytes:
    out = bytearray()
    more = True
    while more:
        byte = value & 0x7F
        value >>= 7
        if (value == 0 and not byte & 0x40) or (value == -1 and byte & 0x40):
            more = False
        else:
            byte |= 0x80
        out.append(byte)
    return bytes(out)


def decode_sleb(data: bytes, pos: int) -> Tuple[int, int]:
    result = 0
    shift = 0
    start = pos
    while True:
        if pos >= len(data):
            raise DecodeError("truncated sleb128 immediate", start)
        byte = data[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            if byte & 0x40:
                result -= 1 << shift
            return result, pos


@dataclass(frozen=True)
class MicroProgram:
    """Validated instruction stream; decoding happens at construction."""

    code: bytes

    def __post_init__(self):
        _decode(self.code)

    def __len__(self) -> int:
        return len(self.code)


@dataclass(frozen=True)
class MicroOutcome:
    status: str               # halted | still_running
    output: bytes = b""
    steps: int = 0

    HALTED = "halted"
    STILL_RUNNING = "still_running"

    @property
    def halted(self) -> bool:
        return self.status == self.HALTED


@lru_cache(maxsize=512)
def _decode(code: bytes):
    """Decode to (instructions, jump-offset -> index map).

    Each instruction is (opcode, operands...) with jump targets kept as
    byte offsets; target validity is checked here, index resolution
    happens after the full stream is known.
    """
    instrs: List[Tuple[int, ...]] = []
    offsets: Dict[int, int] = {}
    pos = 0
    n = len(code)
    while pos < n:
        offsets[pos] = len(instrs)
        start = pos
        op = code[pos]
        pos += 1
        spec = _OPCODE_TO_MNEMONIC.get(op)
        if spec is None:
            raise DecodeError(f"unknown opcode 0x{op:02X}", start)
        operands: List[int] = []
        for kind in spec[1]:
            if kind == "r":
                if pos >= n:
                    raise DecodeError("truncated register operand", start)
                reg = code[pos]
                pos += 1
                if reg >= 8:
                    raise DecodeError(f"register R{reg} out of range", start)
                operands.append(reg)
            elif kind == "i":
                value, pos = decode_sleb(code, pos)
                operands.append(value)
            else:  # jump target
                if pos + 4 > n:
                    raise DecodeError("truncated jump target", start)
                operands.append(int.from_bytes(code[pos:pos + 4], "little"))
                pos += 4
        instrs.append((op, *operands))
    offsets[n] = len(instrs)  # jumping one past the end halts
    resolved = []
    for index, ins in enumerate(instrs):
        op = ins[0]
        if op == OP_JMP or op == OP_JZ:
            target = ins[-1]
            if target not in offsets:
                raise DecodeError(f"jump target {target} is not an "
                                  "instruction boundary", target)
            resolved.append(ins[:-1] + (offsets[target],))
        else:
            resolved.append(ins)
    return tuple(resolved), offsets


def _exec(code: bytes, input_bytes: bytes, fuel: int) -> Tuple[bool, bytes, int]:
    """Returns (halted, output, steps_consumed); steps <= fuel always."""
    instrs, _ = _decode(code)
    regs = [0] * 8
    buffers = [bytearray() for _ in range(8)]
    out = bytearray()
    in_ptr = 0
    n_input = len(input_bytes)
    steps = 0
    pc = 0
    n_instr = len(instrs)
    while True:
        if pc >= n_instr:
            return True, bytes(out), steps
        if steps >= fuel:
            return False, b"", steps
        ins = instrs[pc]
        op = ins[0]
        if op == OP_LOADI:
            regs[ins[1]] = ins[2]
        elif op == OP_MOV:
            regs[ins[1]] = regs[ins[2]]
        elif op == OP_ADD:
            regs[ins[1]] += regs[ins[2]]
        elif op == OP_SUB:
            regs[ins[1]] -= regs[ins[2]]
        elif op == OP_JMP:
            steps += 1
            pc = ins[1]
            continue
        elif op == OP_JZ:
            steps += 1
            pc = ins[2] if regs[ins[1]] == 0 else pc + 1
            continue
        elif op == OP_READ:
            if in_ptr < n_input:
                regs[ins[1]] = input_bytes[in_ptr]
                in_ptr += 1
            else:
                regs[ins[1]] = -1
        elif op == OP_WRITE:
            out.append(regs[ins[1]] % 256)
        elif op == OP_BPUT:
            value = regs[ins[2]]
            buf = buffers[regs[ins[1]] % 8]
            if value < 0:
                del buf[:]
            else:
                buf.append(value % 256)
        elif op == OP_BGET:
            buf = buffers[regs[ins[2]] % 8]
            index = regs[ins[3]]
            regs[ins[1]] = buf[index] if 0 <= index < len(buf) else -1
        elif op == OP_SELF:
            buffers[regs[ins[1]] % 8] = bytearray(code)
        elif op == OP_CALLV:
            callee = bytes(buffers[regs[ins[1]] % 8])
            callee_input = bytes(buffers[regs[ins[2]] % 8])
            requested = regs[ins[3]]
            out_index = regs[ins[4]] % 8
            decodes = True
            try:
                _decode(callee)
            except DecodeError:
                decodes = False
            if requested <= 0 or not decodes:
                regs[0] = 0
                regs[1] = 0
                buffers[out_index] = bytearray()
            else:
                remaining = fuel - steps
                effective = min(requested, remaining - 1)
                if effective < 1:
                    return False, b"", fuel  # no room to run the callee
                halted, callee_out, consumed = _exec(
                    callee, callee_input, effective)
                if not halted and consumed < requested:
                    # truncated by our own budget: the caller starves too
                    return False, b"", fuel
                steps += consumed
                regs[0] = 1 if halted else 0
                regs[1] = consumed
                buffers[out_index] = bytearray(callee_out if halted else b"")
        elif op == OP_HALT:
            return True, bytes(out), steps + 1
        steps += 1
        pc += 1


def run_micro(p: MicroProgram, input_bytes: bytes, fuel: int) -> MicroOutcome:
    """Deterministic small-step interpretation under a fuel budget.

    Halting is monotone: an outcome of halted at fuel f is identical for
    every fuel >= f.
    """
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    halted, output, steps = _exec(p.code, bytes(input_bytes), fuel)
    if halted:
        return MicroOutcome(MicroOutcome.HALTED, output, steps)
    return MicroOutcome(MicroOutcome.STILL_RUNNING, steps=steps)


# ---------------------------------------------------------------------------
# Binary container and assembly text


def to_binary(p: MicroProgram) -> bytes:
    return MAGIC + bytes([ISA_VERSION]) + p.code


def from_binary(data: bytes) -> MicroProgram:
    if data[:4] != MAGIC:
        raise ParseError("bad micro program magic")
    if len(data) < 5 or data[4] != ISA_VERSION:
        raise ParseError("unsupported micro ISA version")
    return MicroProgram(data[5:])


class Assembler:
    """Builds instruction streams; labels resolve to byte offsets."""

    def __init__(self):
        self._items: List[Tuple] = []   # ("ins", mnemonic, operands) | ("label", name)

    def label(self, name: str) -> "Assembler":
        self._items.append(("label", name))
        return self

    def ins(self, mnemonic: str, *operands) -> "Assembler":
        if mnemonic not in _MNEMONICS:
            raise ParseError(f"unknown mnemonic {mnemonic!r}")
        self._items.append(("ins", mnemonic, operands))
        return self

    def __getattr__(self, name):
        if name in _MNEMONICS:
            return lambda *operands: self.ins(name, *operands)
        raise AttributeError(name)

    def _encode_ins(self, mnemonic: str, operands, labels) -> bytes:
        op, kinds = _MNEMONICS[mnemonic]
        if len(operands) != len(kinds):
            raise ParseError(
                f"{mnemonic} takes {len(kinds)} operands, got {len(operands)}")
        chunk = bytearray([op])
        for kind, operand in zip(kinds, operands):
            if kind == "r":
                reg = int(operand)
                if not 0 <= reg < 8:
                    raise ParseError(f"register {operand!r} out of range")
                chunk.append(reg)
            elif kind == "i":
                chunk.extend(encode_sleb(int(operand)))
            else:
                if isinstance(operand, str):
                    if labels is None:
                        return bytes(chunk) + b"\x00\x00\x00\x00"
                    if operand not in labels:
                        raise ParseError(f"undefined label {operand!r}")
                    target = labels[operand]
                else:
                    target = int(operand)
                chunk.extend(target.to_bytes(4, "little"))
        return bytes(chunk)

    def assemble(self) -> MicroProgram:
        # jump operands are fixed-width, so one sizing pass resolves labels
        labels: Dict[str, int] = {}
        offset = 0
        for item in self._items:
            if item[0] == "label":
                labels[item[1]] = offset
            else:
                offset += len(self._encode_ins(item[1], item[2], None))
        code = bytearray()
        for item in self._items:
            if item[0] == "ins":
                code.extend(self._encode_ins(item[1], item[2], labels))
        return MicroProgram(bytes(code))


def _parse_operand(token: str):
    if token.startswith("r") and token[1:].isdigit():
        return int(token[1:])
    try:
        return int(token)
    except ValueError:
        return token  # label reference


def assemble_text(text: str) -> MicroProgram:
    """Assemble the one-instruction-per-line format; `;` starts a comment."""
    asm = Assembler()
    for raw in text.splitlines():
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if line.endswith(":"):
            asm.label(line[:-1].strip())
            continue
        parts = line.split()
        mnemonic = parts[0].lower()
        if mnemonic not in _MNEMONICS:
            raise ParseError(f"unknown mnemonic {mnemonic!r}")
        op, kinds = _MNEMONICS[mnemonic]
        operands = []
        for kind, token in zip(kinds, parts[1:]):
            if kind in ("r",):
                if not token.startswith("r") or not token[1:].isdigit():
                    raise ParseError(f"expected register, got {token!r}")
                operands.append(int(token[1:]))
            else:
                operands.append(_parse_operand(token))
        if len(operands) != len(kinds):
            raise ParseError(f"{mnemonic} takes {len(kinds)} operands: {line!r}")
        asm.ins(mnemonic, *operands)
    return asm.assemble()


def disassemble(p: MicroProgram) -> str:
    """Canonical assembly text; assemble_text round-trips it."""
    instrs, offsets = _decode(p.code)
    index_to_offset = {index: off for off, index in offsets.items()}
    targets = sorted({ins[-1] for ins in instrs
                      if ins[0] in (OP_JMP, OP_JZ)})
    label_names = {index: f"L{k}" for k, index in enumerate(targets)}
    lines = []
    for index, ins in enumerate(instrs):
        if index in label_names:
            lines.append(f"{label_names[index]}:")
        mnemonic, kinds = _OPCODE_TO_MNEMONIC[ins[0]]
        rendered = []
        for kind, operand in zip(kinds, ins[1:]):
            if kind == "r":
                rendered.append(f"r{operand}")
            elif kind == "i":
                rendered.append(str(operand))
            else:
                rendered.append(label_names[operand])
        lines.append("  " + " ".join([mnemonic] + rendered))
    if len(instrs) in label_names:
        lines.append(f"{label_names[len(instrs)]}:")
    return "\n".join(lines) + "\n"
