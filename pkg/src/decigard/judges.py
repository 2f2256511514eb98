"""Judge functions: executable non-trivial predicates on (input, output) pairs.

A judge either runs a total predicate program on the concatenated bits of
(i, o) or evaluates a boolean combination of exact linear inequalities over
the concatenated coordinates. Every judge carries an executable positive
witness program and a recorded negative pair; `check_nontrivial` verifies
both exhaustively.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from .kernel import (BitVec, DEFAULT_MAX_ENUM_BITS, JudgeCheck, ONE, ParseError,
                     Rat, RatVec, StructureError, WidthError, ZERO, format_rat,
                     parse_rat)
from .ir import (Act, Affine, Decode, Encode, Node, Seq, TotalProgram, bits,
                 eval_program, parse_program, print_program)

MAX_BOOL_DEPTH = 8


@dataclass(frozen=True)
class LinAtom:
    """const + coeffs . v >= 0 over the concatenated (input, output) vector."""

    const: Rat
    coeffs: Tuple[Rat, ...]


@dataclass(frozen=True)
class LinAnd:
    children: Tuple["LinExpr", ...]


@dataclass(frozen=True)
class LinOr:
    children: Tuple["LinExpr", ...]


LinExpr = Union[LinAtom, LinAnd, LinOr]


def atom(const, coeffs) -> LinAtom:
    return LinAtom(Rat(const), tuple(Rat(c) for c in coeffs))


class JudgeVectorError(WidthError):
    def __init__(self):
        super().__init__("only linear judges accept rational vector outputs")


def expr_depth(expr: LinExpr) -> int:
    if isinstance(expr, LinAtom):
        return 0
    return 1 + max((expr_depth(c) for c in expr.children), default=0)


def expr_arity(expr: LinExpr) -> int:
    if isinstance(expr, LinAtom):
        return len(expr.coeffs)
    arities = {expr_arity(c) for c in expr.children}
    if len(arities) != 1:
        raise StructureError("mixed arities in linear expression")
    return arities.pop()


def eval_linear(expr: LinExpr, values: RatVec) -> Tuple[int, int]:
    """Evaluate a linear expression; returns (bit, atoms evaluated)."""
    if isinstance(expr, LinAtom):
        total = expr.const
        for c, v in zip(expr.coeffs, values):
            if c:
                total += c * v
        return (1 if total >= 0 else 0), 1
    steps = 0
    if isinstance(expr, LinAnd):
        for child in expr.children:
            bit, s = eval_linear(child, values)
            steps += s
            if not bit:
                return 0, steps
        return 1, steps
    for child in expr.children:
        bit, s = eval_linear(child, values)
        steps += s
        if bit:
            return 1, steps
    return 0, steps


@dataclass(frozen=True)
class Judge:
    """Alignment predicate with positive witness and negative example.

    kind "predicate": `body` is a total program bits(in+out) -> bits(1).
    kind "linear": `linear` is a boolean combination (depth <= 8) of
    inequalities over the in+out concatenated coordinates.
    """

    name: str
    kind: str  # predicate | linear
    in_width: int
    out_width: int
    witness: TotalProgram           # bits(in) -> bits(out)
    negative: Tuple[BitVec, BitVec]
    body: Optional[TotalProgram] = None
    linear: Optional[LinExpr] = None

    def __post_init__(self):
        if self.kind not in ("predicate", "linear"):
            raise StructureError(f"unknown judge kind {self.kind!r}")
        if self.in_width < 1 or self.out_width < 1:
            raise StructureError("judge widths must be >= 1")
        neg_i, neg_o = self.negative
        if neg_i.width != self.in_width or neg_o.width != self.out_width:
            raise WidthError("negative example widths do not match judge")
        if self.witness.in_shape != bits(self.in_width) \
                or self.witness.out_shape != bits(self.out_width):
            raise StructureError("witness must map bits(in) -> bits(out)")
        pair = self.in_width + self.out_width
        if self.kind == "predicate":
            if self.body is None or self.linear is not None:
                raise StructureError("predicate judge needs a body program")
            if self.body.in_shape != bits(pair) or self.body.out_shape != bits(1):
                raise StructureError("judge body must map bits(in+out) -> bits(1)")
        else:
            if self.linear is None or self.body is not None:
                raise StructureError("linear judge needs a linear expression")
            if expr_arity(self.linear) != pair:
                raise StructureError(
                    f"linear expression arity != {pair} (in+out)")
            if expr_depth(self.linear) > MAX_BOOL_DEPTH:
                raise StructureError(f"boolean depth > {MAX_BOOL_DEPTH}")


def _linear_values(i: BitVec, o) -> RatVec:
    head = tuple(ONE if b else ZERO for b in i.bits())
    if isinstance(o, BitVec):
        return head + tuple(ONE if b else ZERO for b in o.bits())
    return head + tuple(o)


def eval_judge_with_steps(judge: Judge, i: BitVec, o) -> Tuple[int, int]:
    """Judge bit for the pair plus a deterministic step count."""
    if i.width != judge.in_width:
        raise WidthError(f"input width {i.width} != judge in={judge.in_width}")
    if isinstance(o, BitVec):
        if o.width != judge.out_width:
            raise WidthError(f"output width {o.width} != judge out={judge.out_width}")
    elif judge.kind != "linear":
        raise JudgeVectorError()
    elif len(o) != judge.out_width:
        raise WidthError(f"output arity {len(o)} != judge out={judge.out_width}")
    if judge.kind == "predicate":
        out, steps = eval_program(judge.body, i.concat(o))
        return out.value, steps
    return eval_linear(judge.linear, _linear_values(i, o))


def eval_judge(judge: Judge, i: BitVec, o) -> int:
    """1 if the judge accepts the pair, else 0."""
    return eval_judge_with_steps(judge, i, o)[0]


def _collect_atoms(expr: LinExpr, atoms: List[LinAtom]):
    if isinstance(expr, LinAtom):
        atoms.append(expr)
        return ("atom", len(atoms) - 1)
    tag = "and" if isinstance(expr, LinAnd) else "or"
    return (tag, [_collect_atoms(c, atoms) for c in expr.children])


def linear_body_program(expr: LinExpr, arity: int) -> TotalProgram:
    """Compile a linear judge expression to bits(arity) -> bits(1).

    Atom bits come from one affine + step stage. Each boolean combinator
    becomes an affine + relu stage: and(c..) = relu(sum - (n-1)) and
    or(c..) = 1 - relu(1 - sum); the `1 -` corrections ride along as
    symbolic forms (sign, slot, offset) folded into the next affine stage,
    and relu passes 0/1 passthrough values unchanged.
    """
    atoms: List[LinAtom] = []
    tree = _collect_atoms(expr, atoms)
    nodes: List[Node] = [Decode(arity),
                         Affine(tuple(a.coeffs for a in atoms),
                                tuple(a.const for a in atoms)),
                         Act("step")]
    # forms[k] = (sign, slot, offset): value_k = sign * stage_out[slot] + offset
    forms = [(1, k, ZERO) for k in range(len(atoms))]

    def build(node) -> int:
        if node[0] == "atom":
            return node[1]
        child_ids = [build(c) for c in node[1]]
        width = len(forms)
        rows = []
        bias = []
        for sign, slot, offset in forms:  # passthrough every live value
            row = [ZERO] * width
            row[slot] = Rat(sign)
            rows.append(tuple(row))
            bias.append(offset)
        comb = [ZERO] * width
        total_offset = ZERO
        for cid in child_ids:
            sign, slot, offset = forms[cid]
            comb[slot] += Rat(sign)
            total_offset += offset
        n = len(child_ids)
        if node[0] == "and":
            rows.append(tuple(comb))
            bias.append(total_offset - (n - 1))
            new_form = (1, width, ZERO)
        else:
            rows.append(tuple(-c for c in comb))
            bias.append(ONE - total_offset)
            new_form = (-1, width, ONE)
        nodes.append(Affine(tuple(rows), tuple(bias)))
        nodes.append(Act("relu"))
        for k in range(width):
            forms[k] = (1, k, ZERO)  # passthroughs re-emitted verbatim
        forms.append(new_form)
        return width

    root_id = build(tree)
    sign, slot, offset = forms[root_id]
    final_row = [ZERO] * len(forms)
    final_row[slot] = Rat(sign)
    nodes.append(Affine((tuple(final_row),), (offset,)))
    nodes.append(Encode(1))
    return TotalProgram(Seq(tuple(nodes)), bits(arity))


def body_program(judge: Judge) -> TotalProgram:
    """The judge's accept bit as a total program bits(in+out) -> bits(1)."""
    if judge.kind == "predicate":
        return judge.body
    return linear_body_program(judge.linear, judge.in_width + judge.out_width)


def check_nontrivial(judge: Judge, input_width: Optional[int] = None, *,
                     max_width: int = DEFAULT_MAX_ENUM_BITS) -> JudgeCheck:
    """Verify the judge rejects its negative pair and approves a witness
    output for every input in the 2^L space."""
    width = judge.in_width if input_width is None else input_width
    if width != judge.in_width:
        raise WidthError(f"judge declares in={judge.in_width}, asked {width}")
    if width > max_width:
        return JudgeCheck.too_large(
            f"input width {width} over enumeration budget {max_width}")
    neg_i, neg_o = judge.negative
    if eval_judge(judge, neg_i, neg_o) != 0:
        return JudgeCheck.trivial("negative example not negative")
    for i in BitVec.enumerate(width):
        o, _ = eval_program(judge.witness, i)
        if eval_judge(judge, i, o) != 1:
            return JudgeCheck.trivial(f"no positive witness at {i}")
    return JudgeCheck.ok()


# ---------------------------------------------------------------------------
# Text format

_VAR_RE = re.compile(r"^(-?)x(\d+)$")


def parse_inequality(text: str, arity: int) -> LinAtom:
    """Parse `c0 + c1*x1 + ... >= 0` with exact fraction coefficients."""
    text = text.strip()
    if not text.endswith(">= 0") and not text.endswith(">=0"):
        raise ParseError(f"inequality must end with '>= 0': {text!r}")
    lhs = text[: text.rindex(">=")].strip()
    const = ZERO
    coeffs = [ZERO] * arity
    for raw in lhs.split("+"):
        term = raw.strip()
        if not term:
            raise ParseError(f"empty term in {text!r}")
        if "*" in term:
            coeff_text, _, var = term.partition("*")
            coeff = parse_rat(coeff_text)
            if not var.startswith("x"):
                raise ParseError(f"bad term {term!r}")
            index_text = var[1:]
        else:
            m = _VAR_RE.match(term)
            if m:
                coeff = Rat(-1) if m.group(1) else ONE
                index_text = m.group(2)
            else:
                const += parse_rat(term)
                continue
        try:
            index = int(index_text)
        except ValueError:
            raise ParseError(f"bad variable in term {term!r}") from None
        if not 1 <= index <= arity:
            raise ParseError(f"variable x{index} out of range 1..{arity}")
        coeffs[index - 1] += coeff
    return LinAtom(const, tuple(coeffs))


def print_inequality(a: LinAtom) -> str:
    parts = [format_rat(a.const)]
    for k, c in enumerate(a.coeffs, start=1):
        if c:
            parts.append(f"{format_rat(c)}*x{k}")
    return " + ".join(parts) + " >= 0"


def _flat_atoms(expr: LinExpr) -> List[LinAtom]:
    if isinstance(expr, LinAtom):
        return [expr]
    if isinstance(expr, LinAnd) and all(
            isinstance(c, LinAtom) for c in expr.children):
        return list(expr.children)
    raise StructureError(
        "only conjunctions of inequalities are serializable to judge files")


def print_judge(judge: Judge) -> str:
    """Canonical judge file text; parse_judge round-trips it."""
    neg_i, neg_o = judge.negative
    lines = [
        f"judge {judge.name} kind={judge.kind} in={judge.in_width} "
        f"out={judge.out_width}",
        f"neg {neg_i} {neg_o}",
    ]
    if judge.kind == "predicate":
        lines.append(f"body {print_program(judge.body)}")
    else:
        ineqs = "; ".join(print_inequality(a) for a in _flat_atoms(judge.linear))
        lines.append(f"linear {ineqs}")
    lines.append(f"witness {print_program(judge.witness)}")
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(
    r"^judge\s+(\S+)\s+kind=(predicate|linear)\s+in=(\d+)\s+out=(\d+)\s*$")


def parse_judge(text: str) -> Judge:
    """Parse the judge text format (lines starting `micro-` are ignored;
    they belong to the micro-machine bundle loader)."""
    lines = [ln.strip() for ln in text.splitlines()
             if ln.strip() and not ln.strip().startswith("#")]
    lines = [ln for ln in lines if not ln.startswith("micro-")]
    if not lines:
        raise ParseError("empty judge file")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ParseError(f"bad judge header: {lines[0]!r}")
    name, kind = m.group(1), m.group(2)
    in_width, out_width = int(m.group(3)), int(m.group(4))
    fields = {}
    for line in lines[1:]:
        key, _, rest = line.partition(" ")
        if key in fields:
            raise ParseError(f"duplicate judge field {key!r}")
        fields[key] = rest.strip()
    for required in ("neg", "witness"):
        if required not in fields:
            raise ParseError(f"judge file missing {required!r} line")
    neg_parts = fields["neg"].split()
    if len(neg_parts) != 2:
        raise ParseError(f"bad neg line: {fields['neg']!r}")
    negative = (BitVec.from_string(neg_parts[0]),
                BitVec.from_string(neg_parts[1]))
    witness = parse_program(fields["witness"])
    body = None
    linear = None
    if kind == "predicate":
        if "body" not in fields:
            raise ParseError("predicate judge needs a body line")
        body = parse_program(fields["body"])
    else:
        if "linear" not in fields:
            raise ParseError("linear judge needs a linear line")
        arity = in_width + out_width
        atoms = tuple(parse_inequality(part, arity)
                      for part in fields["linear"].split(";") if part.strip())
        if not atoms:
            raise ParseError("linear judge needs at least one inequality")
        linear = atoms[0] if len(atoms) == 1 else LinAnd(atoms)
    try:
        return Judge(name, kind, in_width, out_width, witness, negative,
                     body=body, linear=linear)
    except (StructureError, WidthError) as exc:
        raise ParseError(f"ill-formed judge: {exc}") from None
