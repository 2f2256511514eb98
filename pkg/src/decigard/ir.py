"""Total intermediate representation for models.

Every program is a finite tree of structurally bounded nodes, so a fuel
bound is computable before execution and evaluation always terminates.
Programs map bit vectors and exact rational vectors; the interpreter keeps
all mutable state in per-call frames, so shared programs are safe to
evaluate concurrently.

Node kinds and their fuel costs (1 step per scalar operation, a convention;
only the existence of the bound matters):

    affine   d_out * (d_in + 1)
    act      element count
    seq/par  sum of children
    decode   width (bits -> 0/1 rational vector)
    encode   width (rational vector -> bits, threshold 1/2, ties to 1)
    repeat   theta * (body + pred) + 1
    select   cond + max(then, else) + 1
    slice    1

`select` evaluates its condition and exactly one branch, all on the same
input value; `slice` projects a bit range. Both exist so guard
constructions can inline a judge without re-running the guarded model.
An empty `seq` is the identity program.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Tuple, Union

from .kernel import (BitVec, HALF, ONE, Rat, RatVec, StructureError,
                     IntervalError, WidthError, ZERO, parse_rat, format_rat,
                     ParseError)

NEG_ONE = Rat(-1)

Value = Union[BitVec, RatVec]


class Shape(NamedTuple):
    kind: str  # "bits" | "vec"
    size: int

    def __str__(self) -> str:
        return f"{self.kind} {self.size}"


def bits(n: int) -> Shape:
    return Shape("bits", n)


def vec(n: int) -> Shape:
    return Shape("vec", n)


# ---------------------------------------------------------------------------
# Node kinds


@dataclass(frozen=True)
class Affine:
    matrix: Tuple[Tuple[Rat, ...], ...]  # d_out rows of d_in coefficients
    bias: Tuple[Rat, ...]


@dataclass(frozen=True)
class Act:
    kind: str  # relu | sign | step | clip
    lo: Optional[Rat] = None
    hi: Optional[Rat] = None

    KINDS = ("relu", "sign", "step", "clip")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise StructureError(f"unknown activation {self.kind!r}")
        if self.kind == "clip":
            if self.lo is None or self.hi is None:
                raise StructureError("clip needs two bounds")
            if self.lo > self.hi:
                raise IntervalError(f"clip bounds reversed: {self.lo} > {self.hi}")
        elif self.lo is not None or self.hi is not None:
            raise StructureError(f"{self.kind} takes no bounds")


@dataclass(frozen=True)
class Seq:
    children: Tuple["Node", ...]


@dataclass(frozen=True)
class Parallel:
    children: Tuple["Node", ...]


@dataclass(frozen=True)
class Decode:
    width: int


@dataclass(frozen=True)
class Encode:
    width: int


@dataclass(frozen=True)
class Repeat:
    theta: int
    body: "Node"
    pred: "Node"          # maps loop value -> bits 1
    terminal: BitVec      # masked output once theta is exhausted


@dataclass(frozen=True)
class Select:
    cond: "Node"          # same input as the branches, yields bits 1
    then: "Node"
    orelse: "Node"


@dataclass(frozen=True)
class Slice:
    lo: int
    hi: int               # bit positions [lo, hi), MSB first


Node = Union[Affine, Act, Seq, Parallel, Decode, Encode, Repeat, Select, Slice]


def affine(matrix, bias) -> Affine:
    """Build an affine node, coercing entries to exact rationals."""
    rows = tuple(tuple(Rat(c) for c in row) for row in matrix)
    b = tuple(Rat(c) for c in bias)
    if not rows or not rows[0]:
        raise StructureError("affine needs at least a 1x1 matrix")
    if any(len(r) != len(rows[0]) for r in rows):
        raise StructureError("ragged affine matrix")
    if len(b) != len(rows):
        raise StructureError(f"bias length {len(b)} != {len(rows)} rows")
    return Affine(rows, b)


def clip(lo, hi) -> Act:
    return Act("clip", Rat(lo), Rat(hi))


def identity() -> Seq:
    return Seq(())


# ---------------------------------------------------------------------------
# Shape inference and fuel bounds


def _infer(node: Node, shape: Shape) -> Tuple[Shape, int]:
    """Output shape and static fuel bound of `node` applied at `shape`."""
    if isinstance(node, Affine):
        d_out, d_in = len(node.matrix), len(node.matrix[0])
        if shape != vec(d_in):
            raise StructureError(f"affine {d_out}x{d_in} applied to {shape}")
        return vec(d_out), d_out * (d_in + 1)
    if isinstance(node, Act):
        if shape.kind != "vec":
            raise StructureError(f"activation applied to {shape}")
        return shape, shape.size
    if isinstance(node, Seq):
        fuel = 0
        for child in node.children:
            shape, f = _infer(child, shape)
            fuel += f
        return shape, fuel
    if isinstance(node, Parallel):
        if not node.children:
            raise StructureError("parallel needs at least one child")
        outs, fuel = [], 0
        for child in node.children:
            out, f = _infer(child, shape)
            outs.append(out)
            fuel += f
        kind = outs[0].kind
        if any(o.kind != kind for o in outs):
            raise StructureError("parallel children mix bits and vec outputs")
        return Shape(kind, sum(o.size for o in outs)), fuel
    if isinstance(node, Decode):
        if shape != bits(node.width):
            raise StructureError(f"decode {node.width} applied to {shape}")
        return vec(node.width), node.width
    if isinstance(node, Encode):
        if shape != vec(node.width):
            raise StructureError(f"encode {node.width} applied to {shape}")
        return bits(node.width), node.width
    if isinstance(node, Repeat):
        if node.theta < 1:
            raise StructureError("repeat needs theta >= 1")
        loop_shape = bits(node.terminal.width)
        if shape != loop_shape:
            raise StructureError(f"repeat over {loop_shape} applied to {shape}")
        body_out, body_fuel = _infer(node.body, loop_shape)
        if body_out != loop_shape:
            raise StructureError(f"repeat body maps {loop_shape} to {body_out}")
        pred_out, pred_fuel = _infer(node.pred, loop_shape)
        if pred_out != bits(1):
            raise StructureError(f"repeat predicate yields {pred_out}, want bits 1")
        return loop_shape, node.theta * (body_fuel + pred_fuel) + 1
    if isinstance(node, Select):
        cond_out, cond_fuel = _infer(node.cond, shape)
        if cond_out != bits(1):
            raise StructureError(f"select condition yields {cond_out}, want bits 1")
        then_out, then_fuel = _infer(node.then, shape)
        else_out, else_fuel = _infer(node.orelse, shape)
        if then_out != else_out:
            raise StructureError(f"select branches disagree: {then_out} vs {else_out}")
        return then_out, cond_fuel + max(then_fuel, else_fuel) + 1
    if isinstance(node, Slice):
        if shape.kind != "bits":
            raise StructureError(f"slice applied to {shape}")
        if not 0 <= node.lo < node.hi <= shape.size:
            raise StructureError(f"slice [{node.lo},{node.hi}) of {shape}")
        return bits(node.hi - node.lo), 1
    raise StructureError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Program wrapper


@dataclass(frozen=True)
class TotalProgram:
    """A well-formed program tree together with its declared input shape.

    Construction validates the tree and precomputes the output shape and
    the static fuel bound; malformed trees raise StructureError.
    """

    root: Node
    in_shape: Shape
    out_shape: Shape = field(init=False, compare=False, repr=False)
    fuel_bound: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        out, fuel = _infer(self.root, self.in_shape)
        object.__setattr__(self, "out_shape", out)
        object.__setattr__(self, "fuel_bound", fuel)

    def __getstate__(self):
        return (self.root, self.in_shape)

    def __setstate__(self, state):
        object.__setattr__(self, "root", state[0])
        object.__setattr__(self, "in_shape", state[1])
        self.__post_init__()


def program(root: Node, in_shape: Shape) -> TotalProgram:
    return TotalProgram(root, in_shape)


def static_fuel_bound(p: TotalProgram) -> int:
    """Upper bound on interpreter steps for any input."""
    return p.fuel_bound


# ---------------------------------------------------------------------------
# Interpreter: each node compiles once to a closure returning (value, steps)

Runner = Callable[[Value], Tuple[Value, int]]


def _compile(node: Node) -> Runner:
    if isinstance(node, Affine):
        # zero entries are skipped at eval time; precompute the sparse rows
        sparse = tuple(tuple((j, c) for j, c in enumerate(row) if c)
                       for row in node.matrix)
        bias = node.bias
        cost = len(node.matrix) * (len(node.matrix[0]) + 1)

        def run_affine(v):
            out = []
            for terms, acc in zip(sparse, bias):
                for j, c in terms:
                    acc = acc + c * v[j]
                out.append(acc)
            return tuple(out), cost

        return run_affine

    if isinstance(node, Act):
        kind = node.kind
        if kind == "relu":
            def run_act(v):
                return tuple(x if x > 0 else ZERO for x in v), len(v)
        elif kind == "sign":
            def run_act(v):
                return tuple(ONE if x > 0 else (ZERO if x == 0 else NEG_ONE)
                             for x in v), len(v)
        elif kind == "step":
            def run_act(v):
                return tuple(ONE if x >= 0 else ZERO for x in v), len(v)
        else:
            lo, hi = node.lo, node.hi

            def run_act(v):
                return tuple(lo if x < lo else (hi if x > hi else x)
                             for x in v), len(v)
        return run_act

    if isinstance(node, Seq):
        parts = tuple(_compile(c) for c in node.children)

        def run_seq(v):
            steps = 0
            for part in parts:
                v, s = part(v)
                steps += s
            return v, steps

        return run_seq

    if isinstance(node, Parallel):
        parts = tuple(_compile(c) for c in node.children)

        def run_par(v):
            steps = 0
            outs = []
            for part in parts:
                out, s = part(v)
                outs.append(out)
                steps += s
            if isinstance(outs[0], BitVec):
                acc = outs[0]
                for out in outs[1:]:
                    acc = acc.concat(out)
                return acc, steps
            return tuple(x for out in outs for x in out), steps

        return run_par

    if isinstance(node, Decode):
        w = node.width

        def run_decode(v):
            value = v.value
            return tuple(ONE if (value >> k) & 1 else ZERO
                         for k in range(w - 1, -1, -1)), w

        return run_decode

    if isinstance(node, Encode):
        w = node.width

        def run_encode(v):
            acc = 0
            for x in v:
                acc = (acc << 1) | (1 if x >= HALF else 0)
            return BitVec(w, acc), w

        return run_encode

    if isinstance(node, Repeat):
        body = _compile(node.body)
        pred = _compile(node.pred)
        theta, terminal = node.theta, node.terminal

        def run_repeat(v):
            steps = 0
            for _ in range(theta):
                v, s = body(v)
                steps += s
                flag, s = pred(v)
                steps += s
                if flag.value:
                    return v, steps
            return terminal, steps + 1  # theta exhausted: masked output

        return run_repeat

    if isinstance(node, Select):
        cond = _compile(node.cond)
        then = _compile(node.then)
        orelse = _compile(node.orelse)

        def run_select(v):
            flag, steps = cond(v)
            out, s = (then if flag.value else orelse)(v)
            return out, steps + s + 1

        return run_select

    if isinstance(node, Slice):
        lo, hi = node.lo, node.hi

        def run_slice(v):
            return v.slice(lo, hi), 1

        return run_slice

    raise StructureError(f"unknown node {node!r}")


def _check_value(value: Value, shape: Shape) -> None:
    if shape.kind == "bits":
        if not isinstance(value, BitVec) or value.width != shape.size:
            raise WidthError(f"expected {shape}, got {value!r}")
    else:
        if isinstance(value, BitVec) or len(value) != shape.size:
            raise WidthError(f"expected {shape}, got {value!r}")


def eval_program(p: TotalProgram, value: Value) -> Tuple[Value, int]:
    """Evaluate `p`; returns (output, steps_used) with steps <= fuel bound."""
    _check_value(value, p.in_shape)
    fn = getattr(p, "_fn", None)
    if fn is None:
        fn = _compile(p.root)
        object.__setattr__(p, "_fn", fn)
    return fn(value)


# ---------------------------------------------------------------------------
# Text format: parenthesized expression trees, rationals as p/q


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace() or c == ",":
            i += 1
        elif c in "()[]":
            tokens.append(c)
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()[],":
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


class _TokenStream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}")


def _parse_int(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer, got {tok!r}") from None


def _parse_vector(ts: _TokenStream) -> Tuple[Rat, ...]:
    ts.expect("[")
    items = []
    while ts.peek() != "]":
        items.append(parse_rat(ts.next()))
    ts.expect("]")
    return tuple(items)


def _parse_matrix(ts: _TokenStream) -> Tuple[Tuple[Rat, ...], ...]:
    ts.expect("[")
    rows = []
    while ts.peek() != "]":
        rows.append(_parse_vector(ts))
    ts.expect("]")
    return tuple(rows)


def _parse_node(ts: _TokenStream) -> Node:
    ts.expect("(")
    head = ts.next()
    if head == "seq" or head == "par":
        children = []
        while ts.peek() != ")":
            children.append(_parse_node(ts))
        ts.expect(")")
        if head == "seq":
            return Seq(tuple(children))
        return Parallel(tuple(children))
    if head == "decode" or head == "encode":
        width = _parse_int(ts.next())
        ts.expect(")")
        return Decode(width) if head == "decode" else Encode(width)
    if head == "slice":
        lo = _parse_int(ts.next())
        hi = _parse_int(ts.next())
        ts.expect(")")
        return Slice(lo, hi)
    if head == "affine":
        dims = ts.next()
        try:
            d_out, d_in = (int(part) for part in dims.split("x"))
        except ValueError:
            raise ParseError(f"bad affine dims {dims!r}") from None
        matrix = _parse_matrix(ts)
        bias = _parse_vector(ts)
        ts.expect(")")
        node = affine(matrix, bias)
        if (len(node.matrix), len(node.matrix[0])) != (d_out, d_in):
            raise ParseError(f"affine dims {dims} do not match literals")
        return node
    if head == "act":
        kind = ts.next()
        if kind == "clip":
            lo = parse_rat(ts.next())
            hi = parse_rat(ts.next())
            ts.expect(")")
            return Act("clip", lo, hi)
        ts.expect(")")
        return Act(kind)
    if head == "repeat":
        theta = _parse_int(ts.next())
        body = _parse_node(ts)
        pred = _parse_node(ts)
        terminal = BitVec.from_string(ts.next())
        ts.expect(")")
        return Repeat(theta, body, pred, terminal)
    if head == "select":
        cond = _parse_node(ts)
        then = _parse_node(ts)
        orelse = _parse_node(ts)
        ts.expect(")")
        return Select(cond, then, orelse)
    raise ParseError(f"unknown node kind {head!r}")


def _shape_preserving(node: Node) -> bool:
    if isinstance(node, Act):
        return True
    if isinstance(node, Seq):
        return all(_shape_preserving(c) for c in node.children)
    return False


def infer_input_shape(node: Node) -> Optional[Shape]:
    """Input shape forced by the tree itself, or None when polymorphic."""
    if isinstance(node, Affine):
        return vec(len(node.matrix[0]))
    if isinstance(node, Decode):
        return bits(node.width)
    if isinstance(node, Encode):
        return vec(node.width)
    if isinstance(node, Repeat):
        return bits(node.terminal.width)
    if isinstance(node, Seq):
        for child in node.children:
            shape = infer_input_shape(child)
            if shape is not None:
                return shape
            if not _shape_preserving(child):
                return None  # transformed value hides the rest
        return None
    if isinstance(node, Parallel):
        for child in node.children:
            shape = infer_input_shape(child)
            if shape is not None:
                return shape
        return None
    if isinstance(node, Select):
        for child in (node.cond, node.then, node.orelse):
            shape = infer_input_shape(child)
            if shape is not None:
                return shape
        return None
    return None  # Act, Slice


def parse_program(text: str) -> TotalProgram:
    """Parse the IR text format.

    Accepts a bare node expression when its input shape is inferable, or
    the explicit wrapper `(program (in bits L) <node>)`.
    """
    ts = _TokenStream(_tokenize(text))
    if ts.peek() != "(" or len(ts.tokens) < 2:
        raise ParseError("program must start with '('")
    if ts.tokens[ts.pos + 1] == "program":
        ts.expect("(")
        ts.expect("program")
        ts.expect("(")
        ts.expect("in")
        kind = ts.next()
        if kind not in ("bits", "vec"):
            raise ParseError(f"bad input kind {kind!r}")
        size = _parse_int(ts.next())
        ts.expect(")")
        root = _parse_node(ts)
        ts.expect(")")
        in_shape = Shape(kind, size)
    else:
        root = _parse_node(ts)
        in_shape = infer_input_shape(root)
        if in_shape is None:
            raise ParseError("cannot infer input shape; use (program (in ...) ...)")
    if ts.peek() is not None:
        raise ParseError(f"trailing input at token {ts.peek()!r}")
    try:
        return TotalProgram(root, in_shape)
    except (StructureError, IntervalError) as exc:
        raise ParseError(f"ill-formed program: {exc}") from None


def _print_node(node: Node) -> str:
    if isinstance(node, Affine):
        d_out, d_in = len(node.matrix), len(node.matrix[0])
        rows = ",".join("[" + ",".join(format_rat(c) for c in row) + "]"
                        for row in node.matrix)
        bias = ",".join(format_rat(c) for c in node.bias)
        return f"(affine {d_out}x{d_in} [{rows}] [{bias}])"
    if isinstance(node, Act):
        if node.kind == "clip":
            return f"(act clip {format_rat(node.lo)} {format_rat(node.hi)})"
        return f"(act {node.kind})"
    if isinstance(node, Seq):
        inner = " ".join(_print_node(c) for c in node.children)
        return f"(seq {inner})" if inner else "(seq)"
    if isinstance(node, Parallel):
        return "(par " + " ".join(_print_node(c) for c in node.children) + ")"
    if isinstance(node, Decode):
        return f"(decode {node.width})"
    if isinstance(node, Encode):
        return f"(encode {node.width})"
    if isinstance(node, Repeat):
        return (f"(repeat {node.theta} {_print_node(node.body)} "
                f"{_print_node(node.pred)} {node.terminal})")
    if isinstance(node, Select):
        return (f"(select {_print_node(node.cond)} {_print_node(node.then)} "
                f"{_print_node(node.orelse)})")
    if isinstance(node, Slice):
        return f"(slice {node.lo} {node.hi})"
    raise StructureError(f"unknown node {node!r}")


def print_program(p: TotalProgram) -> str:
    """Canonical text for a program; parse_program round-trips it."""
    body = _print_node(p.root)
    if infer_input_shape(p.root) == p.in_shape:
        return body
    return f"(program (in {p.in_shape.kind} {p.in_shape.size}) {body})"
