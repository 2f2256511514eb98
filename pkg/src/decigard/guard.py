"""Guard constructions: program-to-program transforms over the total IR.

`filter_model` compiles the judge and its witness into the emitted program
itself (fan out the input, select on the inlined judge bit), so alignment
is a property of the artifact rather than of any runtime hook. The model
runs exactly once per input; the fuel overhead over the bare model is at
most bound(judge body) + bound(witness) + 4.
"""

from __future__ import annotations

from typing import Optional

from .kernel import BitVec, Rat, StructureError, TrivialJudgeError, WidthError
from .ir import (Act, Encode, Node, Parallel, Select, Seq, Slice,
                 TotalProgram, bits, identity, program)
from .judges import Judge, body_program, check_nontrivial
from .programs import const_output, equals_const


def _require_shapes(m: TotalProgram, judge: Judge) -> None:
    if m.in_shape != bits(judge.in_width):
        raise WidthError(
            f"model consumes {m.in_shape}, judge declares in={judge.in_width}")
    if m.out_shape != bits(judge.out_width):
        raise WidthError(
            f"model emits {m.out_shape}, judge declares out={judge.out_width}")


def _require_nontrivial(judge: Judge, skip: bool) -> None:
    if skip:
        return
    check = check_nontrivial(judge)
    if not check:
        raise TrivialJudgeError(check.reason or check.status)


def filter_model(m: TotalProgram, judge: Judge, *,
                 nontrivial_checked: bool = False) -> TotalProgram:
    """Mask the model with the judge: passes accepted outputs through and
    substitutes the witness output whenever the judge rejects."""
    _require_shapes(m, judge)
    _require_nontrivial(judge, nontrivial_checked)
    in_w, out_w = judge.in_width, judge.out_width
    paired = Parallel((identity(), m.root))      # i ++ m(i)
    keep = Slice(in_w, in_w + out_w)             # the model's output
    fallback = Seq((Slice(0, in_w), judge.witness.root))
    root = Seq((paired, Select(body_program(judge).root, keep, fallback)))
    return program(root, bits(in_w))


def misalign_model(m: TotalProgram, judge: Judge, *,
                   nontrivial_checked: bool = False) -> TotalProgram:
    """Force the judge's recorded negative output on its negative input;
    behave as the model everywhere else."""
    _require_shapes(m, judge)
    _require_nontrivial(judge, nontrivial_checked)
    neg_i, neg_o = judge.negative
    hit = equals_const(judge.in_width, neg_i)
    forced = const_output(judge.in_width, neg_o)
    root = Select(hit.root, forced.root, m.root)
    return program(root, bits(judge.in_width))


def _with_clip_before_encode(node: Node, clip: Act) -> Optional[Node]:
    if isinstance(node, Encode):
        return Seq((clip, node))
    if isinstance(node, Seq) and node.children:
        inner = _with_clip_before_encode(node.children[-1], clip)
        if inner is not None:
            return Seq(node.children[:-1] + (inner,))
    return None


def clip_guard(m: TotalProgram, lo: Rat, hi: Rat) -> TotalProgram:
    """Post-compose clip(lo, hi) onto the model's pre-encode output.

    Vector-output models get the clip appended; bit-output models must end
    in an encode node, and the clip lands immediately before it.
    """
    clip = Act("clip", Rat(lo), Rat(hi))  # validates lo <= hi
    if m.out_shape.kind == "vec":
        return program(Seq((m.root, clip)), m.in_shape)
    root = _with_clip_before_encode(m.root, clip)
    if root is None:
        raise StructureError(
            "model does not end in an encode node; nothing to clip")
    return program(root, m.in_shape)
