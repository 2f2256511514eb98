"""Stock program constructions over the total IR.

All builders return well-formed TotalPrograms over bit vectors; boolean
logic is realized with exact affine arithmetic on 0/1 values plus step and
relu activations.
"""

from __future__ import annotations

from typing import Sequence

from .kernel import BitVec, StructureError
from .ir import (Act, Affine, Decode, Encode, Node, Parallel, Repeat, Select,
                 Seq, Slice, TotalProgram, affine, bits, identity, program)


def compose(*progs: TotalProgram) -> TotalProgram:
    """Left-to-right composition; output shapes must chain."""
    if not progs:
        raise StructureError("compose needs at least one program")
    for left, right in zip(progs, progs[1:]):
        if left.out_shape != right.in_shape:
            raise StructureError(
                f"cannot compose {left.out_shape} into {right.in_shape}")
    return program(Seq(tuple(p.root for p in progs)), progs[0].in_shape)


def identity_bits(width: int) -> TotalProgram:
    return program(identity(), bits(width))


def const_output(in_width: int, value: BitVec) -> TotalProgram:
    """Program ignoring its input and emitting `value`."""
    zeros = [[0] * in_width for _ in range(value.width)]
    bias = list(value.bits())
    root = Seq((Decode(in_width), affine(zeros, bias), Encode(value.width)))
    return program(root, bits(in_width))


def bit_flip(width: int) -> TotalProgram:
    """Complement every bit: x -> 1 - x."""
    matrix = [[-1 if i == j else 0 for j in range(width)] for i in range(width)]
    root = Seq((Decode(width), affine(matrix, [1] * width), Encode(width)))
    return program(root, bits(width))


def equals_const(width: int, target: BitVec) -> TotalProgram:
    """bits(width) -> bits(1): 1 iff the input equals `target`.

    On 0/1 coordinates, sum_k [x_k == t_k] - width is affine and equals 0
    exactly on the target, negative elsewhere; step picks out equality.
    """
    if target.width != width:
        raise StructureError(f"target width {target.width} != {width}")
    coeffs = [2 * b - 1 for b in target.bits()]
    bias = sum(1 - b for b in target.bits()) - width
    root = Seq((Decode(width), affine([coeffs], [bias]), Act("step"),
                Encode(1)))
    return program(root, bits(width))


def halves_equal(half_width: int) -> TotalProgram:
    """bits(2w) -> bits(1): 1 iff the first w bits equal the last w bits."""
    w = half_width
    rows = []
    for k in range(w):
        plus = [0] * (2 * w)
        plus[k], plus[w + k] = 1, -1
        minus = [0] * (2 * w)
        minus[k], minus[w + k] = -1, 1
        rows.extend([plus, minus])
    # sum of |a_k - b_k| is 0 exactly on equal halves
    total = [[-1] * (2 * w)]
    root = Seq((Decode(2 * w), affine(rows, [0] * (2 * w)), Act("relu"),
                affine(total, [0]), Act("step"), Encode(1)))
    return program(root, bits(2 * w))


def negate_bit() -> TotalProgram:
    root = Seq((Decode(1), affine([[-1]], [1]), Encode(1)))
    return program(root, bits(1))


def _xor_layer(n: int) -> Sequence[Node]:
    """One pairwise-xor reduction layer on a 0/1 vector of length n."""
    pairs, odd = divmod(n, 2)
    rows, bias = [], []
    for j in range(pairs):
        t = [0] * n
        t[2 * j] = t[2 * j + 1] = 1
        rows.append(list(t))
        bias.append(0)          # t_j = a + b
        rows.append(t)
        bias.append(-1)         # u_j = a + b - 1
    if odd:
        passthrough = [0] * n
        passthrough[n - 1] = 1
        rows.append(passthrough)
        bias.append(0)
    out = pairs + odd
    combine = []
    for j in range(pairs):
        row = [0] * len(rows)
        row[2 * j], row[2 * j + 1] = 1, -2  # xor = t - 2*relu(t - 1)
        combine.append(row)
    if odd:
        row = [0] * len(rows)
        row[-1] = 1
        combine.append(row)
    assert len(combine) == out
    return [affine(rows, bias), Act("relu"), affine(combine, [0] * out)]


def parity(width: int) -> TotalProgram:
    """bits(width) -> bits(1): xor of all input bits."""
    nodes: list[Node] = [Decode(width)]
    n = width
    while n > 1:
        nodes.extend(_xor_layer(n))
        n = (n + 1) // 2
    nodes.append(Encode(1))
    return program(Seq(tuple(nodes)), bits(width))


def with_input(m: TotalProgram) -> TotalProgram:
    """bits(L) -> bits(L+K): input concatenated with the model's output."""
    if m.in_shape.kind != "bits" or m.out_shape.kind != "bits":
        raise StructureError("with_input needs a bits -> bits program")
    return program(Parallel((identity(), m.root)), m.in_shape)
