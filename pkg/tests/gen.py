"""Seeded random instance generators shared across the suite."""

from __future__ import annotations

import random
from fractions import Fraction

from decigard import (AgentLoop, BitVec, Judge, TotalProgram, affine, bits,
                      program)
from decigard.ir import Act, Decode, Encode, Parallel, Repeat, Select, Seq, Slice
from decigard.judges import LinAnd, atom
from decigard.programs import (bit_flip, const_output, halves_equal,
                               identity_bits, negate_bit, parity)


def rand_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-4, 4), rng.choice((1, 1, 2)))


def random_mlp(rng: random.Random, in_width: int, out_width: int,
               max_hidden: int = 4) -> TotalProgram:
    """Decode, a couple of random affine/activation layers, encode."""
    nodes = [Decode(in_width)]
    width = in_width
    for _ in range(rng.randint(0, 2)):
        hidden = rng.randint(1, max_hidden)
        nodes.append(affine(
            [[rand_fraction(rng) for _ in range(width)] for _ in range(hidden)],
            [rand_fraction(rng) for _ in range(hidden)]))
        nodes.append(Act(rng.choice(("relu", "step", "sign"))))
        width = hidden
    nodes.append(affine(
        [[rand_fraction(rng) for _ in range(width)] for _ in range(out_width)],
        [rand_fraction(rng) for _ in range(out_width)]))
    nodes.append(Encode(out_width))
    return program(Seq(tuple(nodes)), bits(in_width))


def random_model(rng: random.Random, in_width: int, out_width: int,
                 structural: bool = True) -> TotalProgram:
    """A random total model; sometimes wraps MLPs in select/par/slice/repeat."""
    roll = rng.random() if structural else 1.0
    if roll < 0.15:
        cond = random_mlp(rng, in_width, 1, max_hidden=2)
        a = random_mlp(rng, in_width, out_width, max_hidden=3)
        b = random_mlp(rng, in_width, out_width, max_hidden=3)
        return program(Select(cond.root, a.root, b.root), bits(in_width))
    if roll < 0.25:
        a = random_mlp(rng, in_width, out_width, max_hidden=2)
        b = random_mlp(rng, in_width, max(1, out_width - 1) + 1, max_hidden=2)
        lo = rng.randint(0, b.out_shape.size - 1)
        sliced = Seq((b.root, Slice(lo, lo + 1)))
        merged = Parallel((a.root, sliced))
        return program(Seq((merged, Slice(0, out_width))), bits(in_width))
    if roll < 0.35 and in_width == out_width:
        body = random_mlp(rng, in_width, in_width, max_hidden=3)
        pred = random_mlp(rng, in_width, 1, max_hidden=2)
        terminal = BitVec(in_width, rng.randrange(1 << in_width))
        return program(Repeat(rng.randint(1, 4), body.root, pred.root,
                              terminal), bits(in_width))
    return random_mlp(rng, in_width, out_width)


def random_step_model(rng: random.Random, state_width: int, input_width: int,
                      output_width: int) -> TotalProgram:
    """Pseudo-random transition function as one thresholded affine layer."""
    in_w = state_width + input_width
    out_w = state_width + output_width
    rows = [[Fraction(rng.randint(-5, 5)) for _ in range(in_w)]
            for _ in range(out_w)]
    bias = [Fraction(rng.randint(-3, 3)) for _ in range(out_w)]
    root = Seq((Decode(in_w), affine(rows, bias), Act("step"), Encode(out_w)))
    return program(root, bits(in_w))


def random_agent(rng: random.Random, *, max_state_bits: int = 6,
                 theta: int = 32, max_finals: int = 4) -> AgentLoop:
    state_w = rng.randint(2, max_state_bits)
    input_w = rng.randint(1, 3)
    output_w = rng.randint(1, 3)
    step = random_step_model(rng, state_w, input_w, output_w)
    n_finals = rng.randint(1, max_finals)
    finals = frozenset(BitVec(state_w, rng.randrange(1 << state_w))
                       for _ in range(n_finals))
    return AgentLoop(step, theta, finals, state_w, input_w)


# ---------------------------------------------------------------------------
# The five stock non-trivial judges at a given input width


def judge_equal(width: int) -> Judge:
    return Judge("equal", "predicate", width, width, identity_bits(width),
                 (BitVec.zeros(width), BitVec(width, 1)),
                 body=halves_equal(width))


def judge_parity(width: int) -> Judge:
    pair = width + 1
    body = program(Seq((parity(pair).root, negate_bit().root)), bits(pair))
    return Judge("parity", "predicate", width, 1, parity(width),
                 (BitVec.zeros(width), BitVec(1, 1)), body=body)


def judge_output_not_all_ones(width: int, out_width: int = 4) -> Judge:
    coeffs = [0] * width + [-1] * out_width
    return Judge("not_all_ones", "linear", width, out_width,
                 const_output(width, BitVec.zeros(out_width)),
                 (BitVec.zeros(width), BitVec.ones(out_width)),
                 linear=atom(out_width - 1, coeffs))


def judge_first_bit_implies(width: int) -> Judge:
    coeffs = [0] * (width + 1)
    coeffs[0] = -1
    coeffs[width] = 1
    return Judge("implies", "linear", width, 1,
                 const_output(width, BitVec(1, 1)),
                 (BitVec(width, 1 << (width - 1)), BitVec(1, 0)),
                 linear=atom(0, coeffs))


def judge_some_output_bit(width: int, out_width: int = 2) -> Judge:
    coeffs = [0] * width + [1] * out_width
    return Judge("some_bit", "linear", width, out_width,
                 const_output(width, BitVec.ones(out_width)),
                 (BitVec.zeros(width), BitVec.zeros(out_width)),
                 linear=atom(-1, coeffs))


def stock_judges(width: int):
    return [judge_equal(width), judge_parity(width),
            judge_output_not_all_ones(width), judge_first_bit_implies(width),
            judge_some_output_bit(width)]
