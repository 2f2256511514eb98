"""Linear-region enumeration for piecewise-linear (relu) networks.

Regions are enumerated by exact layerwise subdivision: the domain box is
split by every neuron's pre-activation hyperplane conditioned on the
pattern prefix already chosen, keeping only cells whose interior is
non-empty. This visits exactly the feasible activation patterns, including
degenerate configurations with coincident hyperplanes.

Returned regions are closed polytopes; on shared boundaries the network
agrees with both adjacent affine maps, and points are assigned to the
active (>= 0) side by `activation_pattern`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .kernel import ONE, Rat, RatVec, ResourceExceeded, StructureError, ZERO
from .ir import Act, Affine, Decode, Seq, TotalProgram, program, vec, bits
from .linear import Box, Ineq, feasible

Matrix = Tuple[Tuple[Rat, ...], ...]
Vector = Tuple[Rat, ...]

DEFAULT_MAX_NEURONS = 20


@dataclass(frozen=True)
class PwlNetwork:
    """Relu layers followed by one final affine map, all exact rationals."""

    hidden: Tuple[Tuple[Matrix, Vector], ...]
    final: Tuple[Matrix, Vector]

    def __post_init__(self):
        width = self.input_dim
        for k, (w, b) in enumerate(self.hidden):
            if any(len(row) != width for row in w) or len(b) != len(w):
                raise StructureError(f"hidden layer {k} dimension mismatch")
            width = len(w)
        w, b = self.final
        if any(len(row) != width for row in w) or len(b) != len(w):
            raise StructureError("final layer dimension mismatch")

    @property
    def input_dim(self) -> int:
        first = self.hidden[0][0] if self.hidden else self.final[0]
        return len(first[0])

    @property
    def output_dim(self) -> int:
        return len(self.final[0])

    @property
    def hidden_count(self) -> int:
        return sum(len(w) for w, _ in self.hidden)


def network(hidden, final) -> PwlNetwork:
    def conv(layer):
        w, b = layer
        return (tuple(tuple(Rat(c) for c in row) for row in w),
                tuple(Rat(c) for c in b))

    return PwlNetwork(tuple(conv(layer) for layer in hidden), conv(final))


def forward(net: PwlNetwork, x: Sequence[Rat]) -> RatVec:
    """Exact network output at a rational point."""
    v = tuple(Rat(c) for c in x)
    for w, b in net.hidden:
        pre = tuple(sum((c * s for c, s in zip(row, v) if c), bc)
                    for row, bc in zip(w, b))
        v = tuple(p if p > 0 else ZERO for p in pre)
    w, b = net.final
    return tuple(sum((c * s for c, s in zip(row, v) if c), bc)
                 for row, bc in zip(w, b))


def activation_pattern(net: PwlNetwork, x: Sequence[Rat]) -> Tuple[int, ...]:
    """Active (pre-activation >= 0) bits of all hidden neurons, layer-major."""
    v = tuple(Rat(c) for c in x)
    patt: List[int] = []
    for w, b in net.hidden:
        pre = tuple(sum((c * s for c, s in zip(row, v) if c), bc)
                    for row, bc in zip(w, b))
        patt.extend(1 if p >= 0 else 0 for p in pre)
        v = tuple(p if p > 0 else ZERO for p in pre)
    return tuple(patt)


@dataclass(frozen=True)
class Region:
    """One feasible activation pattern with its polytope and affine map."""

    pattern: Tuple[int, ...]
    constraints: Tuple[Ineq, ...]   # closed; includes the domain box rows
    map_matrix: Matrix
    map_bias: Vector

    def contains(self, x: Sequence[Rat]) -> bool:
        return all(row.holds(x) for row in self.constraints)

    def apply(self, x: Sequence[Rat]) -> RatVec:
        return tuple(sum((c * v for c, v in zip(row, x) if c), b)
                     for row, b in zip(self.map_matrix, self.map_bias))


@dataclass
class _Cell:
    neuron_rows: List[Ineq]         # closed sign constraints collected so far
    pattern: List[int]
    a: Matrix                       # post-activation value = a*x + b
    b: Vector


def _compose_layer(w: Matrix, bias: Vector, a: Matrix, b: Vector):
    """Pre-activation affine expressions (coeffs, const) for one layer."""
    exprs = []
    for row, bc in zip(w, bias):
        coeffs = tuple(sum(row[j] * a[j][k] for j in range(len(row)))
                       for k in range(len(a[0])))
        const = sum((row[j] * b[j] for j in range(len(row))), bc)
        exprs.append((coeffs, const))
    return exprs


def enumerate_regions(net: PwlNetwork, domain: Box, *,
                      max_neurons: int = DEFAULT_MAX_NEURONS) -> List[Region]:
    """All feasible activation-pattern regions intersecting the domain.

    Regions come back sorted by pattern; their union covers the box and
    interiors are pairwise disjoint.
    """
    if net.hidden_count > max_neurons:
        raise ResourceExceeded("neurons", max_neurons)
    if net.input_dim != domain.dim:
        raise StructureError(
            f"domain dim {domain.dim} != network input {net.input_dim}")
    dim = net.input_dim
    box_rows = domain.to_ineqs()
    ident = tuple(tuple(ONE if i == j else ZERO for j in range(dim))
                  for i in range(dim))
    cells = [_Cell([], [], ident, tuple(ZERO for _ in range(dim)))]
    for w, bias in net.hidden:
        next_cells: List[_Cell] = []
        for cell in cells:
            exprs = _compose_layer(w, bias, cell.a, cell.b)
            partial = [cell]
            for coeffs, const in exprs:
                grown: List[_Cell] = []
                for part in partial:
                    strict_prefix = [Ineq(r.coeffs, r.const, True)
                                     for r in part.neuron_rows]
                    for side, row in ((1, Ineq(coeffs, const)),
                                      (0, Ineq(tuple(-c for c in coeffs),
                                               -const))):
                        test = box_rows + strict_prefix + [
                            Ineq(row.coeffs, row.const, True)]
                        if feasible(test, dim):
                            grown.append(_Cell(part.neuron_rows + [row],
                                               part.pattern + [side],
                                               part.a, part.b))
                partial = grown
            # apply the activation: inactive neurons contribute zero
            n_out = len(w)
            for part in partial:
                layer_bits = part.pattern[len(cell.pattern):]
                rows_a = []
                rows_b = []
                for k in range(n_out):
                    if layer_bits[k]:
                        rows_a.append(exprs[k][0])
                        rows_b.append(exprs[k][1])
                    else:
                        rows_a.append(tuple(ZERO for _ in range(dim)))
                        rows_b.append(ZERO)
                part.a = tuple(rows_a)
                part.b = tuple(rows_b)
            next_cells.extend(partial)
        cells = next_cells
    w, bias = net.final
    regions = []
    for cell in cells:
        exprs = _compose_layer(w, bias, cell.a, cell.b)
        regions.append(Region(
            tuple(cell.pattern),
            tuple(box_rows + cell.neuron_rows),
            tuple(e[0] for e in exprs),
            tuple(e[1] for e in exprs)))
    regions.sort(key=lambda r: r.pattern)
    return regions


# ---------------------------------------------------------------------------
# Conversions between networks and total programs


def network_to_program(net: PwlNetwork) -> TotalProgram:
    nodes = []
    for w, b in net.hidden:
        nodes.append(Affine(w, b))
        nodes.append(Act("relu"))
    nodes.append(Affine(*net.final))
    return program(Seq(tuple(nodes)), vec(net.input_dim))


def network_from_program(p: TotalProgram) -> PwlNetwork:
    """Extract the (affine, relu)* affine structure; StructureError otherwise."""
    if p.in_shape.kind != "vec":
        raise StructureError("network programs consume rational vectors")
    nodes = list(p.root.children) if isinstance(p.root, Seq) else [p.root]
    layers = []
    idx = 0
    while idx + 1 < len(nodes) and isinstance(nodes[idx], Affine) \
            and isinstance(nodes[idx + 1], Act) \
            and nodes[idx + 1].kind == "relu":
        layers.append((nodes[idx].matrix, nodes[idx].bias))
        idx += 2
    if idx != len(nodes) - 1 or not isinstance(nodes[idx], Affine):
        raise StructureError(
            "expected (affine relu)* affine structure for a network")
    return PwlNetwork(tuple(layers), (nodes[idx].matrix, nodes[idx].bias))


def quantizer_map(domain: Box, bits_per_dim: int) -> Tuple[Matrix, Vector]:
    """Affine map from 0/1 bit coordinates to grid points of the box.

    Each dimension gets `bits_per_dim` bits read most-significant first;
    the 2^k values are spread evenly from lo to hi inclusive.
    """
    k = bits_per_dim
    denom = (1 << k) - 1
    dim = domain.dim
    rows = []
    for d in range(dim):
        span = domain.his[d] - domain.los[d]
        row = [ZERO] * (dim * k)
        for j in range(k):
            row[d * k + j] = span * (1 << (k - 1 - j)) / denom
        rows.append(tuple(row))
    return tuple(rows), tuple(domain.los)


def quantized_model(net: PwlNetwork, domain: Box,
                    bits_per_dim: int) -> TotalProgram:
    """bits(dim * k) -> vec(output): decode bits, snap to the grid, run net."""
    mat, bias = quantizer_map(domain, bits_per_dim)
    width = domain.dim * bits_per_dim
    nodes = [Decode(width), Affine(mat, bias)]
    for w, b in net.hidden:
        nodes.append(Affine(w, b))
        nodes.append(Act("relu"))
    nodes.append(Affine(*net.final))
    return program(Seq(tuple(nodes)), bits(width))
