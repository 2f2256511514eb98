"""Exact linear inequality systems over rationals.

Feasibility is decided by Fourier-Motzkin elimination with mixed strict and
non-strict rows; a satisfying rational point is recovered by midpoint
back-substitution through the elimination stack. No floating point and no
external solver: verdicts must be reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .kernel import (IntervalError, ONE, Rat, RatVec, ResourceExceeded,
                     ZERO, format_rat)

# Safety valve: elimination can square the row count per variable.
MAX_ROWS = 200_000


@dataclass(frozen=True)
class Ineq:
    """const + coeffs . x >= 0, or > 0 when strict."""

    coeffs: Tuple[Rat, ...]
    const: Rat
    strict: bool = False

    def value(self, x: Sequence[Rat]) -> Rat:
        total = self.const
        for c, v in zip(self.coeffs, x):
            if c:
                total += c * v
        return total

    def holds(self, x: Sequence[Rat]) -> bool:
        v = self.value(x)
        return v > 0 if self.strict else v >= 0

    def negated(self) -> "Ineq":
        # not(e >= 0) is -e > 0; not(e > 0) is -e >= 0
        return Ineq(tuple(-c for c in self.coeffs), -self.const,
                    not self.strict)

    def __str__(self) -> str:
        parts = [format_rat(self.const)]
        for k, c in enumerate(self.coeffs, start=1):
            if c:
                parts.append(f"{format_rat(c)}*x{k}")
        op = "> 0" if self.strict else ">= 0"
        return " + ".join(parts) + f" {op}"


def ineq(coeffs, const, strict: bool = False) -> Ineq:
    return Ineq(tuple(Rat(c) for c in coeffs), Rat(const), strict)


@dataclass(frozen=True)
class Box:
    """Axis-aligned closed box, one [lo, hi] interval per dimension."""

    los: Tuple[Rat, ...]
    his: Tuple[Rat, ...]

    def __post_init__(self):
        if len(self.los) != len(self.his):
            raise IntervalError("box bounds have different arities")
        for lo, hi in zip(self.los, self.his):
            if lo > hi:
                raise IntervalError(f"empty interval [{lo}, {hi}]")

    @property
    def dim(self) -> int:
        return len(self.los)

    def to_ineqs(self) -> List[Ineq]:
        rows = []
        n = self.dim
        for d, (lo, hi) in enumerate(zip(self.los, self.his)):
            row = [ZERO] * n
            row[d] = ONE
            rows.append(Ineq(tuple(row), -lo))        # x_d - lo >= 0
            row = [ZERO] * n
            row[d] = Rat(-1)
            rows.append(Ineq(tuple(row), hi))         # hi - x_d >= 0
        return rows

    def center(self) -> RatVec:
        return tuple((lo + hi) / 2 for lo, hi in zip(self.los, self.his))

    def contains(self, x: Sequence[Rat]) -> bool:
        return all(lo <= v <= hi for lo, v, hi in zip(self.los, x, self.his))


def box(los, his) -> Box:
    return Box(tuple(Rat(v) for v in los), tuple(Rat(v) for v in his))


def _normalize(row: Ineq) -> Optional[Ineq]:
    """Scale by the leading coefficient magnitude; None for tautologies."""
    lead = next((c for c in row.coeffs if c), None)
    if lead is None:
        return row  # pure constant row, kept for the feasibility test
    scale = abs(lead)
    if scale == 1:
        return row
    return Ineq(tuple(c / scale for c in row.coeffs), row.const / scale,
                row.strict)


def _constant_ok(row: Ineq) -> bool:
    return row.const > 0 if row.strict else row.const >= 0


def _dedup(rows: Iterable[Ineq]) -> List[Ineq]:
    seen = {}
    out = []
    for row in rows:
        key = (row.coeffs, row.const)
        prev = seen.get(key)
        if prev is None:
            seen[key] = len(out)
            out.append(row)
        elif row.strict and not out[prev].strict:
            out[prev] = row  # strict subsumes non-strict
    return out


class FmTrace:
    """Elimination stack: systems[k] mentions only variables x1..xk."""

    def __init__(self, systems: List[List[Ineq]], arity: int):
        self.systems = systems
        self.arity = arity

    def feasible(self) -> bool:
        return all(_constant_ok(row) for row in self.systems[0])


def fm_eliminate(rows: Sequence[Ineq], arity: int) -> Optional[FmTrace]:
    """Eliminate variables x_arity .. x_1; None signals early infeasibility."""
    current = _dedup(_normalize(r) for r in rows)
    for row in current:
        if all(c == 0 for c in row.coeffs) and not _constant_ok(row):
            return None
    systems = [None] * (arity + 1)
    systems[arity] = current
    for k in range(arity, 0, -1):
        idx = k - 1
        keep, lowers, uppers = [], [], []
        for row in current:
            a = row.coeffs[idx]
            if a == 0:
                keep.append(row)
            elif a > 0:
                lowers.append(row)
            else:
                uppers.append(row)
        combined = []
        for low in lowers:
            a_l = low.coeffs[idx]
            for up in uppers:
                a_u = up.coeffs[idx]
                # (-a_u) * low + a_l * up removes x_k; both multipliers > 0
                m_l, m_u = -a_u, a_l
                coeffs = tuple(m_l * cl + m_u * cu
                               for cl, cu in zip(low.coeffs, up.coeffs))
                row = Ineq(coeffs, m_l * low.const + m_u * up.const,
                           low.strict or up.strict)
                if all(c == 0 for c in row.coeffs) and not _constant_ok(row):
                    return None
                combined.append(row)
        current = _dedup(_normalize(r) for r in keep + combined)
        if len(current) > MAX_ROWS:
            raise ResourceExceeded("fm_rows", MAX_ROWS)
        systems[idx] = current
    return FmTrace(systems, arity)


def _pick_inside(lo, lo_strict, hi, hi_strict) -> Optional[Rat]:
    if lo is None and hi is None:
        return ZERO
    if lo is None:
        return hi - 1 if hi_strict else hi
    if hi is None:
        return lo + 1 if lo_strict else lo
    if lo > hi or (lo == hi and (lo_strict or hi_strict)):
        return None
    if lo == hi:
        return lo
    return (lo + hi) / 2


def back_substitute(trace: FmTrace) -> Optional[RatVec]:
    """Recover a satisfying point from a feasible elimination stack."""
    if not trace.feasible():
        return None
    x: List[Rat] = []
    for k in range(1, trace.arity + 1):
        idx = k - 1
        lo = hi = None
        lo_strict = hi_strict = False
        for row in trace.systems[k]:
            a = row.coeffs[idx]
            if a == 0:
                continue
            residual = row.const
            for j in range(idx):
                c = row.coeffs[j]
                if c:
                    residual += c * x[j]
            bound = -residual / a
            if a > 0:
                if lo is None or bound > lo or (bound == lo and row.strict):
                    lo, lo_strict = bound, row.strict
            else:
                if hi is None or bound < hi or (bound == hi and row.strict):
                    hi, hi_strict = bound, row.strict
        value = _pick_inside(lo, lo_strict, hi, hi_strict)
        if value is None:
            return None  # defensive; cannot happen on a sound stack
        x.append(value)
    return tuple(x)


def feasible(rows: Sequence[Ineq], arity: int) -> bool:
    trace = fm_eliminate(rows, arity)
    return trace is not None and trace.feasible()


def find_point(rows: Sequence[Ineq], arity: int) -> Optional[RatVec]:
    """A rational point satisfying every row, or None when infeasible."""
    trace = fm_eliminate(rows, arity)
    if trace is None or not trace.feasible():
        return None
    point = back_substitute(trace)
    if point is None:
        return None
    for row in rows:
        if not row.holds(point):  # pragma: no cover - internal consistency
            raise AssertionError(f"witness {point} violates {row}")
    return point
