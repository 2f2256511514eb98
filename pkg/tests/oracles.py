"""Independent oracle implementations for cross-checking.

Everything here is deliberately written from scratch against the same
definitions the package implements: plain loops, naive eliminations, a
second micro interpreter. None of it imports the implementation paths it
is used to check.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction


def truth_table_verdict(model_fn, judge_fn, width):
    """Plain lexicographic scan; returns ('aligned', None) or
    ('misaligned', (value, output))."""
    for value in range(1 << width):
        output = model_fn(value)
        if judge_fn(value, output) != 1:
            return "misaligned", (value, output)
    return "aligned", None


# ---------------------------------------------------------------------------
# Naive Fourier-Motzkin, used only as a feasibility oracle.
# Rows are (coeffs tuple, const, strict).


def _norm_row(coeffs, const, strict):
    lead = next((c for c in coeffs if c != 0), None)
    if lead is None or abs(lead) == 1:
        return coeffs, const, strict
    scale = abs(lead)
    return tuple(c / scale for c in coeffs), const / scale, strict


def _constant_bad(coeffs, const, strict):
    if any(c != 0 for c in coeffs):
        return False
    return const <= 0 if strict else const < 0


def naive_feasible(rows, arity):
    current = {}
    for coeffs, const, strict in rows:
        row = _norm_row(tuple(Q(c) for c in coeffs), Q(const), strict)
        if _constant_bad(*row):
            return False
        key = row[:2]
        current[key] = current.get(key, False) or row[2]
    for var in range(arity - 1, -1, -1):
        nxt = {}

        def push(coeffs, const, strict):
            row = _norm_row(coeffs, const, strict)
            key = row[:2]
            nxt[key] = nxt.get(key, False) or row[2]
            return not _constant_bad(*row)

        lowers, uppers = [], []
        for (coeffs, const), strict in current.items():
            a = coeffs[var]
            if a == 0:
                if not push(coeffs, const, strict):
                    return False
            elif a > 0:
                lowers.append((coeffs, const, strict))
            else:
                uppers.append((coeffs, const, strict))
        for (lco, lconst, ls) in lowers:
            for (uco, uconst, us) in uppers:
                ml, mu = -uco[var], lco[var]
                coeffs = tuple(ml * a + mu * b for a, b in zip(lco, uco))
                if not push(coeffs, ml * lconst + mu * uconst, ls or us):
                    return False
        current = nxt
    return True


def layer_exprs(weights, bias, a_matrix, b_vector):
    """Pre-activation affine expressions for one layer, given the
    composed post-activation map so far."""
    exprs = []
    for row, bc in zip(weights, bias):
        coeffs = tuple(
            sum(Q(row[j]) * a_matrix[j][k] for j in range(len(row)))
            for k in range(len(a_matrix[0])))
        const = sum((Q(row[j]) * b_vector[j] for j in range(len(row))),
                    Q(bc))
        exprs.append((coeffs, const))
    return exprs


def feasible_patterns_bruteforce(hidden_layers, box_los, box_his):
    """All activation patterns with a non-empty interior inside the box,
    by checking every one of the 2^n candidate sign assignments."""
    dim = len(box_los)
    box_rows = []
    for d in range(dim):
        row = [Q(0)] * dim
        row[d] = Q(1)
        box_rows.append((tuple(row), -Q(box_los[d]), False))
        row = [Q(0)] * dim
        row[d] = Q(-1)
        box_rows.append((tuple(row), Q(box_his[d]), False))
    sizes = [len(w) for w, _ in hidden_layers]
    total = sum(sizes)
    found = []
    for assignment in product((1, 0), repeat=total):
        rows = list(box_rows)
        a_matrix = tuple(tuple(Q(1) if i == j else Q(0)
                               for j in range(dim)) for i in range(dim))
        b_vector = tuple(Q(0) for _ in range(dim))
        offset = 0
        for w, b in hidden_layers:
            exprs = layer_exprs(w, b, a_matrix, b_vector)
            bits = assignment[offset:offset + len(w)]
            offset += len(w)
            new_a, new_b = [], []
            for (coeffs, const), bit in zip(exprs, bits):
                if bit:
                    rows.append((coeffs, const, True))
                    new_a.append(coeffs)
                    new_b.append(const)
                else:
                    rows.append((tuple(-c for c in coeffs), -const, True))
                    new_a.append(tuple(Q(0) for _ in range(dim)))
                    new_b.append(Q(0))
            a_matrix, b_vector = tuple(new_a), tuple(new_b)
        if naive_feasible(rows, dim):
            found.append(assignment)
    return sorted(found)


def net_forward_plain(hidden_layers, final, x):
    """Exact forward pass written as plain loops."""
    values = [Fraction(v) for v in x]
    for w, b in hidden_layers:
        pre = []
        for row, bc in zip(w, b):
            acc = Fraction(bc)
            for c, v in zip(row, values):
                acc += Fraction(c) * v
            pre.append(acc)
        values = [v if v > 0 else Fraction(0) for v in pre]
    out = []
    w, b = final
    for row, bc in zip(w, b):
        acc = Fraction(bc)
        for c, v in zip(row, values):
            acc += Fraction(c) * v
        out.append(acc)
    return tuple(out)


# ---------------------------------------------------------------------------
# Agent oracles


def simulate_agent_plain(step_fn, initial, theta, finals):
    """Reference agent loop: list of (state, output), halt reason."""
    state = initial
    steps = []
    if state in finals:
        return [], "terminal_state"
    for _ in range(theta):
        state, output = step_fn(state)
        steps.append((state, output))
        if state in finals:
            return steps, "terminal_state"
    return steps, "theta_exhausted"


def halting_oracle(step_fn, initial, finals, budget):
    """Plain simulation with a visited map: ('halts', steps) or
    ('diverges', first_occurrence, cycle_length) or ('resource', None)."""
    seen = {initial: 0}
    state = initial
    for t in range(budget):
        if state in finals:
            return "halts", t, None
        state = step_fn(state)
        if state in seen:
            return "diverges", seen[state], t + 1 - seen[state]
        seen[state] = t + 1
    if state in finals:
        return "halts", budget, None
    return "resource", None, None


def closure_oracle(step_fn, finals, input_values):
    """Full transition-table scan over (final state, input) pairs."""
    for state in sorted(finals):
        for value in input_values:
            successor = step_fn(state, value)
            if successor not in finals:
                return "violation", (state, value, successor)
    return "ok", None


# ---------------------------------------------------------------------------
# A second micro-machine interpreter: direct byte walking, no pre-decode.
# Shares nothing with the package implementation except the ISA document.

_REG_OPS = {0x02, 0x03, 0x04}


def _sleb(data, pos):
    result = 0
    shift = 0
    while True:
        byte = data[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            if byte & 0x40:
                result -= 1 << shift
            return result, pos


def micro_reference(code, input_bytes, fuel):
    """Returns (halted, output_bytes, steps). Nested CALLV follows the same
    truncation rule as the specification text."""
    regs = [0] * 8
    bufs = [bytearray() for _ in range(8)]
    out = bytearray()
    pos = 0
    in_pos = 0
    steps = 0
    while True:
        if pos >= len(code):
            return True, bytes(out), steps
        if steps >= fuel:
            return False, b"", steps
        op = code[pos]
        if op == 0x01:  # LOADI
            reg = code[pos + 1]
            value, nxt = _sleb(code, pos + 2)
            regs[reg] = value
            pos = nxt
        elif op in _REG_OPS:
            rd, rs = code[pos + 1], code[pos + 2]
            if op == 0x02:
                regs[rd] = regs[rs]
            elif op == 0x03:
                regs[rd] += regs[rs]
            else:
                regs[rd] -= regs[rs]
            pos += 3
        elif op == 0x05:  # JMP
            pos = int.from_bytes(code[pos + 1:pos + 5], "little")
        elif op == 0x06:  # JZ
            reg = code[pos + 1]
            target = int.from_bytes(code[pos + 2:pos + 6], "little")
            pos = target if regs[reg] == 0 else pos + 6
        elif op == 0x07:  # READ
            reg = code[pos + 1]
            if in_pos < len(input_bytes):
                regs[reg] = input_bytes[in_pos]
                in_pos += 1
            else:
                regs[reg] = -1
            pos += 2
        elif op == 0x08:  # WRITE
            out.append(regs[code[pos + 1]] % 256)
            pos += 2
        elif op == 0x09:  # BPUT
            rb, rv = code[pos + 1], code[pos + 2]
            if regs[rv] < 0:
                del bufs[regs[rb] % 8][:]
            else:
                bufs[regs[rb] % 8].append(regs[rv] % 256)
            pos += 3
        elif op == 0x0A:  # BGET
            rd, rb, ri = code[pos + 1], code[pos + 2], code[pos + 3]
            buf = bufs[regs[rb] % 8]
            idx = regs[ri]
            regs[rd] = buf[idx] if 0 <= idx < len(buf) else -1
            pos += 4
        elif op == 0x0B:  # SELF
            bufs[regs[code[pos + 1]] % 8] = bytearray(code)
            pos += 2
        elif op == 0x0C:  # CALLV
            ra, rb, rf, ro = (code[pos + 1], code[pos + 2], code[pos + 3],
                              code[pos + 4])
            callee = bytes(bufs[regs[ra] % 8])
            callee_in = bytes(bufs[regs[rb] % 8])
            requested = regs[rf]
            try:
                _scan_decodes(callee)
                ok = True
            except Exception:
                ok = False
            if requested <= 0 or not ok:
                regs[0] = 0
                regs[1] = 0
                bufs[regs[ro] % 8] = bytearray()
            else:
                remaining = fuel - steps
                effective = min(requested, remaining - 1)
                if effective < 1:
                    return False, b"", fuel
                halted, c_out, consumed = micro_reference(
                    callee, callee_in, effective)
                if not halted and consumed < requested:
                    return False, b"", fuel
                steps += consumed
                regs[0] = 1 if halted else 0
                regs[1] = consumed
                bufs[regs[ro] % 8] = bytearray(c_out if halted else b"")
            pos += 5
        elif op == 0x0D:  # HALT
            return True, bytes(out), steps + 1
        else:
            raise ValueError(f"cannot decode opcode {op:#x}")
        steps += 1


def _scan_decodes(code):
    sizes = {0x02: 3, 0x03: 3, 0x04: 3, 0x05: 5, 0x07: 2, 0x08: 2,
             0x09: 3, 0x0A: 4, 0x0B: 2, 0x0C: 5, 0x0D: 1, 0x06: 6}
    pos = 0
    while pos < len(code):
        op = code[pos]
        if op == 0x01:
            _, pos = _sleb(code, pos + 2)
        elif op in sizes:
            pos += sizes[op]
        else:
            raise ValueError("bad opcode")
        if pos > len(code):
            raise ValueError("truncated")
