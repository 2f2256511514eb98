"""Foundational value types: fixed-width bit vectors, exact rationals, verdicts.

Everything that can influence a verification verdict is computed in exact
rational arithmetic; no float ever reaches a verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Tuple, Union

# Exact rational scalar used throughout verification paths: gcd-reduced
# numerator over positive denominator, exact arithmetic, no rounding ever.
# gmpy2.mpq is an order of magnitude faster than fractions.Fraction with the
# same semantics; both backends produce identical verdicts and report bytes.
try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - gmpy2 is normally available
    Rat = Fraction

ZERO = Rat(0)
ONE = Rat(1)
HALF = Rat(1, 2)

# Widest input space the exhaustive procedures will enumerate by default.
DEFAULT_MAX_ENUM_BITS = 24


class DecigardError(Exception):
    """Base class for all toolkit errors."""


class WidthError(DecigardError):
    """Bit-vector width does not match the declared interface width."""


class StructureError(DecigardError):
    """Malformed program tree (dimension mismatch, bad node arguments)."""


class IntervalError(DecigardError):
    """Empty interval where a non-empty one is required (lo > hi)."""


class JudgeKindError(DecigardError):
    """Operation requires a judge of a different kind."""


class TrivialJudgeError(DecigardError):
    """The judge failed its non-triviality check."""


class ParseError(DecigardError):
    """Text format (IR / judge / agent / report) failed to parse."""


class DecodeError(DecigardError):
    """Byte stream is not a valid micro-machine program."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class VerifierDivergence(DecigardError):
    """A candidate verifier failed to answer within the demo fuel."""


class ResourceExceeded(DecigardError):
    """A configured budget refuses the requested problem size."""

    def __init__(self, budget: str, limit: int):
        super().__init__(f"budget {budget} exceeded (limit {limit})")
        self.budget = budget
        self.limit = limit


def parse_rat(text: str) -> Rat:
    """Parse an exact rational written as `p` or `p/q`."""
    try:
        return Rat(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}: {exc}") from None


def format_rat(value: Rat) -> str:
    """Canonical text for a rational: `p` when integral, else `p/q`."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class BitVec:
    """Immutable fixed-width bit string, most-significant bit first.

    Ordering is lexicographic on the bit string, which for equal widths
    coincides with numeric order of the unsigned value.
    """

    __slots__ = ("width", "value")

    def __init__(self, width: int, value: int):
        if width < 1:
            raise WidthError(f"width must be >= 1, got {width}")
        if not 0 <= value < (1 << width):
            raise WidthError(f"value {value} out of range for width {width}")
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("BitVec is immutable")

    @classmethod
    def from_bits(cls, bits) -> "BitVec":
        bits = list(bits)
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise WidthError(f"bit must be 0 or 1, got {b!r}")
            value = (value << 1) | b
        return cls(len(bits), value)

    @classmethod
    def from_string(cls, text: str) -> "BitVec":
        text = text.strip()
        if not text or any(c not in "01" for c in text):
            raise ParseError(f"bad bit string {text!r}")
        return cls(len(text), int(text, 2))

    @classmethod
    def zeros(cls, width: int) -> "BitVec":
        return cls(width, 0)

    @classmethod
    def ones(cls, width: int) -> "BitVec":
        return cls(width, (1 << width) - 1)

    @classmethod
    def enumerate(cls, width: int) -> Iterator["BitVec"]:
        """All vectors of the given width in lexicographic order."""
        for value in range(1 << width):
            yield cls(width, value)

    def bit(self, index: int) -> int:
        """Bit at position `index`; position 0 is the most significant."""
        if not 0 <= index < self.width:
            raise IndexError(index)
        return (self.value >> (self.width - 1 - index)) & 1

    def bits(self) -> Tuple[int, ...]:
        return tuple(self.bit(k) for k in range(self.width))

    def concat(self, other: "BitVec") -> "BitVec":
        return BitVec(self.width + other.width,
                      (self.value << other.width) | other.value)

    def slice(self, lo: int, hi: int) -> "BitVec":
        """Bits in positions [lo, hi), numbered from the most significant."""
        if not 0 <= lo < hi <= self.width:
            raise WidthError(f"bad slice [{lo},{hi}) of width {self.width}")
        span = hi - lo
        return BitVec(span, (self.value >> (self.width - hi)) & ((1 << span) - 1))

    def __str__(self) -> str:
        return format(self.value, f"0{self.width}b")

    def __repr__(self) -> str:
        return f"BitVec({self})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, BitVec)
                and self.width == other.width and self.value == other.value)

    def __hash__(self) -> int:
        return hash((self.width, self.value))

    def __lt__(self, other: "BitVec") -> bool:
        if not isinstance(other, BitVec):
            return NotImplemented
        if self.width == other.width:
            return self.value < other.value
        return str(self) < str(other)

    def __le__(self, other: "BitVec") -> bool:
        return self == other or self < other

    def __gt__(self, other: "BitVec") -> bool:
        return not self <= other

    def __ge__(self, other: "BitVec") -> bool:
        return not self < other


RatVec = Tuple[Rat, ...]
# Counterexample output: bit vector for bit-valued models, rational vector
# for models verified over a continuous output.
Output = Union[BitVec, RatVec]


@dataclass(frozen=True)
class Verdict:
    """Result of an alignment verification run.

    outcome is one of aligned, misaligned, trivial_judge, resource_exceeded.
    Exhaustive misalignment carries the lexicographically smallest violating
    input with the model's actual output; region misalignment carries an
    exact rational witness point and the output there.
    """

    outcome: str
    counterexample: Optional[Tuple[BitVec, Output]] = None
    witness_point: Optional[RatVec] = None
    witness_output: Optional[RatVec] = None
    reason: Optional[str] = None
    budget: Optional[str] = None
    limit: Optional[int] = None

    ALIGNED = "aligned"
    MISALIGNED = "misaligned"
    TRIVIAL_JUDGE = "trivial_judge"
    RESOURCE_EXCEEDED = "resource_exceeded"

    @classmethod
    def aligned(cls) -> "Verdict":
        return cls(cls.ALIGNED)

    @classmethod
    def misaligned(cls, ce_input: BitVec, ce_output: Output) -> "Verdict":
        return cls(cls.MISALIGNED, counterexample=(ce_input, ce_output))

    @classmethod
    def misaligned_at_point(cls, point: RatVec, output: RatVec) -> "Verdict":
        return cls(cls.MISALIGNED, witness_point=point, witness_output=output)

    @classmethod
    def trivial_judge(cls, reason: str) -> "Verdict":
        return cls(cls.TRIVIAL_JUDGE, reason=reason)

    @classmethod
    def resource_exceeded(cls, budget: str, limit: int) -> "Verdict":
        return cls(cls.RESOURCE_EXCEEDED, budget=budget, limit=limit)

    @property
    def is_aligned(self) -> bool:
        return self.outcome == self.ALIGNED

    @property
    def is_misaligned(self) -> bool:
        return self.outcome == self.MISALIGNED


@dataclass(frozen=True)
class JudgeCheck:
    """Outcome of the judge non-triviality check."""

    status: str  # ok | trivial_judge | resource_exceeded
    reason: Optional[str] = None

    OK = "ok"

    def __bool__(self) -> bool:
        return self.status == self.OK

    @classmethod
    def ok(cls) -> "JudgeCheck":
        return cls(cls.OK)

    @classmethod
    def trivial(cls, reason: str) -> "JudgeCheck":
        return cls(Verdict.TRIVIAL_JUDGE, reason=reason)

    @classmethod
    def too_large(cls, reason: str) -> "JudgeCheck":
        return cls(Verdict.RESOURCE_EXCEEDED, reason=reason)
