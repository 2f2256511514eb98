"""Versioned structured-text reports.

A report is an ordered list of key/value lines, one `key: value` per line,
always starting with the schema and kind. Values are plain strings fixed
at build time, so rendering is deterministic and rendered reports parse
back to equal values; they double as golden files.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Tuple

from .kernel import ParseError

SCHEMA = "dg.report.v1"


class Report:
    def __init__(self, kind: str):
        self._items: List[Tuple[str, str]] = [("schema", SCHEMA),
                                              ("kind", kind)]

    def add(self, key: str, value) -> "Report":
        if ":" in key or "\n" in key:
            raise ValueError(f"bad report key {key!r}")
        self._items.append((key, str(value)))
        return self

    def add_list(self, key: str, values: Iterable) -> "Report":
        return self.add(key, "[" + ", ".join(str(v) for v in values) + "]")

    def get(self, key: str) -> Optional[str]:
        for k, v in self._items:
            if k == key:
                return v
        return None

    @property
    def kind(self) -> str:
        return self._items[1][1]

    def items(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(self._items)

    def render(self) -> str:
        return "\n".join(f"{k}: {v}" for k, v in self._items) + "\n"

    def __eq__(self, other) -> bool:
        return isinstance(other, Report) and self._items == other._items

    def __repr__(self) -> str:
        return f"Report({self.kind!r}, {len(self._items)} fields)"


def parse_report(text: str) -> Report:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise ParseError("report too short")
    pairs = []
    for line in lines:
        key, sep, value = line.partition(": ")
        if not sep:
            key, sep, value = line.partition(":")
            if not sep:
                raise ParseError(f"bad report line {line!r}")
        pairs.append((key, value))
    if pairs[0] != ("schema", SCHEMA):
        raise ParseError(f"unsupported report schema: {pairs[0]}")
    if pairs[1][0] != "kind":
        raise ParseError("report missing kind line")
    report = Report(pairs[1][1])
    for key, value in pairs[2:]:
        report.add(key, value)
    return report


def parse_reports(text: str) -> List[Report]:
    """Parse a stream of blank-line separated reports."""
    blocks = [b for b in text.split("\n\n") if b.strip()]
    return [parse_report(b) for b in blocks]
