"""Symbols, patterns, the knowledge store, and the frequency-derived cost model.

A pattern is an ordered sequence of atomic symbols with an occurrence
frequency.  Patterns are either *new* (incoming material to be encoded) or
*old* (stored knowledge).  Every scoring operation in the engine is grounded
in the cost model built here: each symbol name is priced in bits from its
frequency-weighted count over the old store.

Pattern file format (UTF-8 text)
--------------------------------
* ``#`` begins a comment, running to end of line; blank lines are ignored.
* Each remaining line is one pattern: whitespace-separated tokens.
* A token prefixed ``%`` is an ID-symbol occurrence; the prefix is stripped
  from the name.  Unprefixed tokens are content symbols.
* A final token ``@N`` (decimal, N >= 1) sets the pattern frequency; at most
  one per line; default 1.
* A bare ``%`` or bare ``@`` token, an ``@N`` with N < 1, a second frequency
  annotation, or an ``@``-initial token anywhere but last is a parse error.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum


class Role(Enum):
    """Per-occurrence role of a symbol: content or identification."""

    CONTENT = "content"
    ID = "id"


class Provenance(Enum):
    NEW = "new"
    OLD = "old"


class StoreError(ValueError):
    """Raised for semantically invalid stores (e.g. no old knowledge)."""


class ParseError(ValueError):
    """Raised for malformed pattern files; carries source name and line."""

    def __init__(self, source: str, line_no: int, message: str):
        self.source = source
        self.line_no = line_no
        self.message = message
        super().__init__(f"{source}:{line_no}: {message}")


@dataclass(frozen=True)
class Symbol:
    """An atomic symbol occurrence.

    Two symbols match iff their names are equal; the role never affects
    matching.  Role is a property of the occurrence, not the name: the same
    name may be an ID-symbol in one pattern and content in another.
    """

    name: str
    role: Role = Role.CONTENT

    def __post_init__(self):
        if not self.name or any(ch.isspace() for ch in self.name):
            raise ValueError(f"invalid symbol name: {self.name!r}")


@dataclass(frozen=True)
class Pattern:
    """An ordered, non-empty sequence of symbols with a frequency."""

    id: str
    symbols: tuple[Symbol, ...]
    frequency: int = 1
    provenance: Provenance = Provenance.OLD

    def __post_init__(self):
        if not self.symbols:
            raise ValueError(f"pattern {self.id!r} has no symbols")
        if self.frequency < 1:
            raise ValueError(f"pattern {self.id!r} has frequency < 1")

    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class KnowledgeStore:
    """Stored (old) and incoming (new) patterns, in load order."""

    old_patterns: tuple[Pattern, ...]
    new_patterns: tuple[Pattern, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for p in self.old_patterns + self.new_patterns:
            if p.id in seen:
                raise StoreError(f"duplicate pattern id {p.id!r}")
            seen.add(p.id)
        for p in self.old_patterns:
            if p.provenance is not Provenance.OLD:
                raise StoreError(f"pattern {p.id!r} misfiled as old")
        for p in self.new_patterns:
            if p.provenance is not Provenance.NEW:
                raise StoreError(f"pattern {p.id!r} misfiled as new")


_FREQ_RE = re.compile(r"^@(\d+)$")


def _parse_line(tokens: list[str], source: str, line_no: int):
    frequency = 1
    if _FREQ_RE.match(tokens[-1]):
        n = int(tokens[-1][1:])
        if n < 1:
            raise ParseError(source, line_no, f"frequency must be >= 1, got @{n}")
        frequency = n
        tokens = tokens[:-1]
    symbols = []
    for tok in tokens:
        if tok == "%":
            raise ParseError(source, line_no, "bare '%' token")
        if tok == "@":
            raise ParseError(source, line_no, "bare '@' token")
        if tok.startswith("@"):
            raise ParseError(
                source, line_no, f"misplaced or duplicate frequency annotation {tok!r}"
            )
        if tok.startswith("%"):
            symbols.append(Symbol(tok[1:], Role.ID))
        else:
            symbols.append(Symbol(tok, Role.CONTENT))
    if not symbols:
        raise ParseError(source, line_no, "empty pattern")
    return symbols, frequency


def parse_patterns(
    text: str,
    provenance: Provenance,
    id_prefix: str = "p",
    source: str = "<string>",
) -> tuple[Pattern, ...]:
    """Parse pattern-file text into patterns, preserving line order."""

    patterns = []
    counter = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        symbols, frequency = _parse_line(line.split(), source, line_no)
        counter += 1
        patterns.append(
            Pattern(
                id=f"{id_prefix}{counter}",
                symbols=tuple(symbols),
                frequency=frequency,
                provenance=provenance,
            )
        )
    return tuple(patterns)


def load_store(
    old_source: str,
    new_source: str,
    old_name: str = "old",
    new_name: str = "new",
) -> KnowledgeStore:
    """Build a store from two pattern-file texts (stored and incoming)."""

    old = parse_patterns(old_source, Provenance.OLD, "old-", old_name)
    new = parse_patterns(new_source, Provenance.NEW, "new-", new_name)
    return KnowledgeStore(old_patterns=old, new_patterns=new)


def serialize_pattern(pattern: Pattern) -> str:
    toks = [("%" + s.name) if s.role is Role.ID else s.name for s in pattern.symbols]
    if pattern.frequency != 1:
        toks.append(f"@{pattern.frequency}")
    return " ".join(toks)


def serialize_patterns(patterns) -> str:
    """Render patterns in the pattern file format, one per line."""

    return "".join(serialize_pattern(p) + "\n" for p in patterns)


@dataclass(frozen=True)
class CostModel:
    """Per-symbol bit costs from frequency-weighted counts over old patterns.

    cost(s) = -log2(count(s) / total) for seen names; unseen names get the
    add-one smoothed cost -log2(1 / (total + 1)).
    """

    counts: dict[str, int]
    total: int
    costs: dict[str, float]

    def cost(self, name: str) -> float:
        c = self.costs.get(name)
        if c is None:
            return -math.log2(1.0 / (self.total + 1))
        return c

    @staticmethod
    def empty() -> "CostModel":
        return CostModel(counts={}, total=0, costs={})


def build_cost_model(store: KnowledgeStore) -> CostModel:
    """Count frequency-weighted symbol occurrences over the old store."""

    if not store.old_patterns:
        raise StoreError("no Old knowledge")
    counts: dict[str, int] = {}
    for p in store.old_patterns:
        for s in p.symbols:
            counts[s.name] = counts.get(s.name, 0) + p.frequency
    total = sum(counts.values())
    costs = {name: -math.log2(c / total) for name, c in counts.items()}
    return CostModel(counts=counts, total=total, costs=costs)


def raw_cost(pattern: Pattern, model: CostModel) -> float:
    """Summed per-symbol cost of a pattern, in bits."""

    return sum(model.cost(s.name) for s in pattern.symbols)
