"""Building and scoring multiple alignments.

An alignment arranges row 0 (the incoming material) with instances of stored
patterns (rows 1..k) in ordered columns so that the incoming material is
encoded economically.  Alignments grow in stages: each stage matches the
projection of a live alignment against every stored pattern, merges the best
paths in as new rows, scores the results by compression difference, and keeps
a beam of the best.  Alignments are immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

from .matching import MatchParams, MatchPath, find_matches
from .patterns import CostModel, KnowledgeStore, Pattern, Role, StoreError, Symbol


class AlignmentError(ValueError):
    """Contract violation while manipulating alignments."""


@dataclass(frozen=True)
class CompressionScore:
    """bn = raw cost of the matched new symbols; be = cost of the encoding;
    cd = bn - be, the alignment's score."""

    bn: float
    be: float
    cd: float

    @staticmethod
    def of(bn: float, be: float) -> "CompressionScore":
        return CompressionScore(bn=bn, be=be, cd=bn - be)


@dataclass(frozen=True)
class BuildParams:
    beam_width: int = 100
    max_rows: int = 20
    top_k: int = 4
    match: MatchParams = MatchParams()

    def __post_init__(self):
        if self.beam_width < 1 or self.max_rows < 1 or self.top_k < 1:
            raise ValueError("beam_width, max_rows and top_k must all be >= 1")


@dataclass(frozen=True)
class AlignmentRow:
    """One stored-pattern instance: the column index of each of its symbols."""

    pattern: Pattern
    columns: tuple[int, ...]


@dataclass(frozen=True)
class ProjectedSymbol:
    """One column of an alignment read as a single symbol."""

    name: str
    role: Role
    column: int
    touches_new: bool


@dataclass(frozen=True)
class MultipleAlignment:
    """Row 0 plus stored-pattern rows, organized into ordered columns.

    new_symbols/new_columns describe row 0 (one or more new patterns
    concatenated in load order; new_boundaries holds each source pattern's
    start offset).  rows[i] is display row i+1.
    """

    new_ids: tuple[str, ...]
    new_symbols: tuple[Symbol, ...]
    new_boundaries: tuple[int, ...]
    new_columns: tuple[int, ...]
    rows: tuple[AlignmentRow, ...]
    n_columns: int
    score: CompressionScore | None = None

    @cached_property
    def column_entries(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per column: the (row, symbol index) occupants, row 0 first."""

        cols: list[list[tuple[int, int]]] = [[] for _ in range(self.n_columns)]
        for j, c in enumerate(self.new_columns):
            cols[c].append((0, j))
        for r, row in enumerate(self.rows, start=1):
            for j, c in enumerate(row.columns):
                cols[c].append((r, j))
        return tuple(tuple(entries) for entries in cols)

    @cached_property
    def signature(self):
        """Canonical identity: row multiset plus column structure."""

        return (
            self.new_columns,
            tuple(sorted((row.pattern.id, row.columns) for row in self.rows)),
        )

    def symbol_at(self, row: int, sym_idx: int) -> Symbol:
        if row == 0:
            return self.new_symbols[sym_idx]
        return self.rows[row - 1].pattern.symbols[sym_idx]

    def row_ids(self) -> tuple[str, ...]:
        return tuple(row.pattern.id for row in self.rows)

    def validate(self) -> None:
        """Check the structural invariants; raises AlignmentError on breach."""

        for row in (("row0", self.new_columns),) + tuple(
            (row.pattern.id, row.columns) for row in self.rows
        ):
            label, cols = row
            if any(b >= a for a, b in zip(cols, cols[1:])):
                raise AlignmentError(f"row {label} breaks column order")
            if cols and (cols[0] < 0 or cols[-1] >= self.n_columns):
                raise AlignmentError(f"row {label} column out of range")
        for c, entries in enumerate(self.column_entries):
            rows_here = [r for r, _ in entries]
            if len(set(rows_here)) != len(rows_here):
                raise AlignmentError(f"column {c} holds two symbols of one row")
            names = {self.symbol_at(r, j).name for r, j in entries}
            if len(entries) >= 2 and len(names) != 1:
                raise AlignmentError(f"match column {c} mixes names {names}")
        for r, row in enumerate(self.rows, start=1):
            if not any(
                len(self.column_entries[c]) >= 2 for c in row.columns
            ):
                raise AlignmentError(f"row {row.pattern.id} shares no match column")


def seed_alignment(store: KnowledgeStore) -> MultipleAlignment:
    """Row 0 only: all new patterns concatenated in load order."""

    if not store.new_patterns:
        raise StoreError("no New patterns to align")
    symbols: list[Symbol] = []
    boundaries: list[int] = []
    ids: list[str] = []
    for p in store.new_patterns:
        boundaries.append(len(symbols))
        symbols.extend(p.symbols)
        ids.append(p.id)
    n = len(symbols)
    return MultipleAlignment(
        new_ids=tuple(ids),
        new_symbols=tuple(symbols),
        new_boundaries=tuple(boundaries),
        new_columns=tuple(range(n)),
        rows=(),
        n_columns=n,
        score=CompressionScore.of(0.0, 0.0),
    )


def projection(al: MultipleAlignment) -> list[ProjectedSymbol]:
    """One symbol per column, left to right.

    A match column projects its shared name, with role ID if any stored-row
    contributor is an ID-symbol; the flag records whether the column already
    touches row 0.
    """

    out = []
    for c, entries in enumerate(al.column_entries):
        name = al.symbol_at(*entries[0]).name
        role = Role.CONTENT
        touches_new = False
        for r, j in entries:
            if r == 0:
                touches_new = True
            elif al.symbol_at(r, j).role is Role.ID:
                role = Role.ID
        out.append(ProjectedSymbol(name=name, role=role, column=c, touches_new=touches_new))
    return out


def extend_alignment(
    base: MultipleAlignment, old: Pattern, path: MatchPath
) -> MultipleAlignment:
    """Return base plus one new row holding an instance of `old`.

    `path` pairs are (symbol index in old, column index in base); matched
    symbols join the paired columns, and each run of unmatched old symbols
    gets fresh single-symbol columns hugging the match region (a leading run
    sits immediately before the first matched column, any other run
    immediately after the matched column on its left).
    """

    if path.driving_len != len(old.symbols) or path.target_len != base.n_columns:
        raise AlignmentError("path does not fit this pattern/alignment")
    if not path.pairs:
        raise AlignmentError("cannot extend with an empty path")
    for (j, c), name in zip(path.pairs, path.names):
        if old.symbols[j].name != name:
            raise AlignmentError("path names disagree with the pattern")
        entries = base.column_entries[c]
        if base.symbol_at(*entries[0]).name != name:
            raise AlignmentError("path names disagree with the alignment")

    pairs = path.pairs
    inserts: list[tuple[int, int]] = []  # (insert position in old numbering, count)
    first_d, first_c = pairs[0]
    if first_d > 0:
        inserts.append((first_c, first_d))
    for (d0, c0), (d1, _c1) in zip(pairs, pairs[1:]):
        gap = d1 - d0 - 1
        if gap:
            inserts.append((c0 + 1, gap))
    last_d, last_c = pairs[-1]
    tail = len(old.symbols) - 1 - last_d
    if tail:
        inserts.append((last_c + 1, tail))

    positions = [p for p, _ in inserts]
    prefix = [0]
    for _, count in inserts:
        prefix.append(prefix[-1] + count)

    def shift(col: int) -> int:
        lo, hi = 0, len(positions)
        while lo < hi:
            mid = (lo + hi) // 2
            if positions[mid] <= col:
                lo = mid + 1
            else:
                hi = mid
        return col + prefix[lo]

    new_cols_of_run: dict[int, int] = {}  # run start position -> first new index
    for (pos, _count), before in zip(inserts, prefix):
        new_cols_of_run[pos] = pos + before

    matched = dict(pairs)
    row_columns: list[int] = []
    j = 0
    L = len(old.symbols)
    while j < L:
        if j in matched:
            row_columns.append(shift(matched[j]))
            j += 1
        else:
            # start of an unmatched run; find its insert position
            if j < first_d:
                base_col = new_cols_of_run[first_c]
                run_start = 0
            else:
                prev = max(d for d, _ in pairs if d < j)
                base_col = new_cols_of_run[matched[prev] + 1]
                run_start = prev + 1
            row_columns.append(base_col + (j - run_start))
            j += 1

    total_inserted = prefix[-1]
    return MultipleAlignment(
        new_ids=base.new_ids,
        new_symbols=base.new_symbols,
        new_boundaries=base.new_boundaries,
        new_columns=tuple(shift(c) for c in base.new_columns),
        rows=base.rows
        + (AlignmentRow(pattern=old, columns=tuple(row_columns)),),
        n_columns=base.n_columns + total_inserted,
        score=None,
    )


def encoding_of(al: MultipleAlignment) -> tuple[Symbol, ...]:
    """The alignment's code: unmatched ID-symbols of stored rows, in column order."""

    code = []
    for entries in al.column_entries:
        if len(entries) != 1:
            continue
        r, j = entries[0]
        if r == 0:
            continue
        sym = al.symbol_at(r, j)
        if sym.role is Role.ID:
            code.append(sym)
    return tuple(code)


def score_alignment(al: MultipleAlignment, model: CostModel) -> CompressionScore:
    """bn over new symbols in match columns, be over the code, cd = bn - be."""

    bn = 0.0
    for j, c in enumerate(al.new_columns):
        if len(al.column_entries[c]) >= 2:
            bn += model.cost(al.new_symbols[j].name)
    be = 0.0
    for sym in encoding_of(al):
        be += model.cost(sym.name)
    return CompressionScore.of(bn, be)


def with_score(al: MultipleAlignment, model: CostModel) -> MultipleAlignment:
    return replace(al, score=score_alignment(al, model))


def _dominated_instance(base: MultipleAlignment, old: Pattern, path: MatchPath) -> bool:
    """True when every matched symbol lands on the same symbol's column in an
    existing instance of the same pattern.

    Such an extension only re-unifies a pattern with itself (lowering the code
    for free), so it is rejected as degenerate.
    """

    for row in base.rows:
        if row.pattern.id != old.id:
            continue
        cols = row.columns
        if all(cols[d] == c for d, c in path.pairs):
            return True
    return False


def _rank_key(al: MultipleAlignment):
    return (-al.score.cd, len(al.rows), al.row_ids(), al.signature)


def build_alignments(
    store: KnowledgeStore, model: CostModel, params: BuildParams
) -> list[MultipleAlignment]:
    """Staged beam search for the best-compressing alignments.

    Every stage extends each live alignment with every stored pattern along
    the paths the matcher delivers, scores the results, and carries the
    beam_width best forward; every distinct alignment generated anywhere
    stays in the result pool.  Returns the top_k distinct alignments by
    compression difference (ties: fewer rows, then row-id sequence).
    """

    seed = seed_alignment(store)
    pool: dict = {}
    expanded = {seed.signature}
    live = [seed]
    for _stage in range(params.max_rows):
        candidates = []
        stage_sigs = set()
        for al in live:
            proj = projection(al)
            proj_syms = [Symbol(p.name, p.role) for p in proj]
            for old in store.old_patterns:
                paths = find_matches(old.symbols, proj_syms, params.match, model)
                for path in paths:
                    if _dominated_instance(al, old, path):
                        continue
                    ext = extend_alignment(al, old, path)
                    sig = ext.signature
                    if sig in stage_sigs or sig in expanded:
                        continue
                    stage_sigs.add(sig)
                    scored = pool.get(sig)
                    if scored is None:
                        scored = with_score(ext, model)
                        pool[sig] = scored
                    candidates.append(scored)
        if not candidates:
            break
        candidates.sort(key=_rank_key)
        live = candidates[: params.beam_width]
        expanded.update(al.signature for al in live)
    results = sorted(pool.values(), key=_rank_key)
    return results[: params.top_k]
