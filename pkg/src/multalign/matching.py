"""Pairwise matching: alternative monotone match paths between two sequences.

The search is hit-list driven: for each driving position, the candidate
target positions with the same name are known up front, and a beam of live
partial paths (width = max_paths * 4) is advanced best-first across the
driving sequence.  Worst-case work is proportional to n * m for fixed beam
width.  Candidate generation is the hot loop; it runs in a compiled kernel
when available, with a pure-Python fallback selected at import time.
"""

from __future__ import annotations

import os
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .patterns import CostModel, Symbol

if os.environ.get("MULTALIGN_BACKEND", "").strip().lower() == "python":
    from . import _pathgen_py as _gen

    BACKEND = "python"
else:
    try:
        from . import _pathgen_c as _gen  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _pathgen_py as _gen

        BACKEND = "python"


@dataclass(frozen=True)
class MatchParams:
    """Search knobs: how many alternatives, and whether partial paths count.

    max_paths is the size-of-search-space knob; allow_partial=False keeps
    only paths covering every driving symbol; min_hits is the minimum number
    of matched pairs for a path to be reported.
    """

    max_paths: int = 8
    allow_partial: bool = True
    min_hits: int = 1

    def __post_init__(self):
        if self.max_paths < 1:
            raise ValueError("max_paths must be >= 1")
        if self.min_hits < 1:
            raise ValueError("min_hits must be >= 1")


@dataclass(frozen=True)
class MatchPath:
    """A strictly monotone sequence of (driving, target) position pairs.

    Positions are 0-based.  For every pair the driving and target names are
    equal; `names` records them in pair order.
    """

    pairs: tuple[tuple[int, int], ...]
    names: tuple[str, ...]
    driving_len: int
    target_len: int

    def __post_init__(self):
        if len(self.names) != len(self.pairs):
            raise ValueError("names/pairs length mismatch")
        last_d, last_t = -1, -1
        for d, t in self.pairs:
            if d <= last_d or t <= last_t:
                raise ValueError("match path is not strictly monotonic")
            last_d, last_t = d, t
        if self.pairs:
            if self.pairs[-1][0] >= self.driving_len or self.pairs[-1][1] >= self.target_len:
                raise ValueError("pair position out of range")

    @property
    def matched(self) -> int:
        return len(self.pairs)

    @property
    def unmatched_driving(self) -> int:
        return self.driving_len - len(self.pairs)

    @property
    def unmatched_target(self) -> int:
        return self.target_len - len(self.pairs)


def path_score(path: MatchPath, model: CostModel) -> float:
    """Compression yield of the path: summed cost of the matched names."""

    return sum(model.cost(name) for name in path.names)


def _search(hits_per_pos, costs_per_pos, width, allow_skip):
    """Advance a beam of partial paths across the driving positions.

    States are kept in append-only arenas (parent, d, t) so a path is a chain
    of parent links; the live set holds at most `width` states, selected by
    (-score, npairs, creation order).  Returns (score, pairs) per final state.
    """

    arena_parent = [np.array([-1], dtype=np.int64)]
    arena_d = [np.array([-1], dtype=np.int32)]
    arena_t = [np.array([-1], dtype=np.int32)]
    arena_size = 1

    live_id = np.array([0], dtype=np.int64)
    live_last_t = np.array([-1], dtype=np.int32)
    live_score = np.array([0.0], dtype=np.float64)
    live_npairs = np.array([0], dtype=np.int64)

    for i, hits in enumerate(hits_per_pos):
        if len(hits) == 0:
            if allow_skip:
                continue
            return []
        src, t_new = _gen.extend(live_last_t, hits)
        n_new = len(src)
        if n_new:
            new_id = np.arange(arena_size, arena_size + n_new, dtype=np.int64)
            arena_parent.append(live_id[src])
            arena_d.append(np.full(n_new, i, dtype=np.int32))
            arena_t.append(t_new)
            arena_size += n_new
            new_score = live_score[src] + costs_per_pos[i]
            new_npairs = live_npairs[src] + 1
            if allow_skip:
                pool_id = np.concatenate([live_id, new_id])
                pool_last_t = np.concatenate([live_last_t, t_new])
                pool_score = np.concatenate([live_score, new_score])
                pool_npairs = np.concatenate([live_npairs, new_npairs])
            else:
                pool_id, pool_last_t = new_id, t_new
                pool_score, pool_npairs = new_score, new_npairs
        else:
            if allow_skip:
                continue
            return []
        if len(pool_id) > width:
            order = np.lexsort((pool_id, pool_npairs, -pool_score))[:width]
            order = np.sort(order)  # keep creation order within the beam
            pool_id = pool_id[order]
            pool_last_t = pool_last_t[order]
            pool_score = pool_score[order]
            pool_npairs = pool_npairs[order]
        live_id, live_last_t = pool_id, pool_last_t
        live_score, live_npairs = pool_score, pool_npairs

    parent = np.concatenate(arena_parent)
    d_arr = np.concatenate(arena_d)
    t_arr = np.concatenate(arena_t)
    finals = []
    for k in range(len(live_id)):
        pairs = []
        sid = int(live_id[k])
        while sid > 0:
            pairs.append((int(d_arr[sid]), int(t_arr[sid])))
            sid = int(parent[sid])
        pairs.reverse()
        finals.append((float(live_score[k]), pairs))
    return finals


def _is_maximal(pairs, driving_names, tpos_by_name, target_len):
    """True iff no further (d, t) pair can be inserted without crossing."""

    bounds = [(-1, -1)] + list(pairs) + [(len(driving_names), target_len)]
    for (d_lo, t_lo), (d_hi, t_hi) in zip(bounds, bounds[1:]):
        if t_hi - t_lo < 2:
            continue
        for d in range(d_lo + 1, d_hi):
            positions = tpos_by_name.get(driving_names[d])
            if not positions:
                continue
            k = bisect_right(positions, t_lo)
            if k < len(positions) and positions[k] < t_hi:
                return False
    return True


def find_matches(
    driving,
    target,
    params: MatchParams,
    model: CostModel,
) -> list[MatchPath]:
    """Deliver up to max_paths alternative maximal match paths, best first.

    Paths are ranked by summed cost of the matched names (descending), ties
    broken by fewer pairs, then by lexicographically smallest pair sequence.
    """

    if not driving:
        raise ValueError("empty driving sequence")
    if not target:
        raise ValueError("empty target sequence")
    driving_names = [s.name for s in driving]
    target_names = [s.name for s in target]

    tpos_by_name: dict[str, list[int]] = {}
    for t, name in enumerate(target_names):
        tpos_by_name.setdefault(name, []).append(t)

    hits_per_pos = [
        np.asarray(tpos_by_name.get(name, ()), dtype=np.int32) for name in driving_names
    ]
    costs_per_pos = [model.cost(name) for name in driving_names]

    width = params.max_paths * 4
    finals = _search(hits_per_pos, costs_per_pos, width, params.allow_partial)

    n, m = len(driving_names), len(target_names)
    kept = []
    for score, pairs in finals:
        if len(pairs) < params.min_hits:
            continue
        if not params.allow_partial and len(pairs) < n:
            continue
        if not _is_maximal(pairs, driving_names, tpos_by_name, m):
            continue
        kept.append((score, pairs))
    kept.sort(key=lambda sp: (-sp[0], len(sp[1]), sp[1]))
    out = []
    for score, pairs in kept[: params.max_paths]:
        out.append(
            MatchPath(
                pairs=tuple(pairs),
                names=tuple(driving_names[d] for d, _ in pairs),
                driving_len=n,
                target_len=m,
            )
        )
    return out
