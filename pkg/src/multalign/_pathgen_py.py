"""Pure-Python candidate generator for the match-path search.

Same contract as the compiled module `_pathgen_c`; selected as a fallback
when the extension is not built (or when MULTALIGN_BACKEND=python).
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np


def extend(last_t, hits):
    """Pair every live state with every hit strictly beyond its last position.

    last_t: int32 array, last matched target position per live state (-1 if none).
    hits:   ascending int32 array of target positions for the current symbol.
    Returns (src, t): indices into the live arrays, and the target positions.
    Generation order is state-major, target-ascending.
    """

    hl = hits.tolist()
    nh = len(hl)
    src: list[int] = []
    ts: list[int] = []
    for s, lp in enumerate(last_t.tolist()):
        k = bisect_right(hl, lp)
        if k < nh:
            src.extend([s] * (nh - k))
            ts.extend(hl[k:])
    return (
        np.asarray(src, dtype=np.int64),
        np.asarray(ts, dtype=np.int32),
    )
