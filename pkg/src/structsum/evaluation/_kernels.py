"""Integer kernels behind the ROUGE scorers.

Two interchangeable paths: numba-compiled loops and pure numpy. The numba
path is used when numba imports and ``STRUCTSUM_DISABLE_JIT`` is unset (or
``0``). Both paths take token sequences already encoded as non-negative
int64 ids.
"""

from __future__ import annotations

import logging
import os

import numpy as np

logger = logging.getLogger(__name__)


def _jit_disabled() -> bool:
    return os.environ.get("STRUCTSUM_DISABLE_JIT", "0").strip().lower() not in {"", "0", "false", "no"}


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _jit_disabled()


# -- numpy path ---------------------------------------------------------------


def lcs_length_numpy(a: np.ndarray, b: np.ndarray) -> int:
    """LCS length by anti-diagonal wavefront.

    Cell (i, j) depends on (i-1, j-1), (i-1, j) and (i, j-1), so every cell
    on anti-diagonal i + j = d can be filled at once from diagonals d-1 and
    d-2. Diagonals are stored indexed by i.
    """
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        return 0
    # table is (m+1) x (n+1) with zero borders; diagonal d spans i in [max(0,d-n), min(m,d)]
    prev2 = np.zeros(m + 1, dtype=np.int64)
    prev1 = np.zeros(m + 1, dtype=np.int64)
    for d in range(2, m + n + 1):
        cur = np.zeros(m + 1, dtype=np.int64)
        lo = max(1, d - n)
        hi = min(m, d - 1)
        if lo <= hi:
            i = np.arange(lo, hi + 1)
            j = d - i
            match = a[i - 1] == b[j - 1]
            diag = prev2[i - 1] + 1
            best = np.maximum(prev1[i - 1], prev1[i])  # (i-1, j) and (i, j-1)
            cur[i] = np.where(match, diag, best)
        prev2, prev1 = prev1, cur
    return int(prev1[m])


def clipped_overlap_numpy(a: np.ndarray, b: np.ndarray, n_keys: int) -> int:
    """Sum over keys of min(count in a, count in b)."""
    if len(a) == 0 or len(b) == 0:
        return 0
    ca = np.bincount(a, minlength=n_keys)
    cb = np.bincount(b, minlength=n_keys)
    return int(np.minimum(ca, cb).sum())


# -- numba path ---------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def lcs_length_numba(a, b):
        m, n = len(a), len(b)
        if m == 0 or n == 0:
            return 0
        prev = np.zeros(n + 1, dtype=np.int64)
        cur = np.zeros(n + 1, dtype=np.int64)
        for i in range(1, m + 1):
            ai = a[i - 1]
            for j in range(1, n + 1):
                if ai == b[j - 1]:
                    cur[j] = prev[j - 1] + 1
                elif prev[j] >= cur[j - 1]:
                    cur[j] = prev[j]
                else:
                    cur[j] = cur[j - 1]
            prev, cur = cur, prev
        return prev[n]

    @numba.njit(cache=True)
    def clipped_overlap_numba(a, b, n_keys):
        if len(a) == 0 or len(b) == 0:
            return 0
        counts = np.zeros(n_keys, dtype=np.int64)
        for k in a:
            counts[k] += 1
        total = 0
        for k in b:
            if counts[k] > 0:
                counts[k] -= 1
                total += 1
        return total

else:  # pragma: no cover
    lcs_length_numba = None
    clipped_overlap_numba = None


def lcs_length(a: np.ndarray, b: np.ndarray) -> int:
    if USE_NUMBA:
        return int(lcs_length_numba(a, b))
    return lcs_length_numpy(a, b)


def clipped_overlap(a: np.ndarray, b: np.ndarray, n_keys: int) -> int:
    if USE_NUMBA:
        return int(clipped_overlap_numba(a, b, n_keys))
    return clipped_overlap_numpy(a, b, n_keys)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
