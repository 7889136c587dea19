"""Independent reference implementations used only by the tests.

Written without numpy and without the package's encoding path: n-gram
overlap by explicit multiset intersection, LCS by memoized recursion.
"""

import sys
from collections import Counter
from functools import lru_cache


def ngram_counts(tokens, n):
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def prf(overlap, n_cand, n_ref):
    p = overlap / n_cand if n_cand else 0.0
    r = overlap / n_ref if n_ref else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def rouge_n_oracle(cand_tokens, ref_tokens, n):
    c, r = ngram_counts(cand_tokens, n), ngram_counts(ref_tokens, n)
    overlap = sum((c & r).values())
    return prf(overlap, sum(c.values()), sum(r.values()))


def lcs_oracle(a, b):
    a, b = tuple(a), tuple(b)
    sys.setrecursionlimit(max(10_000, sys.getrecursionlimit()))

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))

    return go(0, 0)


def rouge_l_oracle(cand_tokens, ref_tokens):
    return prf(lcs_oracle(cand_tokens, ref_tokens), len(cand_tokens), len(ref_tokens))
