"""Suffix array, LCP/LCE machinery, runs, and Lyndon primitives.

All positions here are 0-based offsets into the concatenated text (or into
whatever plain symbol sequence the caller passes).  Runs are reported as
inclusive (start, end, period) triples and never span a document boundary
because the distinct sentinels break every comparison.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numba import njit

from .corpus import GlobalText

PROPERTIES = ("sqf", "sqr", "per", "pal", "lyn")

_PROPERTY_ALIASES = {
    "sqf": "sqf", "square-free": "sqf", "square_free": "sqf", "squarefree": "sqf",
    "sqr": "sqr", "square": "sqr",
    "per": "per", "periodic": "per",
    "pal": "pal", "palindrome": "pal",
    "lyn": "lyn", "lyndon": "lyn",
}


class UnknownProperty(ValueError):
    pass


class RangeCrossesBoundary(ValueError):
    """A per-document scan was asked to cross a sentinel."""


def normalize_property(prop: str) -> str:
    try:
        return _PROPERTY_ALIASES[prop.lower()]
    except KeyError:
        raise UnknownProperty(f"unknown property {prop!r}") from None


def _suffix_array(symbols: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling over numpy lexsort."""
    n = symbols.size
    if n == 0:
        return np.empty(0, dtype=np.int64)
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    rank = symbols.astype(np.int64)
    step = 1
    while True:
        key2 = np.full(n, -1, dtype=np.int64)
        key2[:n - step] = rank[step:]
        sa = np.lexsort((key2, rank))
        head, tail = sa[:-1], sa[1:]
        bumped = (rank[tail] != rank[head]) | (key2[tail] != key2[head])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[sa[0]] = 0
        new_rank[tail] = np.cumsum(bumped)
        rank = new_rank
        if rank[sa[-1]] == n - 1:
            return sa
        step *= 2


@njit(cache=True)
def _kasai(symbols, sa, rank):
    n = sa.size
    lcp = np.zeros(n, dtype=np.int64)
    h = 0
    for i in range(n):
        r = rank[i]
        if r > 0:
            j = sa[r - 1]
            while i + h < n and j + h < n and symbols[i + h] == symbols[j + h]:
                h += 1
            lcp[r] = h
            if h > 0:
                h -= 1
        else:
            h = 0
    return lcp


class SuffixBundle:
    """Suffix array + rank + LCP + an argmin sparse table for O(1) LCE."""

    def __init__(self, symbols: np.ndarray):
        symbols = np.ascontiguousarray(symbols, dtype=np.int32)
        self.symbols = symbols
        n = symbols.size
        self.n = n
        self.sa = _suffix_array(symbols)
        self.rank = np.empty(n, dtype=np.int64)
        self.rank[self.sa] = np.arange(n, dtype=np.int64)
        self.lcp = _kasai(symbols, self.sa, self.rank)
        # table[j][i] = argmin of lcp over [i, i + 2^j)
        table = [np.arange(n, dtype=np.int64)]
        j = 1
        while (1 << j) <= n:
            prev = table[-1]
            half = 1 << (j - 1)
            m = n - (1 << j) + 1
            a = prev[:m]
            b = prev[half:half + m]
            table.append(np.where(self.lcp[b] < self.lcp[a], b, a))
            j += 1
        width = max(len(t) for t in table)
        packed = np.zeros((len(table), width), dtype=np.int64)
        for lvl, t in enumerate(table):
            packed[lvl, :len(t)] = t
        self._argmin = packed
        self._logt = (np.frexp(np.arange(n + 1))[1] - 1).astype(np.int64)

    def rmq_argmin(self, lo: int, hi: int) -> int:
        """Index of the minimum of lcp over the inclusive range [lo, hi]."""
        span = hi - lo + 1
        lvl = span.bit_length() - 1
        a = self._argmin[lvl, lo]
        b = self._argmin[lvl, hi - (1 << lvl) + 1]
        return int(b) if self.lcp[b] < self.lcp[a] else int(a)

    def lce(self, i: int, j: int) -> int:
        """Longest common extension of the suffixes at i and j."""
        if i == j:
            return self.n - i
        a, b = int(self.rank[i]), int(self.rank[j])
        if a > b:
            a, b = b, a
        return int(self.lcp[self.rmq_argmin(a + 1, b)])

    def lce_batch(self, ii, jj) -> np.ndarray:
        ii = np.asarray(ii, dtype=np.int64)
        jj = np.asarray(jj, dtype=np.int64)
        a = self.rank[ii]
        b = self.rank[jj]
        same = ii == jj
        lo = np.where(same, 0, np.minimum(a, b) + 1)
        hi = np.where(same, 0, np.maximum(a, b))
        span = hi - lo + 1
        lvl = np.floor(np.log2(span)).astype(np.int64)
        m1 = self._argmin[lvl, lo]
        m2 = self._argmin[lvl, hi - (1 << lvl) + 1]
        res = self.lcp[np.where(self.lcp[m2] < self.lcp[m1], m2, m1)]
        return np.where(same, self.n - ii, res)

    def argmin_batch(self, lo, hi) -> np.ndarray:
        """Vectorized rmq_argmin over inclusive ranges (lo must be <= hi)."""
        lo = np.asarray(lo, dtype=np.int64)
        hi = np.asarray(hi, dtype=np.int64)
        span = hi - lo + 1
        lvl = np.floor(np.log2(span)).astype(np.int64)
        m1 = self._argmin[lvl, lo]
        m2 = self._argmin[lvl, hi - (1 << lvl) + 1]
        return np.where(self.lcp[m2] < self.lcp[m1], m2, m1)


def build_suffix_bundle(text) -> SuffixBundle:
    if isinstance(text, GlobalText):
        return SuffixBundle(text.symbols)
    return SuffixBundle(np.asarray(text, dtype=np.int32))


class Run(NamedTuple):
    start: int    # 0-based, inclusive
    end: int      # 0-based, inclusive
    period: int   # smallest period of text[start..end]


def _prime_factors(p: int, spf: np.ndarray) -> list[int]:
    out = []
    while p > 1:
        f = int(spf[p])
        out.append(f)
        while p % f == 0:
            p //= f
    return out


def _spf_sieve(limit: int) -> np.ndarray:
    spf = np.arange(limit + 1, dtype=np.int64)
    for i in range(2, int(limit ** 0.5) + 1):
        if spf[i] == i:
            sl = spf[i * i::i]
            sl[sl == np.arange(i * i, limit + 1, i)] = i
    return spf


@njit(cache=True)
def _lce_tab(i, j, n, rank, lcp, argt, logt):
    if i == j:
        return n - i
    a = rank[i]
    b = rank[j]
    if a > b:
        a, b = b, a
    lo = a + 1
    span = b - lo + 1
    lvl = logt[span]
    m1 = argt[lvl, lo]
    m2 = argt[lvl, b - (1 << lvl) + 1]
    v1 = lcp[m1]
    v2 = lcp[m2]
    return v2 if v2 < v1 else v1


@njit(cache=True)
def _runs_kernel(doc_start, doc_len, rank, lcp, argt, logt,
                 rrank, rlcp, rargt, rlogt, spf, out):
    total = rank.size
    cap = out.shape[0]
    cnt = 0
    for d in range(doc_start.size):
        ds = doc_start[d]
        m = doc_len[d]
        send = ds + m
        for p in range(1, m // 2 + 1):
            for q in range(ds + p, send, p):
                if q - p > ds:
                    back = _lce_tab(total - q + p, total - q, total,
                                    rrank, rlcp, rargt, rlogt)
                else:
                    back = 0
                if back >= p:
                    # a closer anchor already saw this fragment
                    continue
                fwd = _lce_tab(q - p, q, total, rank, lcp, argt, logt)
                if back + fwd < p:
                    continue
                s = q - p - back
                e = q + fwd - 1
                # keep only if no proper divisor of p is also a period
                ln = e - s + 1
                w = p
                ok = True
                while w > 1:
                    f = spf[w]
                    div = p // f
                    if _lce_tab(s, s + div, total,
                                rank, lcp, argt, logt) >= ln - div:
                        ok = False
                        break
                    while w % f == 0:
                        w //= f
                if not ok:
                    continue
                if cnt < cap:
                    out[cnt, 0] = s
                    out[cnt, 1] = e
                    out[cnt, 2] = p
                cnt += 1
    return cnt


def compute_runs(text: GlobalText, bundle: SuffixBundle | None = None,
                 rev_bundle: SuffixBundle | None = None) -> list[Run]:
    """All maximal periodic fragments, per document, by anchored LCE probing.

    For every candidate period p and every anchor q at distance p from the
    previous one, extend the match between the suffixes at q-p and q in both
    directions; a run with period p shows up exactly once, at the first
    anchor inside it.  Fragments whose period is not the smallest period
    are dropped via prime-divisor period checks.  O(n log n) LCE work.
    """
    if bundle is None:
        bundle = build_suffix_bundle(text)
    if rev_bundle is None:
        rev_bundle = SuffixBundle(text.symbols[::-1])
    total = len(text.symbols)
    max_half = int(text.doc_len.max()) // 2 if text.k else 0
    spf = _spf_sieve(max(max_half, 1))
    cap = 4 * total + 64
    while True:
        out = np.empty((cap, 3), dtype=np.int64)
        cnt = _runs_kernel(text.doc_start, text.doc_len,
                           bundle.rank, bundle.lcp,
                           bundle._argmin, bundle._logt,
                           rev_bundle.rank, rev_bundle.lcp,
                           rev_bundle._argmin, rev_bundle._logt,
                           spf, out)
        if cnt <= cap:
            break
        cap = cnt
    out = out[:cnt]
    order = np.lexsort((out[:, 2], out[:, 1], out[:, 0]))
    runs = [Run(int(s), int(e), int(p)) for s, e, p in out[order]]
    assert len(runs) < max(text.n, 1) + 1
    return runs


def lyndon_factorize(s) -> list[tuple[int, int]]:
    """Duval's factorization; returns (start, length) per factor."""
    if isinstance(s, str):
        s = s.encode("latin-1")
    n = len(s)
    out = []
    i = 0
    while i < n:
        j, k = i + 1, i
        while j < n and s[k] <= s[j]:
            k = i if s[k] < s[j] else k + 1
            j += 1
        p = j - k
        while i <= k:
            out.append((i, p))
            i += p
    return out


def minimal_suffix_scan(seq, lo: int, hi: int) -> list[int]:
    """Start of the lexicographically minimal suffix of seq[lo..r], for every r.

    Returns ans with ans[r - lo] = that start, computed left to right in
    amortized O(hi - lo) time by tracking Duval's phase structure: the
    minimal suffix is the last factor of the Lyndon factorization, and
    within a phase w^a w' the last factor is either the final copy of w or
    recursively the answer already recorded for the shorter prefix w'.

    When seq is a GlobalText the range must stay inside one document.
    """
    if isinstance(seq, GlobalText):
        if not (0 <= lo <= hi < len(seq.symbols)):
            raise RangeCrossesBoundary("scan range out of bounds")
        if seq.doc_of(lo) != seq.doc_of(hi) or seq.is_sentinel(hi):
            raise RangeCrossesBoundary("scan range crosses a document boundary")
        seq = seq.symbols
    elif isinstance(seq, str):
        seq = seq.encode("latin-1")
    if lo > hi:
        return []
    ans = [0] * (hi - lo + 1)
    i = lo
    while i <= hi:
        ans[i - lo] = i
        j, k = i + 1, i
        while j <= hi:
            if seq[k] < seq[j]:
                k = i
            elif seq[k] == seq[j]:
                k += 1
            else:
                break
            p = j + 1 - k
            t = j - i + 1
            if t % p == 0:
                ans[j - lo] = j + 1 - p
            else:
                m = t % p
                ans[j - lo] = (j + 1 - m) + (ans[i + m - 1 - lo] - i)
            j += 1
        p = j - k
        while i <= k:
            i += p
    return ans


def smallest_period(s) -> int:
    """Smallest period of a non-empty sequence, via the failure function."""
    if isinstance(s, str):
        s = s.encode("latin-1")
    n = len(s)
    if n == 0:
        raise ValueError("smallest_period of empty sequence")
    fail = [0] * (n + 1)
    t = 0
    for m in range(2, n + 1):
        while t and s[t] != s[m - 1]:
            t = fail[t]
        if s[t] == s[m - 1]:
            t += 1
        fail[m] = t
    return n - fail[n]


def check_property(prop: str, s) -> bool:
    """Naive truth value of a property on a symbol sequence (tests only)."""
    prop = normalize_property(prop)
    if isinstance(s, str):
        s = s.encode("latin-1")
    n = len(s)
    if n == 0:
        return False
    if prop == "sqr":
        h, r = divmod(n, 2)
        return r == 0 and tuple(s[:h]) == tuple(s[h:])
    if prop == "pal":
        return all(s[i] == s[n - 1 - i] for i in range(n // 2))
    if prop == "per":
        return 2 * smallest_period(s) <= n
    if prop == "lyn":
        st = tuple(s)
        return all(st < st[i:] for i in range(1, n))
    # square-free
    for p in range(1, n // 2 + 1):
        for i in range(0, n - 2 * p + 1):
            if tuple(s[i:i + p]) == tuple(s[i + p:i + 2 * p]):
                return False
    return True
