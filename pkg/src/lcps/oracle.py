"""Naive reference implementations used for differential testing.

Everything in this module is deliberately brute force and shares no code
with the index machinery in the rest of the package.  Tests treat these
answers as ground truth, so clarity beats speed throughout.
"""
from __future__ import annotations

import json
from typing import Iterable

PROPERTIES = ("sqf", "sqr", "per", "pal", "lyn")


class BoundExceeded(ValueError):
    """Input is larger than the configured brute-force bound."""


def _as_bytes(s) -> bytes:
    if isinstance(s, bytes):
        return s
    if isinstance(s, str):
        return s.encode("latin-1")
    return bytes(s)


def _is_square(s: bytes) -> bool:
    h, r = divmod(len(s), 2)
    return len(s) > 0 and r == 0 and s[:h] == s[h:]


def _has_square(s: bytes) -> bool:
    n = len(s)
    for p in range(1, n // 2 + 1):
        for i in range(0, n - 2 * p + 1):
            if s[i:i + p] == s[i + p:i + 2 * p]:
                return True
    return False


def _smallest_period(s: bytes) -> int:
    n = len(s)
    for p in range(1, n + 1):
        if s[: n - p] == s[p:]:
            return p
    return n  # unreachable for non-empty input


def _is_periodic(s: bytes) -> bool:
    return len(s) > 0 and 2 * _smallest_period(s) <= len(s)


def _is_palindrome(s: bytes) -> bool:
    return len(s) > 0 and s == s[::-1]


def _is_lyndon(s: bytes) -> bool:
    return len(s) > 0 and all(s < s[i:] for i in range(1, len(s)))


_CHECKS = {
    "sqf": lambda s: len(s) > 0 and not _has_square(s),
    "sqr": _is_square,
    "per": _is_periodic,
    "pal": _is_palindrome,
    "lyn": _is_lyndon,
}


def holds(prop: str, s) -> bool:
    """Truth value of property `prop` on `s`, by the literal definition."""
    return _CHECKS[prop](_as_bytes(s))


def doc_hits(docs: Iterable, sub) -> int:
    """Number of documents containing `sub` as a substring."""
    sub = _as_bytes(sub)
    return sum(1 for d in docs if sub in _as_bytes(d))


def oracle_query(docs, y, k: int, prop: str):
    """Longest substring of y with property `prop` occurring in >= k docs.

    Returns (length, witnesses) where witnesses lists every (start, substring)
    pair of the winning length, starts 0-based.  Length 0 means no substring
    qualifies.
    """
    docs = [_as_bytes(d) for d in docs]
    y = _as_bytes(y)
    check = _CHECKS[prop]
    for length in range(len(y), 0, -1):
        witnesses = []
        for start in range(0, len(y) - length + 1):
            sub = y[start:start + length]
            if doc_hits(docs, sub) >= k and check(sub):
                witnesses.append((start, sub))
        if witnesses:
            return length, witnesses
    return 0, []


def oracle_ms(docs, y, k: int) -> list[int]:
    """Matching statistics of y against the docs at document threshold k.

    ms[i] = length of the longest prefix of y[i:] occurring in >= k docs.
    """
    docs = [_as_bytes(d) for d in docs]
    y = _as_bytes(y)
    out = []
    for i in range(len(y)):
        length = 0
        while i + length < len(y) and doc_hits(docs, y[i:i + length + 1]) >= k:
            length += 1
        out.append(length)
    return out


def oracle_distinct(prop: str, s) -> set[bytes]:
    """Set of distinct substrings of s satisfying `prop`."""
    s = _as_bytes(s)
    check = _CHECKS[prop]
    found = set()
    for i in range(len(s)):
        for j in range(i + 1, len(s) + 1):
            sub = s[i:j]
            if sub not in found and check(sub):
                found.add(sub)
    return found


def _lyndon_factors(s: bytes) -> list[tuple[int, int]]:
    # greedy: the first factor is the longest Lyndon prefix
    out = []
    pos = 0
    while pos < len(s):
        for length in range(len(s) - pos, 0, -1):
            if _is_lyndon(s[pos:pos + length]):
                out.append((pos, length))
                pos += length
                break
    return out


class OracleTables:
    """Brute-force per-string tables: runs, shortest squares, minimal suffixes."""

    def __init__(self, s, bound: int = 64):
        s = _as_bytes(s)
        if len(s) > bound:
            raise BoundExceeded(f"string of length {len(s)} exceeds bound {bound}")
        self.s = s
        n = len(s)

        # smallest period of every substring, via the failure function of each suffix
        per = [[0] * n for _ in range(n)]
        for i in range(n):
            fail = [0] * (n - i + 1)
            t = 0
            for m in range(2, n - i + 1):
                while t and s[i + t] != s[i + m - 1]:
                    t = fail[t]
                if s[i + t] == s[i + m - 1]:
                    t += 1
                fail[m] = t
            for j in range(i, n):
                per[i][j] = (j - i + 1) - fail[j - i + 1]
        self.period = per

        def has_period(i, j, p):
            return s[i:j + 1 - p] == s[i + p:j + 1]

        runs = set()
        for i in range(n):
            for j in range(i, n):
                p = per[i][j]
                if 2 * p <= j - i + 1 \
                        and (i == 0 or not has_period(i - 1, j, p)) \
                        and (j == n - 1 or not has_period(i, j + 1, p)):
                    runs.add((i, j, p))
        self.runs = runs

        # sq_end[j]: length of the shortest square ending at j, 0 when none
        sq_end = [0] * n
        for j in range(n):
            for p in range(1, (j + 1) // 2 + 1):
                if s[j - 2 * p + 1:j - p + 1] == s[j - p + 1:j + 1]:
                    sq_end[j] = 2 * p
                    break
        self.sq_end = sq_end

        # min_suffix[(l, r)]: start of the lexicographically minimal suffix of s[l..r]
        self.min_suffix = {
            (l, r): min(range(l, r + 1), key=lambda t: s[t:r + 1])
            for l in range(n) for r in range(l, n)
        }

        self.lyndon_factors = _lyndon_factors(s)


def oracle_tables(s, bound: int = 64) -> OracleTables:
    return OracleTables(s, bound)


def golden_case(docs, y, k: int, prop: str) -> dict:
    """One differential test case as a JSON-ready dict."""
    docs = [_as_bytes(d) for d in docs]
    y = _as_bytes(y)
    length, witnesses = oracle_query(docs, y, k, prop)
    return {
        "corpus": [d.decode("latin-1") for d in docs],
        "y": y.decode("latin-1"),
        "k": k,
        "property": prop,
        "length": length,
        "witnesses": [[start + 1, sub.decode("latin-1")] for start, sub in witnesses],
    }


def write_golden(path, cases: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for case in cases:
            fh.write(json.dumps(case, sort_keys=True) + "\n")


def read_golden(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
