"""Acceptance battery: one test per criterion, strictest checks last.

Criteria 1 and 2 drive the full pipeline and a brute-force oracle over
shared case grids; the rest cover combinatorial bounds at scale,
matching statistics, minimal-suffix agreement, the offline walk, the
complexity smoke, and serialization.

The literally exhaustive grid named by criterion 1 (every corpus of up
to three binary documents of length <= 6, crossed with every pattern of
length <= 6 over {a,b,c}, every threshold, five properties) is around
10^9 cases, far beyond any test budget.  This module keeps the exactness
and the shape of that grid but trims radii: three complete sub-grids
(every single-document corpus with patterns to length 4, every pair of
documents to length 3 with patterns to length 3, every triple to length
2 with patterns to length 2) plus a seeded uniform sample of the full
grid.  Every case in those sub-grids is run, none are sampled.
"""
import itertools
import random
import time

import numpy as np
import pytest

from lcps.cli import bench_corpus
from lcps.gst import FLAG_PALINDROME, FLAG_SQUARE
from lcps.index import index_documents
from lcps.indexfile import load_index, save_index
from lcps.ms_engine import matching_statistics, open_cursor
from lcps.oracle import PROPERTIES, doc_hits, holds, oracle_ms
from lcps.query_engine import _assemble, _fold, query, self_query
from lcps.suffix_core import compute_runs, lyndon_factorize, minimal_suffix_scan


def words(alphabet: bytes, lo: int, hi: int):
    for length in range(lo, hi + 1):
        for tup in itertools.product(alphabet, repeat=length):
            yield bytes(tup)


_INDEX_CACHE: dict = {}


def build(docs):
    key = tuple(docs)
    idx = _INDEX_CACHE.get(key)
    if idx is None:
        if len(_INDEX_CACHE) >= 8000:
            _INDEX_CACHE.clear()
        idx = _INDEX_CACHE[key] = index_documents(list(key))
    return idx


def engine_all(idx, y: bytes, k: int):
    """One cursor pass, then every property folded over the same emissions."""
    y_sym = [idx.corpus.map_symbol(b) for b in y]
    cursor = open_cursor(idx.tree, k)
    ems = []
    for s in y_sym:
        ems.extend(cursor.feed(s))
    ems.extend(cursor.finish())
    return {p: _assemble(idx, p, k, _fold(idx, p, ems, y_sym),
                         lambda s, n: y[s:s + n])
            for p in PROPERTIES}


def oracle_all(docs, y: bytes, k: int):
    """(length, start, substring) of the leftmost longest qualifying
    substring per property, by full enumeration; None when there is none."""
    best = dict.fromkeys(PROPERTIES)
    memo = {}
    for i in range(len(y)):
        for j in range(i + 1, len(y) + 1):
            sub = y[i:j]
            h = memo.get(sub)
            if h is None:
                h = memo[sub] = doc_hits(docs, sub)
            if h < k:
                continue
            for p in PROPERTIES:
                cur = best[p]
                if (cur is None or j - i > cur[0]) and holds(p, sub):
                    best[p] = (j - i, i, sub)
    return best


def compare_case(docs, y, k, strict_witness=True):
    idx = build(docs)
    got = engine_all(idx, y, k)
    want = oracle_all(list(docs), y, k)
    for p in PROPERTIES:
        r = got[p]
        w = want[p]
        ctx = (docs, y, k, p)
        if w is None:
            assert r == (p, k, 0, 0, b"", 0, 0, 0), ctx
            continue
        assert r.length == w[0], ctx
        if strict_witness:
            assert (r.start_in_y - 1, r.substring) == (w[1], w[2]), ctx
    return got


@pytest.fixture(scope="module")
def suite1():
    cases = []
    for doc in words(b"ab", 1, 6):
        for y in words(b"abc", 0, 4):
            cases.append(((doc,), y, 1))
    short = list(words(b"ab", 1, 3))
    for da in short:
        for db in short:
            for y in words(b"abc", 0, 3):
                for k in (1, 2):
                    cases.append(((da, db), y, k))
    tiny = list(words(b"ab", 1, 2))
    for da in tiny:
        for db in tiny:
            for dc in tiny:
                for y in words(b"abc", 0, 2):
                    for k in (1, 2, 3):
                        cases.append(((da, db, dc), y, k))
    rng = random.Random(140882)
    for _ in range(1200):
        kd = rng.randint(1, 3)
        docs = tuple(bytes(rng.choice(b"ab")
                           for _ in range(rng.randint(1, 6)))
                     for _ in range(kd))
        y = bytes(rng.choice(b"abc") for _ in range(rng.randint(0, 6)))
        cases.append((docs, y, rng.randint(1, kd)))
    return cases


@pytest.fixture(scope="module")
def suite2():
    rng = random.Random(20260814)
    cases = []
    for _ in range(2000):
        sigma = rng.randint(1, 4)
        letters = b"abcd"[:sigma]
        kd = rng.randint(1, 5)
        docs = tuple(bytes(rng.choice(letters)
                           for _ in range(rng.randint(1, 50)))
                     for _ in range(kd))
        y = bytes(rng.choice(b"abcde"[:sigma + 1])
                  for _ in range(rng.randint(0, 30)))
        cases.append((docs, y, rng.randint(1, kd)))
    return cases


def test_criterion_1_exhaustive_oracle_equivalence(suite1):
    checked = 0
    for t, (docs, y, k) in enumerate(suite1):
        got = compare_case(docs, y, k)
        checked += len(PROPERTIES)
        if t % 500 == 0:
            # the shared-emission fold must match the public entry point
            for p in PROPERTIES:
                assert got[p] == query(build(docs), y, k, p)
    print(f"ACCEPTANCE 1 PASS: {checked} engine/oracle comparisons "
          f"over {len(suite1)} grid cases, tolerance 0")


def test_criterion_2_randomized_oracle_equivalence(suite2):
    checked = 0
    for docs, y, k in suite2:
        got = compare_case(docs, y, k)
        for p, r in got.items():
            if r.length == 0:
                continue
            # self-consistency recount on the reported substring
            assert holds(p, r.substring), (docs, y, k, p)
            assert y[r.start_in_y - 1:r.start_in_y - 1 + r.length] == \
                r.substring
            witness = docs[r.witness_doc - 1]
            assert witness[r.witness_pos - 1:r.witness_pos - 1 + r.length] \
                == r.substring
            assert r.docs_matched == doc_hits(list(docs), r.substring) >= k
        checked += len(PROPERTIES)
    assert checked == 10000
    print(f"ACCEPTANCE 2 PASS: {checked} randomized cases with "
          "self-consistency recounts")


def test_criterion_3_combinatorial_bounds():
    lines = []
    for kind in ("random", "fibonacci"):
        for n in (10**4, 10**5):
            docs = bench_corpus(kind, n, seed=7)
            assert sum(len(d) for d in docs) == n
            idx = index_documents(docs)
            flags = np.frombuffer(bytes(idx.tree._flags), dtype=np.uint8)
            squares = int(np.count_nonzero(flags & FLAG_SQUARE))
            pals = int(np.count_nonzero(flags & FLAG_PALINDROME))
            runs = compute_runs(idx.text, idx.bundle)
            assert squares <= 2 * n, (kind, n, squares)
            assert pals <= n, (kind, n, pals)
            assert idx.props.palindrome_count == pals
            assert len(runs) < n, (kind, n, len(runs))
            for kinds in idx.tree.edge_inserted.values():
                assert kinds.get("sqr", 0) <= 2
                assert kinds.get("pal", 0) <= 1
            lines.append(f"{kind} n={n}: {squares} squares, {pals} "
                         f"palindromes, {len(runs)} runs")
    print("ACCEPTANCE 3 PASS: " + "; ".join(lines))


def test_criterion_4_matching_statistics(suite1, suite2):
    rng = random.Random(4)
    cases = [c for c in suite1 if len(c[0]) >= 2][:8000]
    cases += rng.sample([c for c in suite1 if len(c[0]) == 1], 2000)
    cases += suite2
    checked = 0
    for docs, y, k in cases:
        idx = build(docs)
        enc = [idx.corpus.map_symbol(b) for b in y]
        streamed = matching_statistics(idx.tree, k, enc)
        # batch replay over collected emissions
        cursor = open_cursor(idx.tree, k)
        ems = []
        for s in enc:
            ems.extend(cursor.feed(s))
        ems.extend(cursor.finish())
        batch = [0] * len(y)
        for em in ems:
            batch[em.start] = em.length
        want = oracle_ms(list(docs), y, k)
        assert streamed == batch == want, (docs, y, k)
        ends = [em.start + em.length for em in ems]
        assert all(a <= b for a, b in zip(ends, ends[1:])), (docs, y, k)
        checked += 1
    print(f"ACCEPTANCE 4 PASS: {checked} ms vectors, streamed == batch "
          "== oracle, window ends monotone")


def test_criterion_5_minimal_suffix_three_way():
    triples = 0
    for length in range(1, 15):
        for tup in itertools.product(b"ab", repeat=length):
            s = bytes(tup)
            for lo in range(length):
                row = minimal_suffix_scan(s, lo, length - 1)
                for r in range(lo, length):
                    mu = row[r - lo]
                    brute = min(s[i:r + 1] for i in range(lo, r + 1))
                    assert s[mu:r + 1] == brute, (s, lo, r)
                    start, flen = lyndon_factorize(s[lo:r + 1])[-1]
                    assert lo + start == mu, (s, lo, r)
                    assert flen == r - mu + 1, (s, lo, r)
                    triples += 1
            if length <= 8:
                # independent reading: minimal suffix = longest suffix
                # that is a Lyndon word
                for lo in range(length):
                    row = minimal_suffix_scan(s, lo, length - 1)
                    for r in range(lo, length):
                        lyn = [i for i in range(lo, r + 1)
                               if holds("lyn", s[i:r + 1])]
                        assert min(lyn) == row[r - lo], (s, lo, r)
    assert triples == 3014654
    print(f"ACCEPTANCE 5 PASS: {triples} (string, l, r) triples to "
          "length 14, three computations agree")


def test_criterion_6_offline_walk(suite1, suite2):
    seen = set()
    rng = random.Random(6)
    corpora = [docs for docs, _, _ in suite1 if len(docs) >= 2]
    corpora += [docs for docs, _, _ in suite2]
    rng.shuffle(corpora)
    compared = 0
    for docs in corpora:
        if docs in seen:
            continue
        seen.add(docs)
        if len(seen) > 700:
            break
        idx = build(docs)
        joined = b"#".join(docs)
        before = idx.tree.child_lookups
        offline = {(k, p): self_query(idx, k, p)
                   for k in range(1, len(docs) + 1) for p in PROPERTIES}
        assert idx.tree.child_lookups == before, docs
        for (k, p), r_off in offline.items():
            r_on = query(idx, joined, k, p)
            assert r_off == r_on, (docs, k, p)
            compared += 1
    print(f"ACCEPTANCE 6 PASS: {compared} offline results equal online "
          "separator-join results, zero child searches in offline walks")


def test_criterion_7_complexity_smoke():
    index_documents([b"abab", b"bbab"])   # warm the compiled kernels
    builds = {}
    for e in (17, 18, 19, 20):
        docs = bench_corpus("random", 1 << e, seed=11)
        t0 = time.perf_counter()
        index_documents(docs)
        builds[e] = time.perf_counter() - t0
    ratios = [builds[e + 1] / builds[e] for e in (17, 18, 19)]
    assert all(r <= 2.6 for r in ratios), (builds, ratios)

    rng = random.Random(5)
    y = bytes(rng.choice(b"ab") for _ in range(10**4))
    timing = {}
    for n in (10**5, 10**6):
        idx = index_documents(bench_corpus("random", n, seed=12))
        for prop in ("sqf", "sqr", "per", "pal"):
            best = min(_timed(idx, y, prop) for _ in range(5))
            timing[n, prop] = best
    qratios = {p: timing[10**6, p] / timing[10**5, p]
               for p in ("sqf", "sqr", "per", "pal")}
    assert all(r <= 2.0 for r in qratios.values()), (timing, qratios)

    # adversarial Lyndon case: unary corpus, longer unary pattern; the
    # emission windows overlap heavily and each re-runs its own scan, so
    # this is measured and reported rather than bounded
    idx = index_documents([b"a" * 1500])
    t0 = time.perf_counter()
    r = query(idx, b"a" * 3000, 1, "lyn")
    lyn_ms = (time.perf_counter() - t0) * 1000
    assert (r.length, r.substring) == (1, b"a")
    print("ACCEPTANCE 7 PASS: build ratios "
          + ", ".join(f"{r:.2f}" for r in ratios)
          + " (<= 2.6); query ratios "
          + ", ".join(f"{p}={qratios[p]:.2f}" for p in qratios)
          + f" (<= 2.0); unary lyn adversary (n=1500, m=3000): "
          f"{lyn_ms:.0f} ms, quadratic by design")


def _timed(idx, y, prop):
    t0 = time.perf_counter()
    query(idx, y, 1, prop)
    return time.perf_counter() - t0


def test_criterion_8_serialization_round_trip(suite1, suite2, tmp_path):
    rng = random.Random(8)
    cases = rng.sample(suite1, 60) + rng.sample(suite2, 40)
    path = tmp_path / "round.lcps"
    compared = 0
    for docs, y, k in cases:
        idx = build(docs)
        save_index(idx, path)
        loaded = load_index(path)
        for p in PROPERTIES:
            assert query(loaded, y, k, p) == query(idx, y, k, p), \
                (docs, y, k, p)
            assert self_query(loaded, k, p) == self_query(idx, k, p)
            compared += 2
    print(f"ACCEPTANCE 8 PASS: {compared} results byte-identical "
          "after save/load")
