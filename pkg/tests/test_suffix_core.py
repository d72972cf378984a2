import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcps import oracle
from lcps.corpus import concatenate, ingest
from lcps.suffix_core import (
    RangeCrossesBoundary,
    Run,
    UnknownProperty,
    build_suffix_bundle,
    check_property,
    compute_runs,
    lyndon_factorize,
    minimal_suffix_scan,
    normalize_property,
    smallest_period,
)


def naive_sa(symbols):
    n = len(symbols)
    return sorted(range(n), key=lambda i: tuple(symbols[i:]))


def naive_lcp_pair(a, b):
    m = 0
    for x, y in zip(a, b):
        if x != y:
            break
        m += 1
    return m


def bundle_of(docs):
    return build_suffix_bundle(concatenate(ingest(docs)))


# -- suffix array + lcp -------------------------------------------------

def test_frozen_single_doc_abaab():
    # text "abaab" + sentinel; sentinel sorts greater than every symbol
    b = bundle_of([b"abaab"])
    assert b.sa.tolist() == [2, 0, 3, 1, 4, 5]
    assert b.lcp.tolist() == [0, 1, 2, 0, 1, 0]


def test_frozen_single_doc_aa():
    b = bundle_of([b"aa"])
    assert b.sa.tolist() == [0, 1, 2]
    assert b.lcp.tolist() == [0, 1, 0]


def test_frozen_two_docs():
    text = concatenate(ingest([b"ab", b"a"]))
    b = build_suffix_bundle(text)
    syms = text.symbols.tolist()
    want = naive_sa(syms)
    assert b.sa.tolist() == want
    for r in range(1, len(syms)):
        got = naive_lcp_pair(syms[b.sa[r - 1]:], syms[b.sa[r]:])
        assert b.lcp[r] == got
    assert b.lcp[0] == 0


@pytest.mark.parametrize("length", range(1, 11))
def test_exhaustive_binary_suffix_arrays(length):
    # one corpus holding every binary string of this length as a document
    docs = [bytes(w) for w in itertools.product(b"ab", repeat=length)]
    text = concatenate(ingest(docs))
    b = build_suffix_bundle(text)
    syms = text.symbols.tolist()
    assert b.sa.tolist() == naive_sa(syms)
    prev = None
    for r, g in enumerate(b.sa.tolist()):
        cur = syms[g:]
        if prev is not None:
            assert b.lcp[r] == naive_lcp_pair(prev, cur)
        prev = cur


@settings(max_examples=60)
@given(st.lists(st.binary(min_size=1, max_size=16), min_size=1, max_size=4))
def test_random_suffix_arrays(docs):
    text = concatenate(ingest(docs))
    b = build_suffix_bundle(text)
    syms = text.symbols.tolist()
    assert b.sa.tolist() == naive_sa(syms)


def test_rank_inverts_sa():
    b = bundle_of([b"mississippi"])
    assert (b.sa[b.rank] == np.arange(b.n)).all()


def test_lce_matches_naive():
    text = concatenate(ingest([b"abaabab", b"baba"]))
    b = build_suffix_bundle(text)
    syms = text.symbols.tolist()
    for i in range(len(syms)):
        for j in range(len(syms)):
            assert b.lce(i, j) == naive_lcp_pair(syms[i:], syms[j:])
    ii, jj = np.meshgrid(np.arange(len(syms)), np.arange(len(syms)))
    got = b.lce_batch(ii.ravel(), jj.ravel())
    want = [naive_lcp_pair(syms[i:], syms[j:])
            for i, j in zip(ii.ravel(), jj.ravel())]
    assert got.tolist() == want


# -- maximal periodic fragments -----------------------------------------

def runs_by_doc(docs):
    text = concatenate(ingest(docs))
    found = {}
    for r in compute_runs(text):
        d = text.doc_of(r.start)
        ds = int(text.doc_start[d])
        found.setdefault(d, set()).add((r.start - ds, r.end - ds, r.period))
    return found


def test_runs_frozen_aabaabaa():
    assert runs_by_doc([b"aabaabaa"])[0] == {
        (0, 1, 1), (3, 4, 1), (6, 7, 1), (0, 7, 3)}


def test_runs_frozen_misc():
    assert runs_by_doc([b"aaaa"])[0] == {(0, 3, 1)}
    assert runs_by_doc([b"abab"])[0] == {(0, 3, 2)}
    assert runs_by_doc([b"abc"]) == {}
    assert runs_by_doc([b"aabbaabb"])[0] == {
        (0, 1, 1), (2, 3, 1), (4, 5, 1), (6, 7, 1), (0, 7, 4)}


def test_runs_do_not_cross_documents():
    found = runs_by_doc([b"aa", b"aa"])
    assert found == {0: {(0, 1, 1)}, 1: {(0, 1, 1)}}


def test_runs_sorted_and_within_bound():
    text = concatenate(ingest([b"abaababaabaab"]))
    runs = compute_runs(text)
    assert runs == sorted(runs)
    assert len(runs) < text.n + 1
    assert all(isinstance(r, Run) for r in runs)


@settings(max_examples=120, deadline=None)
@given(st.lists(st.text(alphabet="ab", min_size=1, max_size=18), min_size=1, max_size=3))
def test_runs_match_oracle(docs):
    docs = [d.encode() for d in docs]
    found = runs_by_doc(docs)
    for d, doc in enumerate(docs):
        want = oracle.oracle_tables(doc).runs
        assert found.get(d, set()) == want


def test_runs_match_oracle_ternary():
    rng = random.Random(31)
    for _ in range(80):
        doc = bytes(rng.choice(b"abc") for _ in range(rng.randint(1, 20)))
        found = runs_by_doc([doc])
        assert found.get(0, set()) == oracle.oracle_tables(doc).runs


# -- factorizations and scans -------------------------------------------

def test_lyndon_factorize_frozen():
    assert lyndon_factorize(b"banana") == [(0, 1), (1, 2), (3, 2), (5, 1)]
    assert lyndon_factorize(b"aaa") == [(0, 1), (1, 1), (2, 1)]
    assert lyndon_factorize(b"ab") == [(0, 2)]
    assert lyndon_factorize(b"") == []


@given(st.binary(min_size=1, max_size=24))
def test_lyndon_factorize_properties(s):
    factors = lyndon_factorize(s)
    assert b"".join(s[a:a + l] for a, l in factors) == s
    words = [s[a:a + l] for a, l in factors]
    for w in words:
        assert oracle.holds("lyn", w)
    # non-increasing factor sequence
    assert all(words[i] >= words[i + 1] for i in range(len(words) - 1))


def test_minimal_suffix_scan_frozen():
    assert minimal_suffix_scan(b"abaab", 0, 4) == [0, 0, 2, 3, 2]


def test_minimal_suffix_scan_matches_brute():
    rng = random.Random(5)
    for _ in range(150):
        s = bytes(rng.choice(b"ab") for _ in range(rng.randint(1, 22)))
        lo = rng.randrange(len(s))
        hi = rng.randrange(lo, len(s))
        got = minimal_suffix_scan(s, lo, hi)
        for off, r in enumerate(range(lo, hi + 1)):
            want = min(range(lo, r + 1), key=lambda b: s[b:r + 1])
            assert s[got[off]:r + 1] == s[want:r + 1]


def test_minimal_suffix_scan_rejects_boundary_crossing():
    text = concatenate(ingest([b"ab", b"cd"]))
    with pytest.raises(RangeCrossesBoundary):
        minimal_suffix_scan(text, 1, 3)
    assert minimal_suffix_scan(text, 3, 4) == [3, 3]


def test_smallest_period():
    assert smallest_period(b"abab") == 2
    assert smallest_period(b"aaa") == 1
    assert smallest_period(b"abc") == 3
    assert smallest_period(b"aabaa") == 3
    with pytest.raises(ValueError):
        smallest_period(b"")


# -- property checks ----------------------------------------------------

def test_normalize_property():
    assert normalize_property("SQF") == "sqf"
    assert normalize_property("palindrome") == "pal"
    with pytest.raises(UnknownProperty):
        normalize_property("bogus")


@pytest.mark.parametrize("prop", oracle.PROPERTIES)
def test_check_property_matches_oracle(prop):
    for n in range(0, 9):
        for w in itertools.product(b"ab", repeat=n):
            s = bytes(w)
            assert check_property(prop, s) == oracle.holds(prop, s), (prop, s)
