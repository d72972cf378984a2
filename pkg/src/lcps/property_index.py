"""Repetition annotations layered onto the suffix tree.

Four structures are built here, all driven by the maximal periodic
fragments of the corpus:

* every distinct square becomes an explicit, flagged node;
* maximal periodic prefixes are marked with their smallest period
  (`ext_period`), inserting an endpoint node where a maximal extension
  stops in the middle of an edge;
* every distinct palindrome becomes an explicit, flagged node, found
  with a palindromic tree per document;
* a per-position square-free horizon: the end of the earliest square
  starting at or after each text position.

Query-time candidate resolution reads the nearest flagged or marked
ancestor of a locus, so each lookup is O(1) after the build.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .corpus import GlobalText
from .gst import (
    FLAG_PALINDROME,
    FLAG_SQUARE,
    KIND_PALINDROME,
    KIND_PERIODIC,
    KIND_SQUARE,
    SuffixTree,
)
from .suffix_core import Run, SuffixBundle, compute_runs

NO_SQUARE = 1 << 62


# -- distinct squares ----------------------------------------------------

def _enumerate_square_occurrences(runs):
    """(global start, length, primitive?, period) arrays, one entry per
    distinct square per containing run.

    A fragment with smallest period p and length ln holds squares of
    length 2mp; the rotations starting at its first min(p, fit) positions
    cover every distinct square of that length inside the fragment.
    """
    arr = np.asarray(runs, dtype=np.int64).reshape(-1, 3)
    s, e, p = arr[:, 0], arr[:, 1], arr[:, 2]
    mmax = (e - s + 1) // (2 * p)
    r1 = np.repeat(np.arange(s.size), mmax)
    off1 = np.concatenate(([0], np.cumsum(mmax)[:-1]))
    m = np.arange(r1.size, dtype=np.int64) - off1[r1] + 1
    length = 2 * m * p[r1]
    cnt = np.minimum(p[r1], e[r1] - s[r1] - length + 2)
    r2 = np.repeat(np.arange(r1.size), cnt)
    off2 = np.concatenate(([0], np.cumsum(cnt)[:-1]))
    i = np.arange(r2.size, dtype=np.int64) - off2[r2]
    g = s[r1][r2] + i
    return g, length[r2], m[r2] == 1, p[r1][r2]


def annotate_squares(tree: SuffixTree, runs) -> list[tuple[int, int]]:
    """Insert and flag every distinct square; return the primitively
    rooted ones as (period, node), sorted by period."""
    if not runs:
        return []
    text = tree.text
    g, length, prim, period = _enumerate_square_occurrences(runs)
    oc = tree.locate_original_batch(g, length)
    key = oc * (int(length.max()) + 1) + length
    uniq, first = np.unique(key, return_index=True)
    # distinct squares per document stay within twice the document length
    dkey = text._doc_of[g].astype(np.int64) * (key.max() + 1) + key
    dof = text._doc_of[g][np.unique(dkey, return_index=True)[1]]
    per_doc = np.bincount(dof, minlength=text.k)
    assert (per_doc <= 2 * text.doc_len).all()

    primitives = []
    for t in first:
        node = tree._insert_at(int(oc[t]), int(length[t]), KIND_SQUARE)
        tree._flags[node] |= FLAG_SQUARE
        if prim[t]:
            primitives.append((int(period[t]), node))
    primitives.sort()
    return primitives


# -- maximal periodic prefixes -------------------------------------------

def annotate_periodic(tree: SuffixTree, primitives) -> None:
    """Mark every locus whose string is periodic, descending from each
    primitively rooted square and extending while the period persists.

    Marks record the smallest period; a node already claimed by a smaller
    period subsumes every extension of a larger one, so claimed subtrees
    are skipped.
    """
    bundle = tree.bundle
    lce = bundle.lce
    ext_period = tree._ext_period
    depth = tree._depth
    pos = tree._pos
    for p, v0 in sorted(primitives):
        assert ext_period[v0] == 0
        ext_period[v0] = p
        stack = [v0]
        while stack:
            v = stack.pop()
            dv = depth[v]
            for c in list(tree.iter_children_build(v)):
                if ext_period[c] != 0:
                    continue
                dc = depth[c]
                gc = pos[c]
                ext = p + lce(gc, gc + p)
                if ext >= dc:
                    ext_period[c] = p
                    stack.append(c)
                elif ext > dv:
                    w = tree._split_edge(c, ext, KIND_PERIODIC)
                    ext_period[w] = p
                # ext == dv: the first fresh symbol already breaks the period


# -- distinct palindromes ------------------------------------------------

def _palindrome_first_occurrences(seq) -> list[tuple[int, int]]:
    """(start, length) of the first occurrence of each distinct palindrome,
    via a palindromic tree built left to right."""
    lens = [-1, 0]
    links = [0, 0]
    trans: list[dict] = [{}, {}]
    firsts = []
    last = 1
    for i, ch in enumerate(seq):
        cur = last
        while True:
            l = lens[cur]
            if i - l - 1 >= 0 and seq[i - l - 1] == ch:
                break
            cur = links[cur]
        nxt = trans[cur].get(ch)
        if nxt is not None:
            last = nxt
            continue
        now = len(lens)
        lens.append(lens[cur] + 2)
        trans.append({})
        if lens[now] == 1:
            links.append(1)
        else:
            tmp = links[cur]
            while True:
                l = lens[tmp]
                if i - l - 1 >= 0 and seq[i - l - 1] == ch:
                    break
                tmp = links[tmp]
            links.append(trans[tmp][ch])
        trans[cur][ch] = now
        firsts.append((i - lens[now] + 1, lens[now]))
        last = now
    return firsts


def annotate_palindromes(tree: SuffixTree) -> int:
    """Insert and flag every distinct palindromic substring; returns how
    many distinct palindromes the corpus has."""
    text = tree.text
    starts, lengths = [], []
    for d in range(text.k):
        ds = int(text.doc_start[d])
        ln = int(text.doc_len[d])
        seq = text.symbols[ds:ds + ln].tolist()
        firsts = _palindrome_first_occurrences(seq)
        assert len(firsts) <= ln
        for st, l in firsts:
            starts.append(ds + st)
            lengths.append(l)
    if not starts:
        return 0
    g = np.asarray(starts, dtype=np.int64)
    length = np.asarray(lengths, dtype=np.int64)
    oc = tree.locate_original_batch(g, length)
    key = oc * (int(length.max()) + 1) + length
    _, first = np.unique(key, return_index=True)
    for t in first:
        node = tree._insert_at(int(oc[t]), int(length[t]), KIND_PALINDROME)
        tree._flags[node] |= FLAG_PALINDROME
    return len(first)


# -- nearest-marked ancestors --------------------------------------------

@njit(cache=True)
def _nearest_kernel(order_asc, parent, marked, out):
    for t in range(order_asc.size):
        v = order_asc[t]
        if marked[v]:
            out[v] = v
        elif v == 0:
            out[v] = -1
        else:
            out[v] = out[parent[v]]


def finalize_nearest(tree: SuffixTree) -> None:
    tree.freeze()
    count = tree.count
    parent = np.frombuffer(tree._parent, dtype=np.int32)
    depth = np.frombuffer(tree._depth, dtype=np.int32)
    order = np.argsort(depth, kind="stable").astype(np.int64)
    flags = np.frombuffer(tree._flags, dtype=np.uint8)
    ext = np.frombuffer(tree._ext_period, dtype=np.int32)

    def run(marked):
        out = np.full(count, -1, dtype=np.int32)
        _nearest_kernel(order, parent, marked, out)
        return out

    tree.nearest_square = run((flags & FLAG_SQUARE) != 0)
    tree.nearest_palindrome = run((flags & FLAG_PALINDROME) != 0)
    tree.nearest_periodic = run(ext != 0)


# -- square-free horizon -------------------------------------------------

@njit(cache=True)
def _find_next(nxt, x):
    r = x
    while nxt[r] != r:
        r = nxt[r]
    while nxt[x] != r:
        nxt[x], x = r, nxt[x]
    return r


@njit(cache=True)
def _paint_kernel(s, e, p, nxt, min_end):
    for t in range(s.size):
        last = e[t] - 2 * p[t] + 1
        j = _find_next(nxt, s[t])
        while j <= last:
            min_end[j] = j + 2 * p[t] - 1
            nxt[j] = j + 1
            j = _find_next(nxt, j + 1)


def squarefree_horizon(text: GlobalText, runs) -> np.ndarray:
    """h[g] = inclusive end of the earliest-ending square starting at or
    after g inside g's document (NO_SQUARE when none exists).

    The shortest square at a fixed start is primitively rooted, so
    painting fragment starts in ascending period order fills each
    position with its minimum exactly once.
    """
    total = len(text.symbols)
    min_end = np.full(total, NO_SQUARE, dtype=np.int64)
    if runs:
        arr = np.asarray(runs, dtype=np.int64).reshape(-1, 3)
        order = np.argsort(arr[:, 2], kind="stable")
        arr = arr[order]
        nxt = np.arange(total + 1, dtype=np.int64)
        _paint_kernel(arr[:, 0], arr[:, 1], arr[:, 2], nxt, min_end)
    for d in range(text.k):
        ds = int(text.doc_start[d])
        send = int(text.sentinel_pos[d])
        seg = min_end[ds:send][::-1]
        np.minimum.accumulate(seg, out=seg)
    return min_end


# -- assembled index -----------------------------------------------------

class PropertyIndex:
    """Candidate lengths for the longest property-holding prefix of a
    matched locus string."""

    def __init__(self, text: GlobalText, bundle: SuffixBundle,
                 tree: SuffixTree, runs: list[Run] | None = None):
        if runs is None:
            runs = compute_runs(text, bundle)
        self.text = text
        self.tree = tree
        self.primitive_squares = annotate_squares(tree, runs)
        self.square_count = len(self.primitive_squares)
        annotate_periodic(tree, self.primitive_squares)
        self.palindrome_count = annotate_palindromes(tree)
        finalize_nearest(tree)
        self.h_end = squarefree_horizon(text, runs)
        for kinds in tree.edge_inserted.values():
            assert kinds.get(KIND_SQUARE, 0) <= 2
            assert kinds.get(KIND_PALINDROME, 0) <= 1

    def _effective(self, node: int, d: int) -> int:
        tree = self.tree
        return node if tree._depth[node] == d else tree._parent[node]

    def candidate_squarefree(self, node: int, d: int) -> int:
        if d <= 0:
            return 0
        g = self.tree._pos[node]
        return int(min(self.h_end[g] - g, d))

    def candidate_square(self, node: int, d: int) -> int:
        if d <= 0:
            return 0
        u = self._effective(node, d)
        nv = self.tree.nearest_square[u]
        return int(self.tree._depth[nv]) if nv >= 0 else 0

    def candidate_palindrome(self, node: int, d: int) -> int:
        if d <= 0:
            return 0
        u = self._effective(node, d)
        nv = self.tree.nearest_palindrome[u]
        return int(self.tree._depth[nv]) if nv >= 0 else 0

    def candidate_periodic(self, node: int, d: int) -> int:
        if d <= 0:
            return 0
        tree = self.tree
        if tree._depth[node] != d:
            u = tree._parent[node]
            pu = tree._ext_period[u]
            if pu != 0 and pu == tree._ext_period[node]:
                # the whole edge sits inside one maximal periodic extension
                return d
        else:
            u = node
        nv = tree.nearest_periodic[u]
        return int(tree._depth[nv]) if nv >= 0 else 0

    def candidate(self, prop: str, node: int, d: int) -> int:
        return self._DISPATCH[prop](self, node, d)

    _DISPATCH = {
        "sqf": candidate_squarefree,
        "sqr": candidate_square,
        "pal": candidate_palindrome,
        "per": candidate_periodic,
    }


def build_property_index(text: GlobalText, bundle: SuffixBundle,
                         tree: SuffixTree,
                         runs: list[Run] | None = None) -> PropertyIndex:
    return PropertyIndex(text, bundle, tree, runs)
