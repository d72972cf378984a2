"""Longest property-bounded substring queries.

Streams the pattern through the threshold-filtered matching-statistics
cursor; each emission pins down the longest window starting at one
pattern position that occurs in enough documents, and the property
annotations resolve the longest qualifying prefix of that window in
constant time.  Lyndon queries are the exception: the qualifying
substring is a suffix of some window rather than a prefix, so each
emission runs the amortized minimal-suffix scan over its window and only
window ends not seen before are evaluated.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple

from .index import CorpusIndex
from .ms_engine import Emission, InvalidThreshold, open_cursor
from .suffix_core import minimal_suffix_scan, normalize_property


class QueryResult(NamedTuple):
    property: str
    threshold: int
    length: int
    start_in_y: int     # 1-based position in the pattern, 0 when empty
    substring: bytes
    witness_doc: int    # 1-based document id, 0 when empty
    witness_pos: int    # 1-based position inside the witness document
    docs_matched: int


class _Best(NamedTuple):
    length: int
    start: int   # 0-based start in the pattern
    occ: int     # global position of one corpus occurrence


_EMPTY = _Best(0, 0, -1)


def _fold(index: CorpusIndex, prop: str, emissions: Iterable[Emission],
          y_sym) -> _Best:
    """Reduce the emission stream to the best qualifying substring."""
    props = index.props
    pos = index.tree._pos
    best = _EMPTY
    if prop != "lyn":
        for em in emissions:
            if em.length <= best.length:
                continue
            c = props.candidate(prop, em.node, em.length)
            if c > best.length:
                best = _Best(c, em.start, int(pos[em.node]))
        return best
    # Lyndon: longest Lyndon suffix of y[i..j] = minimal suffix of the
    # window; every window end is evaluated exactly once, at the emission
    # with the leftmost start that reaches it.
    done = 0   # exclusive end of the last evaluated window
    for em in emissions:
        end = em.start + em.length
        if end <= done:
            continue
        ans = minimal_suffix_scan(y_sym, em.start, end - 1)
        for j in range(max(done, em.start), end):
            mu = ans[j - em.start]
            length = j - mu + 1
            if length > best.length:
                best = _Best(length, mu,
                             int(pos[em.node]) + (mu - em.start))
        done = end
    return best


def _assemble(index: CorpusIndex, prop: str, k: int, best: _Best,
              substring_of) -> QueryResult:
    if best.length == 0:
        return QueryResult(prop, k, 0, 0, b"", 0, 0, 0)
    text = index.text
    tree = index.tree
    g = best.occ
    node = tree.locate_depth(int(tree.leaf_of[g]), best.length)
    return QueryResult(
        property=prop,
        threshold=k,
        length=best.length,
        start_in_y=best.start + 1,
        substring=substring_of(best.start, best.length),
        witness_doc=text.doc_of(g) + 1,
        witness_pos=text.local_of(g),
        docs_matched=int(tree._doc_count[node]),
    )


def query(index: CorpusIndex, y: bytes, k: int, prop: str) -> QueryResult:
    """Longest substring of y holding `prop` and occurring in >= k docs."""
    prop = normalize_property(prop)
    y_sym = [index.corpus.map_symbol(b) for b in y]
    cursor = open_cursor(index.tree, k)

    def stream():
        for s in y_sym:
            yield from cursor.feed(s)
        yield from cursor.finish()

    best = _fold(index, prop, stream(), y_sym)
    return _assemble(index, prop, k, best, lambda s, n: y[s:s + n])


def _offline_emissions(index: CorpusIndex, k: int):
    """Matching statistics of the corpus against itself.

    The virtual pattern is the documents joined by out-of-alphabet
    separators, which lines its positions up with the global text; the
    walk needs no per-symbol child searches because every nonempty window
    is a substring of the corpus, so the next node down is always an
    ancestor of the leaf for the window's own start position.
    """
    tree = index.tree
    text = index.text
    tree.freeze()
    depth = tree._depth
    parent = tree._parent
    dcount = tree._doc_count
    tpos = tree._pos
    slink = tree._slink
    leaf_of = tree.leaf_of
    sym = text.symbols
    limit = len(sym) - 1   # the final sentinel is not a pattern position
    i = 0
    d = 0
    c = 0

    def jump():
        nonlocal i, d, c
        target = d - 1
        i += 1
        d = target
        if target == 0:
            c = 0
            return
        v = c if depth[c] == target + 1 else parent[c]
        while v != 0 and slink[v] < 0:
            v = parent[v]
        u = int(slink[v]) if v != 0 else 0
        c = u
        cur = int(depth[u])
        while cur < target:
            c = tree.level_ancestor(int(leaf_of[i]), tree.node_depth(c) + 1)
            cur = min(int(depth[c]), target)

    for fed in range(limit):
        s = None if text.is_sentinel(fed) else int(sym[fed])
        while True:
            if s is not None:
                if d < depth[c]:
                    if int(sym[tpos[c] + d]) == s:
                        d += 1
                        break
                else:
                    nxt = tree.level_ancestor(int(leaf_of[i]),
                                              tree.node_depth(c) + 1)
                    if dcount[nxt] >= k:
                        c = nxt
                        d += 1
                        break
            yield Emission(i, d, c)
            if d == 0:
                i += 1
                break
            jump()
    while i < limit:
        yield Emission(i, d, c)
        jump()


def self_query(index: CorpusIndex, k: int, prop: str) -> QueryResult:
    """Longest property-holding string occurring in >= k of the documents.

    Equivalent to querying the documents joined by separator symbols that
    occur nowhere; `start_in_y` refers to a position in that virtual
    pattern (1-based, separators included).
    """
    prop = normalize_property(prop)
    if not (1 <= k <= index.corpus.k):
        raise InvalidThreshold(f"threshold {k} outside 1..{index.corpus.k}")
    text = index.text

    best = _fold(index, prop, _offline_emissions(index, k), text.symbols)

    def substring_of(s, n):
        return index.corpus.decode(text.symbols[s:s + n])

    return _assemble(index, prop, k, best, substring_of)
