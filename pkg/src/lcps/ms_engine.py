"""Threshold-filtered matching statistics over the suffix tree.

The cursor consumes one symbol of the pattern at a time and maintains the
locus of the longest suffix of the consumed stream that occurs in at
least `k` documents.  Edges whose child-side node has a document count
below the threshold are treated as absent, which is exactly a walk of the
tree pruned to the >= k nodes.

When a symbol cannot extend the current window, the cursor emits the
match for the window's start and hops to the next start via a suffix
link: climb to the nearest linked ancestor (inserted nodes carry no
link, and only a bounded handful of them sit on any edge), follow the
link, then re-descend the already-matched symbols edge by edge.  The
re-descent skips the threshold filter: every node it passes corresponds
to a prefix of a string already known to clear the threshold.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple

from .gst import SuffixTree

# inserted nodes never stack more than a few deep on one original edge
CLIMB_CAP = 8


class InvalidThreshold(ValueError):
    """Document threshold outside 1..k."""


class Emission(NamedTuple):
    """Longest >= k-document match for one start position of the pattern.

    `node` is the child-side locus node: the matched string is the
    length-`length` prefix of str(node).  Length 0 parks at the root.
    """
    start: int
    length: int
    node: int


class MSCursor:
    def __init__(self, tree: SuffixTree, k: int):
        if not (1 <= k <= tree.text.k):
            raise InvalidThreshold(
                f"threshold {k} outside 1..{tree.text.k}")
        tree.freeze()
        self.tree = tree
        self.k = k
        self.i = 0      # current window start
        self.d = 0      # matched length; window is stream[i : i+d]
        self.c = 0      # child-side locus node
        self.fed = 0
        self._sym: list[int | None] = []

    def feed(self, sym: int | None) -> list[Emission]:
        """Consume one mapped symbol (None = outside the corpus alphabet).

        Returns the emissions this symbol settled: one per start position
        whose longest match ends just before this symbol.
        """
        tree = self.tree
        depth = tree._depth
        out = []
        self._sym.append(sym)
        while True:
            if sym is not None:
                if self.d < depth[self.c]:
                    t = int(tree.bundle.symbols[tree._pos[self.c] + self.d])
                    if t == sym:
                        self.d += 1
                        break
                else:
                    ch = tree.child(self.c, sym)
                    if ch >= 0 and tree._doc_count[ch] >= self.k:
                        self.c = ch
                        self.d += 1
                        break
            out.append(Emission(self.i, self.d, self.c))
            if self.d == 0:
                self.i += 1
                break
            self._suffix_jump()
        self.fed += 1
        return out

    def finish(self) -> list[Emission]:
        """Emit the still-open starts once the pattern ends."""
        out = []
        while self.i < self.fed:
            out.append(Emission(self.i, self.d, self.c))
            self._suffix_jump()
        return out

    def _suffix_jump(self):
        """Move from the window at `i` to the window at `i + 1`."""
        tree = self.tree
        depth = tree._depth
        i = self.i
        target = self.d - 1
        self.i = i + 1
        self.d = target
        if target == 0:
            self.c = 0
            return
        v = self.c if depth[self.c] == target + 1 else tree._parent[self.c]
        climbs = 0
        while v != 0 and tree._slink[v] < 0:
            v = tree._parent[v]
            climbs += 1
            assert climbs <= CLIMB_CAP
        u = tree._slink[v] if v != 0 else 0
        cur = int(depth[u])
        c = u
        while cur < target:
            c = tree.child(c, self._sym[i + 1 + cur])
            assert c >= 0
            cur = min(int(depth[c]), target)
        self.c = c


def open_cursor(tree: SuffixTree, k: int) -> MSCursor:
    return MSCursor(tree, k)


def matching_statistics(tree: SuffixTree, k: int,
                        symbols: Iterable[int | None]) -> list[int]:
    """ms[i] = longest prefix of pattern[i:] occurring in >= k documents."""
    cursor = open_cursor(tree, k)
    ms = []
    for s in symbols:
        ms.append(0)
        for em in cursor.feed(s):
            ms[em.start] = em.length
    for em in cursor.finish():
        ms[em.start] = em.length
    return ms
