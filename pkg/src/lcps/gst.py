"""Generalized suffix tree over the concatenated corpus text.

The tree is stored as parallel arrays indexed by node id.  It is built
from the suffix array + LCP array with a single stack pass; every leaf is
truncated at its document's sentinel, which is equivalent to pruning all
edges below sentinels because the distinct sentinels already break every
comparison between suffixes.

Node 0 is the root.  `pos[v]` is the global start of one occurrence of
str(v) (the leftmost leaf of the subtree, i.e. the smallest suffix-array
rank), so the edge into v is text[pos[v] + depth[parent[v]] : pos[v] +
depth[v]].

Property builders later make implicit loci explicit with `insert_locus`;
inserted nodes carry no suffix link and inherit the child-side document
count, which is exact because an implicit locus occurs in exactly the
same documents as its child-side node.
"""
from __future__ import annotations

import bisect
from array import array
from dataclasses import dataclass

import numpy as np
from numba import njit

from .corpus import GlobalText
from .suffix_core import SuffixBundle

assert array("i").itemsize == 4

FLAG_SQUARE = 1
FLAG_PALINDROME = 2

KIND_SQUARE = "sqr"
KIND_PALINDROME = "pal"
KIND_PERIODIC = "per"


class InvalidOccurrence(ValueError):
    """An (doc, start, length) occurrence lies outside its document."""


@dataclass(frozen=True)
class Locus:
    """A position on the tree: `offset_above` symbols above explicit `node`."""
    node: int
    offset_above: int = 0

    @property
    def explicit(self) -> bool:
        return self.offset_above == 0


@njit(cache=True)
def _tree_kernel(sa, lcp, suf_len):
    n = sa.size
    cap = 2 * n + 2
    parent = np.full(cap, -1, dtype=np.int32)
    depth = np.zeros(cap, dtype=np.int64)
    pos = np.zeros(cap, dtype=np.int64)
    first_child = np.full(cap, -1, dtype=np.int32)
    next_sib = np.full(cap, -1, dtype=np.int32)
    step_parent = np.zeros(n, dtype=np.int32)
    leaf_of = np.zeros(n, dtype=np.int32)
    stack = np.zeros(n + 2, dtype=np.int32)
    top = 0
    count = 1
    for r in range(n):
        g = sa[r]
        l = lcp[r]
        last = -1
        while depth[stack[top]] > l:
            last = stack[top]
            top -= 1
        u = stack[top]
        if depth[u] == l:
            att = u
        else:
            # split: new node at depth l takes over the popped child
            mid = count
            count += 1
            depth[mid] = l
            pos[mid] = pos[last]
            parent[mid] = u
            if first_child[u] != last:
                raise RuntimeError("rightmost spine invariant broken")
            next_sib[mid] = next_sib[last]
            first_child[u] = mid
            parent[last] = mid
            first_child[mid] = last
            next_sib[last] = -1
            top += 1
            stack[top] = mid
            att = mid
        leaf = count
        count += 1
        depth[leaf] = suf_len[g]
        pos[leaf] = g
        parent[leaf] = att
        next_sib[leaf] = first_child[att]
        first_child[att] = leaf
        leaf_of[g] = leaf
        step_parent[r] = att
        top += 1
        stack[top] = leaf
    return count, parent, depth, pos, first_child, next_sib, step_parent, leaf_of


@njit(cache=True)
def _pull_minmax(order, parent, lmin, lmax):
    for t in range(order.size):
        v = order[t]
        p = parent[v]
        if p >= 0:
            if lmin[v] < lmin[p]:
                lmin[p] = lmin[v]
            if lmax[v] > lmax[p]:
                lmax[p] = lmax[v]


@njit(cache=True)
def _pull_sum(order, parent, acc):
    for t in range(order.size):
        v = order[t]
        p = parent[v]
        if p >= 0:
            acc[p] += acc[v]


@njit(cache=True)
def _hops(order_asc, parent, out):
    for t in range(order_asc.size):
        v = order_asc[t]
        p = parent[v]
        if p >= 0:
            out[v] = out[p] + 1


class SuffixTree:
    def __init__(self, text: GlobalText, bundle: SuffixBundle):
        self.text = text
        self.bundle = bundle
        symbols = bundle.symbols
        n = symbols.size
        doc = text._doc_of.astype(np.int64)
        suf_len = text.sentinel_pos[doc] - np.arange(n, dtype=np.int64) + 1
        count, parent, depth, pos, first_child, next_sib, step_parent, leaf_of = \
            _tree_kernel(bundle.sa, bundle.lcp, suf_len)
        self.orig_count = count
        self._parent = array("i", parent[:count].astype(np.int32).tobytes())
        self._depth = array("i", depth[:count].astype(np.int32).tobytes())
        self._pos = array("i", pos[:count].astype(np.int32).tobytes())
        self._first_child = array("i", first_child[:count].astype(np.int32).tobytes())
        self._next_sib = array("i", next_sib[:count].astype(np.int32).tobytes())
        self._step_parent = step_parent
        self.leaf_of = leaf_of
        self._slink = array("i", b"")
        self._doc_count = array("i", bytes(4 * count))
        self._flags = bytearray(count)
        self._ext_period = array("i", bytes(4 * count))
        # original-topology snapshot for weighted ancestor jumps
        self._oparent = parent[:count].copy()
        self._oparent[0] = 0
        self._odepth = depth[:count].copy()
        self._build_suffix_links()
        self._lift = None
        self._final_lift = None
        self._node_depth = None
        self._dirty = True
        self.child_lookups = 0
        self._orig_child: dict[int, int] = {}
        self.edge_inserted: dict[int, dict[str, int]] = {}
        self.nearest_square = None
        self.nearest_palindrome = None
        self.nearest_periodic = None

    # -- array views -------------------------------------------------

    def _np(self, arr) -> np.ndarray:
        return np.frombuffer(arr, dtype=np.int32)

    @property
    def count(self) -> int:
        return len(self._parent)

    def parent(self, v: int) -> int:
        return self._parent[v]

    def depth(self, v: int) -> int:
        return self._depth[v]

    def pos(self, v: int) -> int:
        return self._pos[v]

    def suffix_link(self, v: int) -> int:
        return self._slink[v]

    def doc_count(self, v: int) -> int:
        return self._doc_count[v]

    def is_leaf(self, v: int) -> bool:
        return self._first_child[v] < 0

    def edge_range(self, v: int) -> tuple[int, int]:
        lo = self._pos[v] + self._depth[self._parent[v]]
        return lo, self._pos[v] + self._depth[v]

    def node_string(self, v: int) -> list[int]:
        p = self._pos[v]
        return self.bundle.symbols[p:p + self._depth[v]].tolist()

    def iter_children_build(self, v: int):
        c = self._first_child[v]
        while c >= 0:
            yield c
            c = self._next_sib[c]

    # -- construction ------------------------------------------------

    def _build_suffix_links(self):
        count = self.orig_count
        n = self.bundle.n
        parent = np.frombuffer(self._parent, dtype=np.int32).astype(np.int64)
        depth = self._odepth
        slink = np.full(count, -1, dtype=np.int32)
        first_child = np.frombuffer(self._first_child, dtype=np.int32)
        # leaves link to the leaf of the next position (sentinel leaves to root)
        sent = np.zeros(n, dtype=bool)
        sent[self.text.sentinel_pos] = True
        pos_ids = np.arange(n, dtype=np.int64)
        leaf_ids = self.leaf_of
        slink[leaf_ids[sent]] = 0
        inner = ~sent
        slink[leaf_ids[inner]] = leaf_ids[pos_ids[inner] + 1]
        # internal nodes: LCA of the two edge leaves shifted by one symbol
        lmin = np.full(count, n + 1, dtype=np.int64)
        lmax = np.full(count, -1, dtype=np.int64)
        ranks = np.arange(n, dtype=np.int64)
        lmin[leaf_ids[self.bundle.sa]] = ranks
        lmax[leaf_ids[self.bundle.sa]] = ranks
        order = np.argsort(depth, kind="stable")[::-1].copy()
        _pull_minmax(order, parent, lmin, lmax)
        self._lmin = lmin
        internal = (first_child >= 0)
        internal[0] = False
        ids = np.nonzero(internal)[0]
        if ids.size:
            g1 = self.bundle.sa[lmin[ids]] + 1
            g2 = self.bundle.sa[lmax[ids]] + 1
            a = self.bundle.rank[g1]
            b = self.bundle.rank[g2]
            lo = np.minimum(a, b) + 1
            hi = np.maximum(a, b)
            t = self.bundle.argmin_batch(lo, hi)
            slink[ids] = self._step_parent[t]
        slink[0] = -1
        self._slink = array("i", slink.tobytes())
        self._order_desc = order

    def _ensure_lift(self):
        if self._lift is not None:
            return
        count = self.orig_count
        levels = max(1, count.bit_length())
        lift = np.empty((levels, count), dtype=np.int32)
        lift[0] = self._oparent
        for j in range(1, levels):
            lift[j] = lift[j - 1][lift[j - 1]]
        self._lift = lift

    # -- queries on structure ----------------------------------------

    def freeze(self):
        """Rebuild the sorted-children table after insertions."""
        if not self._dirty:
            return
        count = self.count
        parent = self._np(self._parent).astype(np.int64)
        depth = self._np(self._depth).astype(np.int64)
        pos = self._np(self._pos).astype(np.int64)
        symbols = self.bundle.symbols
        ids = np.arange(1, count, dtype=np.int64)
        fsym = symbols[pos[ids] + depth[parent[ids]]]
        order = np.lexsort((fsym, parent[ids]))
        counts = np.bincount(parent[ids], minlength=count)
        off = np.zeros(count + 1, dtype=np.int64)
        np.cumsum(counts, out=off[1:])
        self._child_off = array("q", off.tobytes())
        self._child_sym = array("i", fsym[order].astype(np.int32).tobytes())
        self._child_id = array("i", ids[order].astype(np.int32).tobytes())
        nd = np.zeros(count, dtype=np.int32)
        order_asc = np.argsort(depth, kind="stable").copy()
        _hops(order_asc, parent.astype(np.int32), nd)
        self._node_depth = nd
        self._final_lift = None
        self._dirty = False

    def child(self, u: int, sym: int) -> int:
        """Child of u whose edge starts with sym, or -1.  O(log sigma)."""
        if self._dirty:
            self.freeze()
        self.child_lookups += 1
        lo = self._child_off[u]
        hi = self._child_off[u + 1]
        i = bisect.bisect_left(self._child_sym, sym, lo, hi)
        if i < hi and self._child_sym[i] == sym:
            return self._child_id[i]
        return -1

    def child_with_edge(self, u: int, sym: int):
        c = self.child(u, sym)
        if c < 0:
            return None
        return c, self.edge_range(c)

    def children(self, u: int) -> list[int]:
        if self._dirty:
            self.freeze()
        return list(self._child_id[self._child_off[u]:self._child_off[u + 1]])

    def node_depth(self, v: int) -> int:
        if self._dirty:
            self.freeze()
        return int(self._node_depth[v])

    def _ensure_final_lift(self):
        if self._dirty:
            self.freeze()
        if self._final_lift is not None:
            return
        count = self.count
        levels = max(1, int(self._node_depth.max()) + 1).bit_length()
        parent = self._np(self._parent).copy()
        parent[0] = 0
        lift = np.empty((max(levels, 1), count), dtype=np.int32)
        lift[0] = parent
        for j in range(1, lift.shape[0]):
            lift[j] = lift[j - 1][lift[j - 1]]
        self._final_lift = lift

    def level_ancestor(self, v: int, target: int) -> int:
        """Ancestor of v at node-depth `target` (0 = root)."""
        self._ensure_final_lift()
        delta = int(self._node_depth[v]) - target
        if delta < 0:
            raise ValueError("target node depth below the node")
        j = 0
        while delta:
            if delta & 1:
                v = int(self._final_lift[j, v])
            delta >>= 1
            j += 1
        return v

    def locate_depth(self, leaf: int, target: int) -> int:
        """Child-side node of the locus at string depth `target` above `leaf`.

        Jumps through the original-topology lifting table, then walks the
        handful of inserted nodes on the original edge.
        """
        if target <= 0:
            return 0
        self._ensure_lift()
        x = leaf
        lift = self._lift
        odepth = self._odepth
        for j in range(lift.shape[0] - 1, -1, -1):
            up = lift[j, x]
            if odepth[up] >= target:
                x = int(up)
        # refine through inserted nodes on the current edge
        c = x
        p = self._parent[c]
        while self._depth[p] >= target:
            c = p
            p = self._parent[c]
        return c

    def locate_original_batch(self, g, length) -> np.ndarray:
        """Original-topology child-side nodes above the leaves at `g`,
        at string depth >= length with the original parent shallower."""
        self._ensure_lift()
        x = self.leaf_of[np.asarray(g, dtype=np.int64)].astype(np.int64)
        length = np.asarray(length, dtype=np.int64)
        lift = self._lift
        odepth = self._odepth
        for j in range(lift.shape[0] - 1, -1, -1):
            up = lift[j][x]
            mask = odepth[up] >= length
            x[mask] = up[mask]
        return x

    def _insert_at(self, c: int, length: int, kind: str | None) -> int:
        """Finish an insertion below original child-side node c."""
        p = self._parent[c]
        while self._depth[p] >= length:
            c = p
            p = self._parent[c]
        if self._depth[c] == length:
            return c
        return self._split_edge(c, length, kind)

    def insert_locus(self, doc: int, start0: int, length: int,
                     kind: str | None = None) -> int:
        """Make the locus of x_doc[start0 : start0+length] explicit; idempotent."""
        text = self.text
        if not (0 <= doc < text.k):
            raise InvalidOccurrence(f"document {doc} out of range")
        if length < 1 or start0 < 0 or start0 + length > int(text.doc_len[doc]):
            raise InvalidOccurrence(
                f"occurrence ({doc}, {start0}, {length}) outside document")
        g = text.global_pos(doc, start0)
        leaf = int(self.leaf_of[g])
        c = self.locate_depth(leaf, length)
        if self._depth[c] == length:
            return c
        return self._split_edge(c, length, kind)

    def _split_edge(self, c: int, target: int, kind: str | None = None) -> int:
        """Insert a node at string depth `target` on the edge into c."""
        u = self._parent[c]
        assert self._depth[u] < target < self._depth[c]
        w = self.count
        self._parent.append(u)
        self._depth.append(target)
        self._pos.append(self._pos[c])
        self._slink.append(-1)
        self._doc_count.append(self._doc_count[c])
        self._flags.append(0)
        pu, pc = self._ext_period[u], self._ext_period[c]
        self._ext_period.append(pu if pu != 0 and pu == pc else 0)
        # unlink c from u's sibling list, link w in its place
        self._first_child.append(c)
        self._next_sib.append(-1)
        prev = -1
        x = self._first_child[u]
        while x != c:
            prev = x
            x = self._next_sib[x]
        if prev < 0:
            self._first_child[u] = w
        else:
            self._next_sib[prev] = w
        self._next_sib[w] = self._next_sib[c]
        self._parent[c] = w
        self._next_sib[c] = -1
        orig = self._orig_child.get(c, c)
        self._orig_child[w] = orig
        if kind is not None:
            per_edge = self.edge_inserted.setdefault(orig, {})
            per_edge[kind] = per_edge.get(kind, 0) + 1
        self._dirty = True
        return w

    def occurrence_at(self, locus: Locus) -> tuple[int, int, int]:
        """Witness (doc, 0-based start, length) for the locus string."""
        depth = self._depth[locus.node] - locus.offset_above
        g = self._pos[locus.node]
        text = self.text
        d = text.doc_of(g)
        return d, g - int(text.doc_start[d]), depth


def build_gst(text: GlobalText, bundle: SuffixBundle | None = None) -> SuffixTree:
    if bundle is None:
        bundle = SuffixBundle(text.symbols)
    return SuffixTree(text, bundle)


def compute_doc_counts(tree: SuffixTree, bundle: SuffixBundle | None = None) -> None:
    """Number of distinct documents below every node (Hui's counting).

    Per document, each pair of rank-adjacent leaves contributes a -1
    correction at its LCA; the document count is then the subtree sum of
    (leaf indicator + corrections).  The LCA of two leaf ranks is the
    stack-parent node recorded at the rank of the minimal LCP between them.
    """
    if bundle is None:
        bundle = tree.bundle
    text = tree.text
    count = tree.count
    acc = np.zeros(count, dtype=np.int64)
    leaf_ids = tree.leaf_of
    acc[leaf_ids] = 1
    for d in range(text.k):
        ds = int(text.doc_start[d])
        de = int(text.sentinel_pos[d])
        rr = np.sort(bundle.rank[ds:de + 1])
        if rr.size > 1:
            lca = tree._step_parent[bundle.argmin_batch(rr[:-1] + 1, rr[1:])]
            np.add.at(acc, lca, -1)
    parent = np.frombuffer(tree._parent, dtype=np.int32).astype(np.int64)
    depth = np.frombuffer(tree._depth, dtype=np.int32).astype(np.int64)
    order = np.argsort(depth, kind="stable")[::-1].copy()
    _pull_sum(order, parent, acc)
    assert acc[0] == text.k
    tree._doc_count = array("i", acc.astype(np.int32).tobytes())
