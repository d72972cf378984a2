"""Binary serialization of a built index.

Layout (all integers little-endian):

    magic "LCPS", version u8, annotation bits u8, reserved u16
    sigma u64, documents u64, total length u64, nodes u64,
    primitive squares u64, palindromes u64
    alphabet table: sigma bytes, byte value of each internal symbol
    document table: per document u64 name length, utf-8 name, u64 length
    document payload bytes
    node arrays: parent, depth, pos, suffix link, doc count,
        smallest-period mark (all i32), flag byte, then the three
        nearest-marked-ancestor arrays (i32)
    square horizon: per global position i64
    crc32 u32 over everything above

Children tables, leaf lookup and ancestor-jump tables are cheap to
rebuild from the node arrays, so they are not stored.  The document
payload is stored because queries compare pattern symbols against edge
text and decode answers back to bytes.
"""
from __future__ import annotations

import struct
import zlib
from array import array

import numpy as np

from .corpus import concatenate, ingest
from .gst import SuffixTree
from .index import CorpusIndex
from .property_index import PropertyIndex

MAGIC = b"LCPS"
VERSION = 1
ANNOTATIONS = 0b1111   # squares, palindromes, periodic, square horizon

_HEADER = struct.Struct("<4sBBHQQQQQQ")


class IndexFormatError(Exception):
    """The file is not a readable index of a supported version."""


def save_index(index: CorpusIndex, path) -> int:
    tree = index.tree
    if tree.nearest_square is None:
        raise ValueError("index is missing property annotations")
    tree.freeze()
    count = tree.count
    total = len(index.text)
    if total + 1 >= 1 << 31:
        raise ValueError("corpus too large for the 32-bit node layout")

    chunks = [_HEADER.pack(MAGIC, VERSION, ANNOTATIONS, 0,
                           index.corpus.sigma, index.corpus.k,
                           index.corpus.n, count,
                           index.props.square_count,
                           index.props.palindrome_count)]
    chunks.append(index.corpus.byte_of)
    for doc in index.corpus.documents:
        name = doc.name.encode("utf-8")
        chunks.append(struct.pack("<Q", len(name)))
        chunks.append(name)
        chunks.append(struct.pack("<Q", len(doc.content)))
    for doc in index.corpus.documents:
        chunks.append(doc.content)
    for arr in (tree._parent, tree._depth, tree._pos, tree._slink,
                tree._doc_count, tree._ext_period):
        chunks.append(arr.tobytes())
    chunks.append(bytes(tree._flags))
    for arr in (tree.nearest_square, tree.nearest_palindrome,
                tree.nearest_periodic):
        chunks.append(np.ascontiguousarray(arr, dtype=np.int32).tobytes())
    chunks.append(np.ascontiguousarray(index.props.h_end,
                                       dtype=np.int64).tobytes())

    crc = 0
    for c in chunks:
        crc = zlib.crc32(c, crc)
    chunks.append(struct.pack("<I", crc))
    with open(path, "wb") as fh:
        written = sum(fh.write(c) for c in chunks)
    return written


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.off = 0

    def take(self, n: int) -> bytes:
        if self.off + n > len(self.blob):
            raise IndexFormatError("file truncated")
        out = self.blob[self.off:self.off + n]
        self.off += n
        return out

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def ints(self, n: int, dtype) -> np.ndarray:
        raw = self.take(n * np.dtype(dtype).itemsize)
        return np.frombuffer(raw, dtype=dtype)


def load_index(path) -> CorpusIndex:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size + 4:
        raise IndexFormatError("file truncated")
    stored = struct.unpack("<I", blob[-4:])[0]
    if zlib.crc32(blob[:-4]) != stored:
        raise IndexFormatError("checksum mismatch")
    r = _Reader(blob[:-4])
    magic, version, annotations, _, sigma, k, n, count, nsq, npal = \
        _HEADER.unpack(r.take(_HEADER.size))
    if magic != MAGIC:
        raise IndexFormatError("not an index file")
    if version != VERSION:
        raise IndexFormatError(f"unsupported format version {version}")
    if annotations != ANNOTATIONS:
        raise IndexFormatError("index is missing required annotations")

    alphabet = r.take(sigma)
    metas = []
    for _ in range(k):
        name = r.take(r.u64()).decode("utf-8")
        metas.append((name, r.u64()))
    docs = [(name, bytes(r.take(length))) for name, length in metas]

    try:
        corpus = ingest(docs)
    except ValueError as exc:
        raise IndexFormatError(f"bad document table: {exc}") from exc
    if corpus.sigma != sigma or corpus.byte_of != alphabet or corpus.n != n:
        raise IndexFormatError("alphabet table disagrees with the payload")
    text = concatenate(corpus)
    total = len(text)

    parent = r.ints(count, np.int32)
    depth = r.ints(count, np.int32)
    pos = r.ints(count, np.int32)
    slink = r.ints(count, np.int32)
    doc_count = r.ints(count, np.int32)
    ext_period = r.ints(count, np.int32)
    flags = r.take(count)
    nearest = [r.ints(count, np.int32) for _ in range(3)]
    h_end = r.ints(total, np.int64)
    if r.off != len(r.blob):
        raise IndexFormatError("trailing bytes after the square horizon")
    if count < 1 or parent[0] != -1 or depth[0] != 0:
        raise IndexFormatError("malformed node table")

    tree = _tree_from_arrays(text, parent, depth, pos, slink, doc_count,
                             ext_period, flags, nearest)
    props = object.__new__(PropertyIndex)
    props.text = text
    props.tree = tree
    props.primitive_squares = None   # not stored, only the count survives
    props.square_count = nsq
    props.palindrome_count = npal
    props.h_end = h_end
    # the suffix bundle is not stored; the tree only ever reads the text
    # symbols out of it after construction
    return CorpusIndex(corpus, text, text, tree, props)


def _tree_from_arrays(text, parent, depth, pos, slink, doc_count,
                      ext_period, flags, nearest) -> SuffixTree:
    count = parent.size
    tree = object.__new__(SuffixTree)
    tree.text = text
    tree.bundle = text
    tree.orig_count = count
    tree._parent = array("i", parent.tobytes())
    tree._depth = array("i", depth.tobytes())
    tree._pos = array("i", pos.tobytes())
    tree._slink = array("i", slink.tobytes())
    tree._doc_count = array("i", doc_count.tobytes())
    tree._ext_period = array("i", ext_period.tobytes())
    tree._flags = bytearray(flags)
    tree.nearest_square, tree.nearest_palindrome, tree.nearest_periodic = \
        nearest
    # ancestor jumps work over the final topology after loading
    tree._oparent = parent.astype(np.int32).copy()
    tree._oparent[0] = 0
    tree._odepth = depth.astype(np.int64)
    tree._step_parent = None
    tree._lmin = None
    tree._order_desc = None
    tree._lift = None
    tree._final_lift = None
    tree._node_depth = None
    tree._dirty = True
    tree.child_lookups = 0
    tree._orig_child = {}
    tree.edge_inserted = {}
    tree.freeze()

    off = np.frombuffer(tree._child_off, dtype=np.int64)
    cid = np.frombuffer(tree._child_id, dtype=np.int32)
    first = np.full(count, -1, dtype=np.int32)
    nxt = np.full(count, -1, dtype=np.int32)
    have = off[1:] > off[:-1]
    first[have] = cid[off[:-1][have]]
    if cid.size > 1:
        run_start = np.zeros(cid.size, dtype=bool)
        bounds = off[1:-1]
        run_start[bounds[bounds < cid.size]] = True
        inner = ~run_start[1:]
        nxt[cid[:-1][inner]] = cid[1:][inner]
    tree._first_child = array("i", first.tobytes())
    tree._next_sib = array("i", nxt.tobytes())

    leaves = np.nonzero(first < 0)[0]
    if leaves.size != len(text):
        raise IndexFormatError("leaf count disagrees with the text length")
    leaf_of = np.zeros(len(text), dtype=np.int32)
    leaf_of[np.frombuffer(tree._pos, dtype=np.int32)[leaves]] = leaves
    tree.leaf_of = leaf_of
    return tree
