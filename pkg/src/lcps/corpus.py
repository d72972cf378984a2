"""Corpus ingestion and the concatenated text the index is built over.

Documents are byte strings.  The distinct bytes of the corpus are mapped
onto a dense internal alphabet 0..sigma-1 in increasing byte order, so
comparisons of internal symbols agree with comparisons of the raw bytes.
Each document is terminated by a unique sentinel symbol sigma + doc_id;
sentinels therefore compare greater than every real symbol and never
compare equal to anything else.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np


class EmptyCorpus(ValueError):
    """The corpus contains no documents."""


class EmptyDocument(ValueError):
    """A document has zero length."""


@dataclass
class Document:
    id: int          # 0-based, consecutive
    name: str
    content: bytes


class Corpus:
    def __init__(self, documents: list[Document]):
        if not documents:
            raise EmptyCorpus("corpus must contain at least one document")
        for doc in documents:
            if len(doc.content) == 0:
                raise EmptyDocument(f"document {doc.name!r} is empty")
        self.documents = documents
        used = sorted(set(b for doc in documents for b in doc.content))
        self.byte_of = bytes(used)                      # symbol -> byte value
        self.alphabet = {b: i for i, b in enumerate(used)}  # byte value -> symbol
        self.sigma = len(used)
        self.k = len(documents)
        self.n = sum(len(doc.content) for doc in documents)

    def map_symbol(self, b) -> int | None:
        """Internal symbol for byte b, or None when b is outside the alphabet."""
        if isinstance(b, (bytes, bytearray)):
            if len(b) != 1:
                raise ValueError("map_symbol expects a single byte")
            b = b[0]
        return self.alphabet.get(b)

    def sentinel(self, doc_id: int) -> int:
        return self.sigma + doc_id

    def encode(self, data: bytes) -> list[int | None]:
        """Map a byte string through the alphabet; unknown bytes become None."""
        get = self.alphabet.get
        return [get(b) for b in data]

    def decode(self, symbols) -> bytes:
        return bytes(self.byte_of[s] for s in symbols)


def ingest(sources) -> Corpus:
    """Build a corpus from an iterable of byte strings or (name, bytes) pairs."""
    documents = []
    for i, src in enumerate(sources):
        if isinstance(src, tuple):
            name, content = src
        else:
            name, content = f"source {i + 1}", src
        if isinstance(content, str):
            content = content.encode("latin-1")
        if len(content) == 0:
            raise EmptyDocument(f"document {name!r} is empty")
        documents.append(Document(id=i, name=name, content=bytes(content)))
    if not documents:
        raise EmptyCorpus("corpus must contain at least one document")
    return Corpus(documents)


class GlobalText:
    """The concatenation x_1 $_1 x_2 $_2 ... x_k $_k as internal symbols."""

    def __init__(self, corpus: Corpus):
        self.corpus = corpus
        k = corpus.k
        lengths = np.array([len(d.content) for d in corpus.documents], dtype=np.int64)
        total = int(lengths.sum()) + k
        symbols = np.empty(total, dtype=np.int32)
        doc_start = np.empty(k, dtype=np.int64)
        sentinel_pos = np.empty(k, dtype=np.int64)
        pos = 0
        lut = np.full(256, -1, dtype=np.int32)
        for b, s in corpus.alphabet.items():
            lut[b] = s
        for d, doc in enumerate(corpus.documents):
            doc_start[d] = pos
            raw = np.frombuffer(doc.content, dtype=np.uint8)
            symbols[pos:pos + len(raw)] = lut[raw]
            pos += len(raw)
            symbols[pos] = corpus.sigma + d
            sentinel_pos[d] = pos
            pos += 1
        self.symbols = symbols
        self.doc_start = doc_start
        self.sentinel_pos = sentinel_pos
        self.doc_len = lengths
        self.n = corpus.n
        self.k = k
        # doc id of every global position (sentinel belongs to its document)
        self._doc_of = np.repeat(np.arange(k, dtype=np.int32), lengths + 1)

    def __len__(self) -> int:
        return len(self.symbols)

    def doc_of(self, pos: int) -> int:
        return int(self._doc_of[pos])

    def local_of(self, pos: int) -> int:
        """1-based offset of a global position within its document."""
        return int(pos - self.doc_start[self._doc_of[pos]]) + 1

    def global_pos(self, doc: int, local0: int) -> int:
        """Global position of 0-based offset local0 in document doc."""
        return int(self.doc_start[doc]) + local0

    def is_sentinel(self, pos: int) -> bool:
        return int(self.symbols[pos]) >= self.corpus.sigma


def concatenate(corpus: Corpus) -> GlobalText:
    return GlobalText(corpus)


def load_corpus(path: str) -> Corpus:
    """Load a corpus from a directory or a manifest file.

    A directory contributes its regular files in lexicographic filename
    order.  A manifest is a UTF-8 text file naming one document path per
    line, resolved relative to the manifest's own directory.
    """
    if os.path.isdir(path):
        names = sorted(
            n for n in os.listdir(path)
            if os.path.isfile(os.path.join(path, n))
        )
        if not names:
            raise EmptyCorpus(f"directory {path!r} contains no files")
        entries = [(n, os.path.join(path, n)) for n in names]
    else:
        base = os.path.dirname(os.path.abspath(path))
        entries = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    entries.append((line, os.path.join(base, line)))
        if not entries:
            raise EmptyCorpus(f"manifest {path!r} names no documents")
    sources = []
    for name, full in entries:
        with open(full, "rb") as fh:
            sources.append((name, fh.read()))
    return ingest(sources)
