"""End-to-end index construction: corpus in, annotated tree out."""
from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus, GlobalText, concatenate, ingest
from .gst import FLAG_PALINDROME, FLAG_SQUARE, SuffixTree, build_gst, compute_doc_counts
from .property_index import PropertyIndex, build_property_index
from .suffix_core import SuffixBundle, build_suffix_bundle, compute_runs


@dataclass
class CorpusIndex:
    corpus: Corpus
    text: GlobalText
    bundle: SuffixBundle
    tree: SuffixTree
    props: PropertyIndex

    def stats(self) -> dict:
        flags = self.tree._flags
        return {
            "documents": self.corpus.k,
            "total_length": self.corpus.n,
            "alphabet": self.corpus.sigma,
            "nodes": self.tree.count,
            "distinct_squares": sum(1 for f in flags if f & FLAG_SQUARE),
            "distinct_palindromes": sum(1 for f in flags if f & FLAG_PALINDROME),
        }


def build_index(corpus: Corpus) -> CorpusIndex:
    text = concatenate(corpus)
    bundle = build_suffix_bundle(text)
    tree = build_gst(text, bundle)
    compute_doc_counts(tree, bundle)
    runs = compute_runs(text, bundle)
    props = build_property_index(text, bundle, tree, runs)
    return CorpusIndex(corpus, text, bundle, tree, props)


def index_documents(docs) -> CorpusIndex:
    """Convenience for tests and the checker: bytes in, index out."""
    return build_index(ingest(docs))
