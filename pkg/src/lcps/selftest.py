"""Differential self-test: the index pipeline against the brute oracle.

Every case builds a small corpus twice over, runs the same query through
the annotated-tree engine and through exhaustive enumeration, and
compares answer length, leftmost start, substring, witness validity and
the matched-document count.  Failures are shrunk greedily (drop a
document, chop document tails, chop the pattern) before being reported
so the repro is as small as the mismatch allows.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .index import index_documents
from .oracle import PROPERTIES, doc_hits, holds, oracle_query
from .query_engine import query


@dataclass
class Case:
    docs: list[bytes]
    y: bytes
    k: int
    prop: str

    def as_dict(self) -> dict:
        return {
            "corpus": [d.decode("latin-1") for d in self.docs],
            "y": self.y.decode("latin-1"),
            "k": self.k,
            "property": self.prop,
        }


@dataclass
class Failure:
    case: Case
    detail: str

    def __str__(self):
        return f"{self.detail} on {self.case.as_dict()}"


def check_case(case: Case, fault: bool = False) -> str | None:
    """Return a mismatch description, or None when engine and oracle agree."""
    idx = index_documents(case.docs)
    r = query(idx, case.y, case.k, case.prop)
    if fault and r.length > 0:
        r = r._replace(length=r.length - 1)
    length, hits = oracle_query(case.docs, case.y, case.k, case.prop)
    if r.length != length:
        return f"length {r.length} != {length}"
    if length == 0:
        if r != (case.prop, case.k, 0, 0, b"", 0, 0, 0):
            return f"nonempty fields in empty result {r}"
        return None
    if (r.start_in_y - 1, r.substring) != hits[0]:
        return f"got ({r.start_in_y - 1}, {r.substring}), want {hits[0]}"
    if not holds(case.prop, r.substring):
        return "substring does not hold the property"
    doc = case.docs[r.witness_doc - 1]
    if doc[r.witness_pos - 1:r.witness_pos - 1 + r.length] != r.substring:
        return f"witness ({r.witness_doc}, {r.witness_pos}) is not an occurrence"
    if r.docs_matched != doc_hits(case.docs, r.substring):
        return f"docs_matched {r.docs_matched} is wrong"
    if r.docs_matched < case.k:
        return "docs_matched below the threshold"
    return None


def shrink(case: Case, fault: bool = False) -> Case:
    """Greedily remove material while the mismatch persists."""
    def still_fails(c: Case) -> bool:
        return 1 <= c.k <= len(c.docs) and check_case(c, fault) is not None

    changed = True
    while changed:
        changed = False
        for i in range(len(case.docs)):
            slim = Case(case.docs[:i] + case.docs[i + 1:], case.y,
                        min(case.k, len(case.docs) - 1), case.prop)
            if slim.docs and still_fails(slim):
                case = slim
                changed = True
                break
        for i, doc in enumerate(case.docs):
            while len(case.docs[i]) > 1:
                slim = Case(case.docs[:i] + [case.docs[i][:-1]] + case.docs[i + 1:],
                            case.y, case.k, case.prop)
                if still_fails(slim):
                    case = slim
                    changed = True
                else:
                    break
        while len(case.y) > 0:
            for slim_y in (case.y[:-1], case.y[1:]):
                slim = Case(case.docs, slim_y, case.k, case.prop)
                if still_fails(slim):
                    case = slim
                    changed = True
                    break
            else:
                break
    return case


def random_case(rng: random.Random, max_docs: int = 4, max_doc_len: int = 14,
                max_y: int = 18, alphabet: int = 3) -> Case:
    sigma = rng.randint(1, alphabet)
    letters = bytes(range(0x61, 0x61 + sigma))
    docs = [bytes(rng.choice(letters) for _ in range(rng.randint(1, max_doc_len)))
            for _ in range(rng.randint(1, max_docs))]
    # y draws from one extra letter so unknown symbols show up too
    y = bytes(rng.choice(bytes(range(0x61, 0x61 + sigma + 1)))
              for _ in range(rng.randint(0, max_y)))
    return Case(docs, y, rng.randint(1, len(docs)),
                rng.choice(PROPERTIES))


def exhaustive_cases():
    """Every binary corpus of two short documents, queried with itself."""
    for la in range(1, 4):
        for a in range(1 << la):
            da = bytes(b"ab"[(a >> i) & 1] for i in range(la))
            for lb in range(1, 3):
                for b in range(1 << lb):
                    db = bytes(b"ab"[(b >> i) & 1] for i in range(lb))
                    for prop in PROPERTIES:
                        for k in (1, 2):
                            yield Case([da, db], da + db, k, prop)


def run_selftest(seed: int, cases: int, fault: bool = False, report=None,
                 max_docs: int = 4, max_doc_len: int = 14, max_y: int = 18,
                 alphabet: int = 3) -> Failure | None:
    """Exhaustive battery plus `cases` random ones; first failure wins."""
    rng = random.Random(seed)
    ran = 0
    stream = list(exhaustive_cases())
    stream.extend(random_case(rng, max_docs, max_doc_len, max_y, alphabet)
                  for _ in range(cases))
    if fault:
        # a case with a guaranteed nonempty answer, so the deliberate
        # corruption always has something to corrupt
        stream.insert(0, Case([b"ab"], b"ab", 1, "sqf"))
    for case in stream:
        inject = fault and ran == 0
        detail = check_case(case, inject)
        if detail is not None:
            small = shrink(case, inject)
            return Failure(small, check_case(small, inject) or detail)
        ran += 1
        if report and ran % 200 == 0:
            report(ran, len(stream))
    return None
