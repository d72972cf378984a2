"""Command-line interface.

Machine-readable output goes to stdout, progress and summaries to
stderr.  Exit codes: 0 success (including an empty query answer), 1
usage or input errors, 2 document threshold out of range, 3 unreadable
or unsupported index file.
"""
from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time

from .corpus import EmptyCorpus, EmptyDocument, ingest, load_corpus
from .index import build_index
from .indexfile import IndexFormatError, load_index, save_index
from .ms_engine import InvalidThreshold
from .query_engine import QueryResult, query, self_query
from .selftest import run_selftest
from .suffix_core import PROPERTIES, UnknownProperty, normalize_property


def _escape(data: bytes) -> str:
    """Printable ASCII stays, everything else becomes \\xNN."""
    out = []
    for b in data:
        if 0x20 <= b <= 0x7E and b != 0x5C:
            out.append(chr(b))
        else:
            out.append(f"\\x{b:02x}")
    return "".join(out)


def _err(*parts):
    print(*parts, file=sys.stderr)


def cmd_build(args) -> int:
    corpus = load_corpus(args.corpus)
    t0 = time.perf_counter()
    idx = build_index(corpus)
    built = time.perf_counter() - t0
    written = save_index(idx, args.out)
    stats = idx.stats()
    _err(f"indexed {stats['documents']} documents, "
         f"{stats['total_length']} bytes, alphabet {stats['alphabet']}")
    _err(f"tree: {stats['nodes']} nodes, "
         f"{stats['distinct_squares']} distinct squares, "
         f"{stats['distinct_palindromes']} distinct palindromes")
    _err(f"built in {built * 1000:.0f} ms, wrote {args.out} "
         f"({written} bytes)")
    return 0


def _emit_result(r: QueryResult, fmt: str):
    fields = [
        ("property", r.property),
        ("length", r.length),
        ("start", r.start_in_y),
        ("substring", _escape(r.substring)),
        ("witness_doc", r.witness_doc),
        ("witness_pos", r.witness_pos),
        ("docs_matched", r.docs_matched),
    ]
    if fmt == "json":
        print(json.dumps(dict(fields)))
    else:
        print("\t".join(str(v) for _, v in fields))
    if r.length:
        _err(f"longest {r.property} substring in >= {r.threshold} "
             f"documents: {r.length} bytes at position {r.start_in_y}")
    else:
        _err(f"no {r.property} substring occurs in >= {r.threshold} "
             "documents")


def cmd_query(args) -> int:
    prop = normalize_property(args.property)
    idx = load_index(args.index)
    if args.offline:
        r = self_query(idx, args.k, prop)
    else:
        if args.stdin:
            y = sys.stdin.buffer.read()
        else:
            with open(args.y, "rb") as fh:
                y = fh.read()
        r = query(idx, y, args.k, prop)
    _emit_result(r, args.format)
    return 0


def cmd_check(args) -> int:
    def report(done, total):
        _err(f"  {done}/{total} cases")

    failure = run_selftest(args.seed, args.iterations,
                           fault=args.inject_fault, report=report,
                           max_docs=args.max_docs,
                           max_doc_len=args.max_doc_len,
                           max_y=args.max_y, alphabet=args.alphabet)
    if failure is None:
        _err(f"check passed (seed {args.seed}, {args.iterations} random "
             "cases plus the exhaustive battery)")
        return 0
    _err(f"check FAILED: {failure.detail}")
    repro = dict(failure.case.as_dict(), seed=args.seed)
    print(json.dumps(repro))
    _err("repro: lcps query on the corpus above, or rerun with "
         f"--seed {args.seed}")
    return 1


def generate_word(kind: str, n: int, seed: int = 0) -> bytes:
    if kind == "random":
        rng = random.Random(seed)
        return bytes(97 + (b & 1) for b in rng.randbytes(n))
    if kind == "fibonacci":
        prev, cur = b"b", b"a"
        while len(cur) < n:
            prev, cur = cur, cur + prev
        return cur[:n]
    if kind == "thue-morse":
        return bytes(b"ab"[bin(i).count("1") & 1] for i in range(n))
    raise ValueError(f"unknown generator {kind!r}")


def bench_corpus(kind: str, n: int, seed: int = 0) -> list[bytes]:
    word = generate_word(kind, n, seed)
    parts = 4 if kind == "random" else 2
    step = max(1, n // parts)
    return [word[i:i + step] for i in range(0, n, step)][:parts]


def cmd_bench(args) -> int:
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["generator", "n", "build_ms", "property",
                         "query_ms", "y_len", "answer_len"])
        for n in args.n:
            docs = bench_corpus(args.generator, n, args.seed)
            t0 = time.perf_counter()
            idx = build_index(ingest(docs))
            build_ms = (time.perf_counter() - t0) * 1000
            stats = idx.stats()
            assert stats["distinct_squares"] <= 2 * stats["total_length"], \
                "distinct-square bound violated"
            y = generate_word(args.generator, args.y_len, args.seed + 1)
            for prop in PROPERTIES:
                t0 = time.perf_counter()
                r = query(idx, y, 1, prop)
                query_ms = (time.perf_counter() - t0) * 1000
                writer.writerow([args.generator, n, f"{build_ms:.1f}", prop,
                                 f"{query_ms:.2f}", len(y), r.length])
            _err(f"n={n}: build {build_ms:.0f} ms")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lcps",
        description="longest property-bounded common substrings across "
                    "document collections")
    sub = p.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="index a corpus directory or manifest")
    b.add_argument("--corpus", required=True,
                   help="directory of documents, or a manifest listing one "
                        "file per line")
    b.add_argument("--out", required=True, help="index file to write")

    q = sub.add_parser("query", help="longest property-holding substring "
                                     "of a pattern")
    q.add_argument("--index", required=True)
    q.add_argument("--property", required=True,
                   help="one of sqf, sqr, per, pal, lyn (long names work)")
    q.add_argument("--k", type=int, required=True,
                   help="minimum number of documents")
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--y", metavar="FILE",
                     help="file holding the pattern, read as raw bytes")
    src.add_argument("--stdin", action="store_true",
                     help="read the pattern from stdin")
    src.add_argument("--offline", action="store_true",
                     help="query the indexed documents themselves")
    q.add_argument("--format", choices=["json", "tsv"], default="json")

    c = sub.add_parser("check", help="differential self-test against "
                                     "exhaustive enumeration")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--iterations", type=int, default=200,
                   help="random cases on top of the exhaustive battery")
    c.add_argument("--max-docs", type=int, default=4)
    c.add_argument("--max-doc-len", type=int, default=14)
    c.add_argument("--max-y", type=int, default=18)
    c.add_argument("--alphabet", type=int, default=3,
                   help="largest corpus alphabet drawn per case")
    c.add_argument("--inject-fault", action="store_true",
                   help=argparse.SUPPRESS)

    be = sub.add_parser("bench", help="build and query timings as CSV")
    be.add_argument("--generator", default="random",
                    choices=["random", "fibonacci", "thue-morse"])
    be.add_argument("--n", type=int, nargs="+", default=[65536])
    be.add_argument("--y-len", type=int, default=10000)
    be.add_argument("--csv", metavar="PATH",
                    help="write the CSV here instead of stdout")
    be.add_argument("--seed", type=int, default=0)
    return p


_COMMANDS = {
    "build": cmd_build,
    "query": cmd_query,
    "check": cmd_check,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.cmd](args)
    except InvalidThreshold as exc:
        _err(f"error: {exc}")
        return 2
    except IndexFormatError as exc:
        _err(f"error: {exc}")
        return 3
    except (UnknownProperty, EmptyCorpus, EmptyDocument, ValueError,
            OSError) as exc:
        _err(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
