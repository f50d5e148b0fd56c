#!/usr/bin/env python3
"""Turn a sentence-aligned parallel corpus into a pair of Matrix Market term matrices.

Line t of the X text and line t of the Y text become row t of X and Y. Each side gets its own
vocabulary; entries are term counts (or 0/1 with --binary, or log-scaled tf-idf with --tfidf).
Only the standard library is used, so the script runs anywhere the corpora are.

    python3 tools/vectorize_corpus.py --x europarl.en --y europarl.fr --out data/apr \
        --min-count 2 --max-vocab 30000
"""

import argparse
import collections
import json
import math
import os
import re
import sys

TOKEN = re.compile(r"[^\W\d_]+", re.UNICODE)


def tokenize(line, lowercase=True):
    if lowercase:
        line = line.lower()
    return TOKEN.findall(line)


def read_lines(path, encoding):
    with open(path, encoding=encoding, errors="replace") as f:
        return [line.rstrip("\n") for line in f]


def build_vocabulary(docs, min_count, max_vocab):
    counts = collections.Counter()
    for doc in docs:
        counts.update(doc)
    kept = [(w, c) for w, c in counts.items() if c >= min_count]
    kept.sort(key=lambda wc: (-wc[1], wc[0]))
    if max_vocab:
        kept = kept[:max_vocab]
    return {w: i for i, (w, _) in enumerate(kept)}


def document_frequency(docs, vocab):
    df = collections.Counter()
    for doc in docs:
        df.update({vocab[w] for w in doc if w in vocab})
    return df


def row_entries(doc, vocab, weighting, idf):
    tf = collections.Counter(vocab[w] for w in doc if w in vocab)
    for col in sorted(tf):
        if weighting == "binary":
            value = 1.0
        elif weighting == "tfidf":
            value = (1.0 + math.log(tf[col])) * idf[col]
        else:
            value = float(tf[col])
        if value != 0.0:
            yield col, value


def write_side(path, docs, vocab, weighting):
    idf = None
    if weighting == "tfidf":
        df = document_frequency(docs, vocab)
        n = len(docs)
        idf = {col: math.log((1.0 + n) / (1.0 + df[col])) + 1.0 for col in vocab.values()}
    rows = [list(row_entries(doc, vocab, weighting, idf)) for doc in docs]
    nnz = sum(len(r) for r in rows)
    with open(path, "w", encoding="ascii") as f:
        f.write("%%MatrixMarket matrix coordinate real general\n")
        f.write("%d %d %d\n" % (len(docs), max(len(vocab), 1), nnz))
        for i, row in enumerate(rows, start=1):
            for col, value in row:
                f.write("%d %d %.17g\n" % (i, col + 1, value))
    return nnz


def write_vocabulary(path, vocab):
    with open(path, "w", encoding="utf-8") as f:
        for word, _ in sorted(vocab.items(), key=lambda wi: wi[1]):
            f.write(word + "\n")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--x", required=True, help="text for X, one document per line")
    p.add_argument("--y", required=True, help="aligned text for Y, one document per line")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--min-count", type=int, default=1, help="drop terms rarer than this")
    p.add_argument("--max-vocab", type=int, default=0, help="keep the most frequent terms (0: all)")
    p.add_argument("--max-docs", type=int, default=0, help="use only the first documents (0: all)")
    p.add_argument("--encoding", default="utf-8")
    p.add_argument("--keep-case", action="store_true", help="do not lowercase")
    p.add_argument("--drop-empty", action="store_true",
                   help="drop aligned pairs where either side has no in-vocabulary term")
    weighting = p.add_mutually_exclusive_group()
    weighting.add_argument("--binary", dest="weighting", action="store_const", const="binary")
    weighting.add_argument("--tfidf", dest="weighting", action="store_const", const="tfidf")
    p.set_defaults(weighting="count")
    args = p.parse_args(argv)

    x_lines = read_lines(args.x, args.encoding)
    y_lines = read_lines(args.y, args.encoding)
    if len(x_lines) != len(y_lines):
        print("error: %s has %d lines but %s has %d; the corpus must be aligned"
              % (args.x, len(x_lines), args.y, len(y_lines)), file=sys.stderr)
        return 2
    if args.max_docs:
        x_lines, y_lines = x_lines[: args.max_docs], y_lines[: args.max_docs]

    lower = not args.keep_case
    x_docs = [tokenize(l, lower) for l in x_lines]
    y_docs = [tokenize(l, lower) for l in y_lines]
    x_vocab = build_vocabulary(x_docs, args.min_count, args.max_vocab)
    y_vocab = build_vocabulary(y_docs, args.min_count, args.max_vocab)

    if args.drop_empty:
        pairs = [(a, b) for a, b in zip(x_docs, y_docs)
                 if any(w in x_vocab for w in a) and any(w in y_vocab for w in b)]
        x_docs = [a for a, _ in pairs]
        y_docs = [b for _, b in pairs]

    os.makedirs(args.out, exist_ok=True)
    nnz_x = write_side(os.path.join(args.out, "X.mtx"), x_docs, x_vocab, args.weighting)
    nnz_y = write_side(os.path.join(args.out, "Y.mtx"), y_docs, y_vocab, args.weighting)
    write_vocabulary(os.path.join(args.out, "X.vocab"), x_vocab)
    write_vocabulary(os.path.join(args.out, "Y.vocab"), y_vocab)

    n = len(x_docs)
    summary = {
        "rows": n,
        "dx": len(x_vocab),
        "dy": len(y_vocab),
        "nnz_x": nnz_x,
        "nnz_y": nnz_y,
        "density_x": nnz_x / (n * len(x_vocab)) if n and x_vocab else 0.0,
        "density_y": nnz_y / (n * len(y_vocab)) if n and y_vocab else 0.0,
        "weighting": args.weighting,
        "min_count": args.min_count,
        "max_vocab": args.max_vocab,
    }
    with open(os.path.join(args.out, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    print(json.dumps(summary, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
