"""Matrix Market (dense array) and partition CSV files.

Matrices are written as ``%%MatrixMarket matrix array real general``, column-major,
17 significant digits, so a write/read round trip is bit-exact.
Partitions are CSV with header ``state,aggregate`` and one 0-indexed row per state.
"""
import csv

import numpy as np

from .errors import ParseError
from .markov import Partition, TransitionMatrix, as_partition

MM_HEADER = "%%MatrixMarket matrix array real general"


def write_dense(a, path, comment=None):
    a = np.asarray(a, dtype=float)
    lines = [MM_HEADER]
    if comment:
        lines.extend(f"% {line}" for line in comment.splitlines())
    lines.append(f"{a.shape[0]} {a.shape[1]}")
    lines.extend(f"{x:.17g}" for x in a.ravel(order="F"))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_dense(path):
    """Parse a dense real Matrix Market file into an array (no stochasticity check)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise ParseError(1, "missing %%MatrixMarket banner")
    banner = lines[0].split()
    if len(banner) != 5 or [t.lower() for t in banner[1:]] != ["matrix", "array", "real", "general"]:
        raise ParseError(1, f"unsupported banner {lines[0]!r}")
    body = [(no, line.strip()) for no, line in enumerate(lines[1:], start=2)]
    body = [(no, line) for no, line in body if line and not line.startswith("%")]
    if not body:
        raise ParseError(len(lines), "missing size line")
    size_no, size_line = body[0]
    try:
        rows, cols = (int(tok) for tok in size_line.split())
    except ValueError:
        raise ParseError(size_no, f"bad size line {size_line!r}") from None
    if rows != cols:
        raise ParseError(size_no, f"matrix is {rows}x{cols}, expected square")
    values = body[1:]
    if len(values) != rows * cols:
        line = values[-1][0] if values else size_no
        raise ParseError(line, f"expected {rows * cols} entries, found {len(values)}")
    data = np.empty(rows * cols)
    for idx, (no, line) in enumerate(values):
        try:
            data[idx] = float(line)
        except ValueError:
            raise ParseError(no, f"bad entry {line!r}") from None
    return data.reshape((rows, cols), order="F")


def write_matrix(p, path, comment=None):
    write_dense(p.entries if isinstance(p, TransitionMatrix) else p, path, comment)


def read_matrix(path):
    return TransitionMatrix(read_dense(path))


def write_partition(pi, path):
    pi = as_partition(pi)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["state", "aggregate"])
        writer.writerows(enumerate(pi.labels.tolist()))


def read_partition(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["state", "aggregate"]:
            raise ParseError(1, f"expected header 'state,aggregate', got {header!r}")
        pairs = []
        for no, row in enumerate(reader, start=2):
            try:
                pairs.append((int(row[0]), int(row[1])))
            except (ValueError, IndexError):
                raise ParseError(no, f"bad row {row!r}") from None
    states = [s for s, _ in pairs]
    if sorted(states) != list(range(len(states))):
        raise ParseError(1, "state column must list 0..n-1 exactly once")
    labels = np.empty(len(pairs), dtype=np.int64)
    for s, a in pairs:
        labels[s] = a
    return Partition(labels)
