"""Model inputs derived from unified ASTs.

Each tree yields two views sharing one pre-order numbering: the flattened
kind-index sequence (padded or truncated to L) and the degree-normalized
adjacency over the first N nodes.  Both views are input constants, so the
normalization happens here rather than inside the model.

A featurized corpus is serializable to a single binary file; the dense
normalized adjacency is never stored, only the sparse parent-child edge
list, and norm_adj is rebuilt on load.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .ast_frontend import AstNode, Vocabulary, vocabulary_from_kinds
from .errors import DataError, EmptyCorpus

MAGIC = b"UASTFEAT"
FORMAT_VERSION = 1

SPLIT_TAGS = {"train": 0, "val": 1, "test": 2}
TAG_SPLITS = {v: k for k, v in SPLIT_TAGS.items()}


@dataclass(frozen=True)
class PathSequence:
    indices: np.ndarray  # int64, fixed length L; 0 beyond true_length
    true_length: int

    def __post_init__(self):
        assert self.indices.ndim == 1

    @property
    def L(self) -> int:
        return int(self.indices.shape[0])


@dataclass(frozen=True)
class GraphSample:
    node_kinds: np.ndarray  # int64, fixed length N; 0 beyond node_count
    node_count: int
    edges: tuple[tuple[int, int], ...]  # parent-child pairs, both < node_count

    @property
    def N(self) -> int:
        return int(self.node_kinds.shape[0])

    @property
    def norm_adj(self) -> np.ndarray:
        """Dense N x N matrix with entry (i, j) = a~_ij / sqrt(d_i * d_j).

        a~ is the undirected adjacency plus self-loops over the real nodes;
        rows and columns at or beyond node_count stay zero.
        """
        size = self.N
        out = np.zeros((size, size), dtype=np.float64)
        n = self.node_count
        if n == 0:
            return out
        tilde = np.zeros((n, n), dtype=np.float64)
        idx = np.arange(n)
        tilde[idx, idx] = 1.0
        for i, j in self.edges:
            tilde[i, j] = 1.0
            tilde[j, i] = 1.0
        deg = tilde.sum(axis=1)
        out[:n, :n] = tilde / np.sqrt(np.outer(deg, deg))
        return out


def _preorder_walk(root: AstNode) -> Iterator[tuple[int, AstNode]]:
    """Yield (parent_index, node) in pre-order; the root's parent is -1."""
    stack: list[tuple[int, AstNode]] = [(-1, root)]
    counter = 0
    while stack:
        parent, node = stack.pop()
        yield parent, node
        my_index = counter
        counter += 1
        for child in reversed(node.children):
            stack.append((my_index, child))


def preorder_path(ast: AstNode, vocab: Vocabulary, L: int) -> PathSequence:
    """Flatten the tree in pre-order into a fixed-length index vector."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    indices = np.zeros(L, dtype=np.int64)
    count = 0
    for _, node in _preorder_walk(ast):
        if count == L:
            break
        indices[count] = vocab.index_of(node.kind)
        count += 1
    return PathSequence(indices=indices, true_length=count)


def build_graph(ast: AstNode, vocab: Vocabulary, N: int) -> GraphSample:
    """Graph view over the first N pre-order nodes with parent-child edges."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    kinds = np.zeros(N, dtype=np.int64)
    edges: list[tuple[int, int]] = []
    count = 0
    for parent, node in _preorder_walk(ast):
        if count == N:
            break
        kinds[count] = vocab.index_of(node.kind)
        if parent >= 0:  # parent precedes child in pre-order, so parent < N holds
            edges.append((parent, count))
        count += 1
    return GraphSample(node_kinds=kinds, node_count=count, edges=tuple(edges))


def featurize_sample(ast: AstNode, vocab: Vocabulary, L: int,
                     N: int) -> tuple[PathSequence, GraphSample]:
    """Both views in one pre-order pass; they share node numbering."""
    if L < 1 or N < 1:
        raise ValueError(f"L and N must be >= 1, got L={L} N={N}")
    limit = max(L, N)
    prefix = np.zeros(limit, dtype=np.int64)
    edges: list[tuple[int, int]] = []
    count = 0
    for parent, node in _preorder_walk(ast):
        if count == limit:
            break
        prefix[count] = vocab.index_of(node.kind)
        if 0 <= parent and count < N:
            edges.append((parent, count))
        count += 1
    true_length = min(count, L)
    node_count = min(count, N)
    path_idx = np.zeros(L, dtype=np.int64)
    path_idx[:true_length] = prefix[:true_length]
    kinds = np.zeros(N, dtype=np.int64)
    kinds[:node_count] = prefix[:node_count]
    return (PathSequence(indices=path_idx, true_length=true_length),
            GraphSample(node_kinds=kinds, node_count=node_count,
                        edges=tuple(edges)))


# --- corpus statistics ----------------------------------------------------

@dataclass(frozen=True)
class StatsReport:
    count: int
    mean: float
    median: int
    p70: int
    p80: int
    p90: int
    min: int
    max: int


def _nearest_rank(sorted_values: list[int], pct: float) -> int:
    rank = max(1, math.ceil(pct / 100.0 * len(sorted_values)))
    return sorted_values[rank - 1]


def path_length_stats(corpus: Iterable[AstNode]) -> StatsReport:
    """Distribution of untruncated pre-order lengths across a corpus."""
    lengths: list[int] = []
    for root in corpus:
        n = 0
        for _ in _preorder_walk(root):
            n += 1
        lengths.append(n)
    if not lengths:
        raise EmptyCorpus("no trees to take statistics over")
    lengths.sort()
    return StatsReport(
        count=len(lengths),
        mean=sum(lengths) / len(lengths),
        median=_nearest_rank(lengths, 50),
        p70=_nearest_rank(lengths, 70),
        p80=_nearest_rank(lengths, 80),
        p90=_nearest_rank(lengths, 90),
        min=lengths[0],
        max=lengths[-1],
    )


# --- featurized corpus file ------------------------------------------------

@dataclass(frozen=True)
class SampleRecord:
    label: int
    language: int
    split: str  # train | val | test
    path: PathSequence
    graph: GraphSample


@dataclass(frozen=True)
class FeaturizedSet:
    L: int
    N: int
    vocab: Vocabulary
    labels: tuple[str, ...]
    languages: tuple[str, ...]
    unified: bool
    table_hash: str
    records: tuple[SampleRecord, ...]

    def split_records(self, split: str) -> list[SampleRecord]:
        return [r for r in self.records if r.split == split]


def write_featurized(path: str | Path, fset: FeaturizedSet) -> None:
    header = {
        "L": fset.L,
        "N": fset.N,
        "kinds": list(fset.vocab.kinds),
        "labels": list(fset.labels),
        "languages": list(fset.languages),
        "unified": fset.unified,
        "table_hash": fset.table_hash,
        "count": len(fset.records),
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IQ", FORMAT_VERSION, len(blob)))
        fh.write(blob)
        for rec in fset.records:
            true_length = rec.path.true_length
            node_count = rec.graph.node_count
            m = max(true_length, node_count)
            prefix = np.zeros(m, dtype=np.int64)
            prefix[:true_length] = rec.path.indices[:true_length]
            prefix[:node_count] = rec.graph.node_kinds[:node_count]
            fh.write(struct.pack("<HHBIII", rec.label, rec.language,
                                 SPLIT_TAGS[rec.split], true_length,
                                 node_count, m))
            fh.write(prefix.astype("<u4").tobytes())
            fh.write(struct.pack("<I", len(rec.graph.edges)))
            if rec.graph.edges:
                flat = np.asarray(rec.graph.edges, dtype="<u4")
                fh.write(flat.tobytes())


def read_featurized(path: str | Path) -> FeaturizedSet:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    if data[:8] != MAGIC:
        raise DataError(f"{path}: not a featurized corpus file")
    version, header_len = struct.unpack_from("<IQ", data, 8)
    if version != FORMAT_VERSION:
        raise DataError(f"{path}: unsupported format version {version}")
    offset = 8 + 12
    try:
        header = json.loads(data[offset:offset + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: corrupt header: {exc}") from exc
    offset += header_len
    L, N = header["L"], header["N"]
    records: list[SampleRecord] = []
    try:
        for _ in range(header["count"]):
            (label, language, tag, true_length, node_count,
             m) = struct.unpack_from("<HHBIII", data, offset)
            offset += struct.calcsize("<HHBIII")
            if tag not in TAG_SPLITS or offset + 4 * m > len(data):
                raise DataError(f"{path}: corrupt record")
            prefix = np.frombuffer(data, dtype="<u4", count=m,
                                   offset=offset).astype(np.int64)
            offset += 4 * m
            (edge_count,) = struct.unpack_from("<I", data, offset)
            offset += 4
            edges: tuple[tuple[int, int], ...] = ()
            if edge_count:
                if offset + 8 * edge_count > len(data):
                    raise DataError(f"{path}: corrupt record")
                flat = np.frombuffer(data, dtype="<u4", count=2 * edge_count,
                                     offset=offset).astype(np.int64)
                edges = tuple((int(a), int(b))
                              for a, b in flat.reshape(-1, 2))
                offset += 8 * edge_count
            indices = np.zeros(L, dtype=np.int64)
            indices[:true_length] = prefix[:true_length]
            kinds = np.zeros(N, dtype=np.int64)
            kinds[:node_count] = prefix[:node_count]
            records.append(SampleRecord(
                label=label, language=language, split=TAG_SPLITS[tag],
                path=PathSequence(indices=indices, true_length=true_length),
                graph=GraphSample(node_kinds=kinds, node_count=node_count,
                                  edges=edges)))
    except (struct.error, ValueError) as exc:
        raise DataError(f"{path}: truncated record data: {exc}") from exc
    if offset != len(data):
        raise DataError(f"{path}: {len(data) - offset} trailing bytes")
    return FeaturizedSet(
        L=L, N=N, vocab=vocabulary_from_kinds(header["kinds"]),
        labels=tuple(header["labels"]), languages=tuple(header["languages"]),
        unified=header["unified"], table_hash=header["table_hash"],
        records=tuple(records))
