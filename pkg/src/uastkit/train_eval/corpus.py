"""Corpus ingestion and deterministic splitting.

A corpus is either a directory tree `root/<label>/<language>/<file>` or an
explicit manifest of `path,label,language` rows.  Ingestion reads sources,
optionally masks a configured set of function names, drops byte-identical
duplicates, parses each file, and assigns stable lexicographic label
indices.  Splitting shuffles each language stratum with a seeded generator
and apportions by largest remainder, so the same seed always yields the
same disjoint, covering split.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..ast_frontend import (
    EXTENSION_LANGUAGES,
    SEXPR_EXTENSION,
    AstNode,
    load_ast_sexpr,
    normalize_language,
    parse_source,
)
from ..errors import (
    DataError,
    EmptyClass,
    EmptyCorpus,
    MalformedSExpr,
    ParseFailure,
    UnknownExtension,
)
from ..featurizer import GraphSample, PathSequence

log = logging.getLogger("uastkit.corpus")

SPLIT_NAMES = ("train", "validation", "test")
DEFAULT_RATIOS = (3, 1, 1)
MASK_TOKEN = "XXX"


@dataclass
class LabeledSample:
    """One source file with its label, parse, and (later) feature views."""
    source_path: str
    language: str
    label: str
    label_index: int
    tree: AstNode | None = None
    path_seq: PathSequence | None = None
    graph: GraphSample | None = None

    def drop_tree(self) -> None:
        self.tree = None


def mask_function_names(text: str, names: set[str] | frozenset[str]) -> str:
    """Replace whole-word occurrences of each name with the mask token."""
    for name in sorted(names):
        text = re.sub(rf"(?<![0-9A-Za-z_$]){re.escape(name)}(?![0-9A-Za-z_$])",
                      MASK_TOKEN, text)
    return text


def _language_for(path: Path, declared: str | None) -> str:
    if declared:
        return normalize_language(declared)
    ext = path.suffix.lower()
    if ext == SEXPR_EXTENSION:
        raise UnknownExtension(
            f"{path}: cannot infer a language for {SEXPR_EXTENSION} files; "
            "declare one in a manifest or a language directory")
    if ext not in EXTENSION_LANGUAGES:
        raise UnknownExtension(f"{path}: unknown extension {ext!r}")
    return EXTENSION_LANGUAGES[ext]


def _enumerate_directory(root: Path) -> list[tuple[Path, str, str | None]]:
    """Yield (file, label, declared_language) from the directory layout."""
    rows: list[tuple[Path, str, str | None]] = []
    labels = sorted(p for p in root.iterdir() if p.is_dir())
    if not labels:
        raise EmptyCorpus(f"{root}: no label directories")
    for label_dir in labels:
        before = len(rows)
        for entry in sorted(label_dir.iterdir()):
            if entry.is_dir():
                language = normalize_language(entry.name)
                rows.extend((f, label_dir.name, language)
                            for f in sorted(entry.rglob("*")) if f.is_file())
            elif entry.is_file():
                rows.append((entry, label_dir.name, None))
        if len(rows) == before:
            raise EmptyClass(f"label {label_dir.name!r} has no files")
    return rows


def _enumerate_manifest(manifest: Path) -> list[tuple[Path, str, str | None]]:
    rows: list[tuple[Path, str, str | None]] = []
    base = manifest.parent
    try:
        with open(manifest, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if len(row) < 2:
                    raise DataError(
                        f"{manifest}:{lineno}: need path,label[,language]")
                path = Path(row[0].strip())
                if not path.is_absolute():
                    path = base / path
                language = row[2].strip() if len(row) > 2 and row[2].strip() \
                    else None
                rows.append((path, row[1].strip(), language))
    except OSError as exc:
        raise DataError(f"cannot read manifest {manifest}: {exc}") from exc
    if not rows:
        raise EmptyCorpus(f"{manifest}: no rows")
    return rows


def ingest_corpus(root: str | Path, manifest: str | Path | None = None,
                  mask_names: set[str] | frozenset[str] | None = None,
                  ) -> list[LabeledSample]:
    """Read, dedup, and parse a corpus into labeled samples.

    Byte-identical files after the first (in sorted path order) are dropped,
    as are files the parser rejects; both log warnings.  Label indices are
    assigned lexicographically over the labels that survive.
    """
    root = Path(root)
    if manifest is not None:
        rows = _enumerate_manifest(Path(manifest))
    else:
        if not root.is_dir():
            raise DataError(f"corpus root {root} is not a directory")
        rows = _enumerate_directory(root)
    rows.sort(key=lambda r: (r[1], str(r[0])))

    seen: dict[str, Path] = {}
    parsed: list[tuple[str, str, Path, AstNode]] = []
    label_seen: dict[str, int] = {}
    for path, label, declared in rows:
        label_seen.setdefault(label, 0)
        language = _language_for(path, declared)
        try:
            blob = path.read_bytes()
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from exc
        digest = hashlib.sha256(blob).hexdigest()
        if digest in seen:
            log.warning("duplicate file skipped: %s (same bytes as %s)",
                        path, seen[digest])
            continue
        seen[digest] = path
        text = blob.decode("utf-8", errors="replace")
        if mask_names:
            text = mask_function_names(text, mask_names)
        try:
            if path.suffix.lower() == SEXPR_EXTENSION:
                tree = load_ast_sexpr(text)
            else:
                tree = parse_source(text, language)
        except (ParseFailure, MalformedSExpr) as exc:
            log.warning("unparseable file skipped: %s (%s)", path, exc)
            continue
        parsed.append((label, language, path, tree))
        label_seen[label] += 1

    for label, count in sorted(label_seen.items()):
        if count == 0:
            raise EmptyClass(f"label {label!r} has no usable files")
    if not parsed:
        raise EmptyCorpus(f"{root}: no usable files")

    labels = sorted(label_seen)
    index = {name: i for i, name in enumerate(labels)}
    return [LabeledSample(source_path=str(path), language=language,
                          label=label, label_index=index[label], tree=tree)
            for label, language, path, tree in parsed]


def corpus_labels(samples: list[LabeledSample]) -> list[str]:
    return sorted({s.label for s in samples})


def corpus_languages(samples: list[LabeledSample]) -> list[str]:
    return sorted({s.language for s in samples})


def _largest_remainder(n: int, ratios: tuple[int, ...]) -> list[int]:
    total = sum(ratios)
    quotas = [n * r / total for r in ratios]
    base = [math.floor(q) for q in quotas]
    order = sorted(range(len(ratios)),
                   key=lambda i: (-(quotas[i] - base[i]), i))
    for i in order[:n - sum(base)]:
        base[i] += 1
    return base


def split_dataset(samples: list[LabeledSample], seed: int,
                  ratios: tuple[int, int, int] = DEFAULT_RATIOS,
                  ) -> dict[str, list[LabeledSample]]:
    """Seeded per-language stratified split by largest remainder.

    Equal fractional remainders favor the earlier part, so a 5-sample
    stratum under 3:1:1 lands exactly 3/1/1.
    """
    if len(ratios) != 3 or any(r < 0 for r in ratios) or sum(ratios) <= 0:
        raise DataError(f"bad split ratios {ratios!r}")
    rng = np.random.default_rng([seed, 0])
    out: dict[str, list[LabeledSample]] = {name: [] for name in SPLIT_NAMES}
    by_language: dict[str, list[LabeledSample]] = {}
    for s in samples:
        by_language.setdefault(s.language, []).append(s)
    for language in sorted(by_language):
        group = sorted(by_language[language],
                       key=lambda s: (s.label, s.source_path))
        perm = rng.permutation(len(group))
        shuffled = [group[i] for i in perm]
        counts = _largest_remainder(len(group), tuple(ratios))
        at = 0
        for name, take in zip(SPLIT_NAMES, counts):
            out[name].extend(shuffled[at:at + take])
            at += take
    return out
