"""Frozen kind vocabulary shared by both model inputs.

Index 0 is reserved for padding and never assigned to a real kind; the
unknown-kind index sits one past the last real kind.  Construction happens
once, over the training split only, and the result never changes afterwards:
kinds first seen at inference map to the unknown index.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable

from ..errors import EmptyCorpus
from .tree import AstNode, preorder

PAD_INDEX = 0
PAD_LABEL = "<pad>"
UNK_LABEL = "<unk>"


@dataclass(frozen=True)
class Vocabulary:
    kinds: tuple[str, ...]  # real kinds in index order, index = position + 1
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index",
                           {kind: i + 1 for i, kind in enumerate(self.kinds)})

    @property
    def unk_index(self) -> int:
        return len(self.kinds) + 1

    @property
    def size(self) -> int:
        """Total index count including PAD and UNK."""
        return len(self.kinds) + 2

    def index_of(self, kind: str) -> int:
        return self._index.get(kind, self.unk_index)

    def kind_of(self, index: int) -> str:
        if index == PAD_INDEX:
            return PAD_LABEL
        if index == self.unk_index:
            return UNK_LABEL
        if 1 <= index <= len(self.kinds):
            return self.kinds[index - 1]
        raise IndexError(f"index {index} outside vocabulary of size {self.size}")

    @property
    def vocab_hash(self) -> str:
        payload = "\n".join(self.kinds).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()


def build_vocabulary(corpus: Iterable[AstNode]) -> Vocabulary:
    """Collect unified kinds from training trees into a frozen vocabulary.

    Kinds are sorted lexicographically and indexed from 1; raises
    EmptyCorpus when the iterator yields nothing.
    """
    seen: set[str] = set()
    count = 0
    for root in corpus:
        count += 1
        for node in preorder(root):
            seen.add(node.kind)
    if count == 0:
        raise EmptyCorpus("cannot build a vocabulary from zero trees")
    return Vocabulary(tuple(sorted(seen)))


def vocabulary_from_kinds(kinds: Iterable[str]) -> Vocabulary:
    """Rebuild a vocabulary from a stored kind list, preserving order."""
    return Vocabulary(tuple(kinds))
