"""Shared fixtures and tree builders for the test suite."""

from pathlib import Path

import numpy as np
import pytest

from uastkit.ast_frontend import AstNode, Vocabulary, load_default_table
from uastkit.featurizer import GraphSample, PathSequence
from uastkit.model import ModelConfig

TOY_CORPUS = Path(__file__).resolve().parents[1] / "src" / "uastkit" / \
    "data" / "toy_corpus"

# verdict lines queued by the acceptance tests; printed after the run so
# they survive output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance verdicts")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_tree(rng: np.random.Generator, max_nodes: int = 30,
                kinds=("alpha", "beta", "gamma", "delta", "epsilon")) -> AstNode:
    """Random rooted ordered tree; each new node picks a random parent."""
    n = int(rng.integers(1, max_nodes + 1))
    nodes = [AstNode(str(rng.choice(kinds)))]
    for _ in range(n - 1):
        parent = nodes[int(rng.integers(len(nodes)))]
        child = AstNode(str(rng.choice(kinds)))
        parent.children.append(child)
        nodes.append(child)
    return nodes[0]


def chain_tree(kinds: list[str]) -> AstNode:
    """A single path: kinds[0] -> kinds[1] -> ... -> kinds[-1]."""
    root = AstNode(kinds[0])
    at = root
    for kind in kinds[1:]:
        node = AstNode(kind)
        at.children.append(node)
        at = node
    return root


def make_path(indices, L: int) -> PathSequence:
    arr = np.zeros(L, dtype=np.int64)
    arr[:len(indices)] = indices
    return PathSequence(indices=arr, true_length=len(indices))


def make_graph(kinds, edges, N: int) -> GraphSample:
    arr = np.zeros(N, dtype=np.int64)
    arr[:len(kinds)] = kinds
    return GraphSample(node_kinds=arr, node_count=len(kinds),
                       edges=tuple(edges))


@pytest.fixture(scope="session")
def default_table():
    return load_default_table()


@pytest.fixture
def tiny_config() -> ModelConfig:
    return ModelConfig(vocab_size=10, k=3, mode="uast", L=6, d=8, heads=2,
                       attn_dropout=0.2, h=4, lstm_layers=2, lstm_dropout=0.5,
                       N=6, gcn_layers=2, gcn_hidden=5, d_out=4).validate()


@pytest.fixture
def tiny_vocab() -> Vocabulary:
    return Vocabulary(tuple(f"kind{i}" for i in range(8)))


@pytest.fixture
def toy_corpus_dir() -> Path:
    assert TOY_CORPUS.is_dir()
    return TOY_CORPUS
