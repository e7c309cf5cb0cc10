"""Parsing, node-kind unification, and the frozen kind vocabulary."""

from .backends import (
    EXTENSION_LANGUAGES,
    SEXPR_EXTENSION,
    language_for_extension,
    normalize_language,
    parse_source,
    register_backend,
    registered_languages,
)
from .tree import (
    ERROR_KIND,
    AstNode,
    has_error_nodes,
    load_ast_sexpr,
    node_count,
    preorder,
    render_sexpr,
)
from .unify import (
    UnificationTable,
    identity_table,
    load_default_table,
    load_unification_table,
    parse_unification_table,
    unify_ast,
)
from .vocab import (
    PAD_INDEX,
    PAD_LABEL,
    UNK_LABEL,
    Vocabulary,
    build_vocabulary,
    vocabulary_from_kinds,
)

__all__ = [
    "AstNode", "ERROR_KIND", "preorder", "node_count", "has_error_nodes",
    "load_ast_sexpr", "render_sexpr",
    "parse_source", "register_backend", "registered_languages",
    "normalize_language", "language_for_extension",
    "EXTENSION_LANGUAGES", "SEXPR_EXTENSION",
    "UnificationTable", "unify_ast", "load_unification_table",
    "parse_unification_table", "load_default_table", "identity_table",
    "Vocabulary", "build_vocabulary", "vocabulary_from_kinds",
    "PAD_INDEX", "PAD_LABEL", "UNK_LABEL",
]
