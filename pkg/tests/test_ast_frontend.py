"""Trees, the S-expression interchange, tables, vocabulary, and unification."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chain_tree, random_tree
from uastkit.ast_frontend import (
    PAD_INDEX,
    PAD_LABEL,
    UNK_LABEL,
    AstNode,
    UnificationTable,
    Vocabulary,
    build_vocabulary,
    identity_table,
    load_ast_sexpr,
    load_default_table,
    node_count,
    parse_source,
    parse_unification_table,
    preorder,
    render_sexpr,
    unify_ast,
    vocabulary_from_kinds,
)
from uastkit.errors import (
    DuplicateMapping,
    EmptyCorpus,
    MalformedSExpr,
    TableFormatError,
)


# --- trees and interchange ---------------------------------------------------

class TestSExpr:
    def test_roundtrip_simple(self):
        tree = load_ast_sexpr("(unit (function_definition (block)))")
        assert tree.kind == "unit"
        assert render_sexpr(tree) == "(unit (function_definition (block)))"

    def test_leaf_renders_bare(self):
        assert render_sexpr(AstNode("identifier")) == "(identifier)"

    def test_whitespace_is_insignificant(self):
        a = load_ast_sexpr("(a(b)(c))")
        b = load_ast_sexpr("  ( a \n ( b )\t( c ) ) ")
        assert a == b

    @pytest.mark.parametrize("text", ["", "(", ")", "(a", "(a))", "(a) (b)",
                                      "()", "a"])
    def test_malformed_raises_with_offset(self, text):
        with pytest.raises(MalformedSExpr) as err:
            load_ast_sexpr(text)
        assert err.value.offset >= 0

    def test_preorder_order(self):
        tree = load_ast_sexpr("(a (b (c) (d)) (e))")
        assert [n.kind for n in preorder(tree)] == ["a", "b", "c", "d", "e"]

    def test_random_trees_roundtrip(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            tree = random_tree(rng, max_nodes=40)
            again = load_ast_sexpr(render_sexpr(tree))
            assert again == tree
            assert node_count(again) == node_count(tree)

    def test_deep_tree_no_recursion_limit(self):
        deep = chain_tree(["k"] * 5000)
        text = render_sexpr(deep)
        assert node_count(load_ast_sexpr(text)) == 5000


# --- unification tables --------------------------------------------------------

TABLE_TEXT = """\
# shared kinds
[java]
program = unit
method_declaration = function_definition

[python]
module = unit
"""


class TestTableParsing:
    def test_sections_and_lookup(self):
        table = parse_unification_table(TABLE_TEXT)
        assert table.lookup("java", "program") == "unit"
        assert table.lookup("python", "module") == "unit"
        # unmapped kinds pass through
        assert table.lookup("java", "identifier") == "identifier"
        assert table.lookup("ruby", "anything") == "anything"

    def test_comments_and_blank_lines_ignored(self):
        table = parse_unification_table(
            "# top\n\n[java]\n  # indented comment\nprogram = unit  # tail\n")
        assert table.lookup("java", "program") == "unit"

    def test_empty_text_is_passthrough(self):
        table = parse_unification_table("")
        assert table.lookup("java", "program") == "program"

    def test_targets_must_be_fixed_points(self):
        # a target that is itself remapped would make lookup order-dependent
        bad = "[java]\nprogram = unit\nunit = other\n"
        with pytest.raises(TableFormatError) as err:
            parse_unification_table(bad)
        # the error points at the entry whose target is no longer a fixed point
        assert err.value.line == 2
        assert "fixed point" in str(err.value)

    def test_contradicting_duplicate_raises(self):
        with pytest.raises(DuplicateMapping):
            parse_unification_table("[java]\nx = a\nx = b\n")

    def test_repeated_identical_entry_allowed(self):
        table = parse_unification_table("[java]\nx = a\nx = a\n")
        assert table.lookup("java", "x") == "a"

    @pytest.mark.parametrize("text,line", [
        ("x = y\n", 1),              # entry before any section
        ("[java\nx = y\n", 1),       # unterminated header
        ("[]\n", 1),                 # empty section name
        ("[java]\nnovalue\n", 2),    # missing separator
        ("[java]\nx = \n", 2),       # empty target
        ("[java]\nx = a b\n", 2),    # whitespace inside a label
    ])
    def test_format_errors_carry_line_numbers(self, text, line):
        with pytest.raises(TableFormatError) as err:
            parse_unification_table(text)
        assert err.value.line == line

    def test_hash_ignores_entry_order(self):
        a = parse_unification_table("[java]\na = x\nb = y\n")
        b = parse_unification_table("[java]\nb = y\na = x\n")
        assert a.table_hash == b.table_hash

    def test_hash_differs_on_content(self):
        a = parse_unification_table("[java]\na = x\n")
        b = parse_unification_table("[java]\na = y\n")
        assert a.table_hash != b.table_hash


class TestDefaultTable:
    def test_root_kinds_unify(self, default_table):
        for language, kind in (("java", "program"),
                               ("cpp", "translation_unit"),
                               ("python", "module")):
            assert default_table.lookup(language, kind) == "unit"

    def test_block_kinds_unify(self, default_table):
        assert default_table.lookup("cpp", "compound_statement") == "block"
        assert default_table.lookup("javascript", "statement_block") == "block"

    def test_all_targets_are_fixed_points(self, default_table):
        for language, section in default_table.sections.items():
            for target in section.values():
                assert section.get(target, target) == target


class TestUnifyAst:
    def test_renames_and_preserves_shape(self):
        table = parse_unification_table("[java]\nprogram = unit\n")
        tree = load_ast_sexpr("(program (method (program)))")
        out = unify_ast(tree, "java", table)
        assert render_sexpr(out) == "(unit (method (unit)))"
        # the input tree is untouched
        assert tree.kind == "program"

    def test_identity_table_is_noop(self):
        tree = load_ast_sexpr("(a (b) (c (d)))")
        assert unify_ast(tree, "java", identity_table()) == tree

    def test_shape_preserved_on_random_trees(self, default_table):
        rng = np.random.default_rng(3)
        for _ in range(25):
            tree = random_tree(rng, max_nodes=60,
                               kinds=("program", "block", "identifier",
                                      "binary_operator"))
            out = unify_ast(tree, "python", default_table)
            pairs = list(zip(preorder(tree), preorder(out)))
            assert len(pairs) == node_count(tree)
            for src, dst in pairs:
                assert len(src.children) == len(dst.children)
                assert dst.kind == default_table.lookup("python", src.kind)


# --- vocabulary -----------------------------------------------------------------

class TestVocabulary:
    def test_layout(self):
        vocab = build_vocabulary([load_ast_sexpr("(b (a) (c))")])
        assert vocab.kinds == ("a", "b", "c")
        assert PAD_INDEX == 0
        assert vocab.index_of("a") == 1
        assert vocab.index_of("c") == 3
        assert vocab.unk_index == 4
        assert vocab.size == 5

    def test_unknown_kind_maps_to_unk(self):
        vocab = vocabulary_from_kinds(["x"])
        assert vocab.index_of("never_seen") == vocab.unk_index

    def test_kind_of_labels(self):
        vocab = vocabulary_from_kinds(["x", "y"])
        assert vocab.kind_of(0) == PAD_LABEL
        assert vocab.kind_of(1) == "x"
        assert vocab.kind_of(3) == UNK_LABEL
        with pytest.raises(IndexError):
            vocab.kind_of(4)

    def test_empty_corpus_raises(self):
        with pytest.raises(EmptyCorpus):
            build_vocabulary([])

    def test_hash_depends_only_on_kinds(self):
        a = build_vocabulary([load_ast_sexpr("(a (b))")])
        b = build_vocabulary([load_ast_sexpr("(b (a) (a))")])
        assert a.vocab_hash == b.vocab_hash

    @given(st.lists(st.text(alphabet="abcdefg", min_size=1, max_size=6),
                    min_size=1, max_size=20, unique=True))
    @settings(max_examples=50, deadline=None)
    def test_indices_are_a_bijection(self, kinds):
        vocab = vocabulary_from_kinds(sorted(kinds))
        seen = {vocab.index_of(k) for k in kinds}
        assert len(seen) == len(kinds)
        assert all(0 < i < vocab.unk_index for i in seen)


# --- python backend smoke (cross-language details live in test_backends) -------

class TestPythonBackend:
    def test_module_and_function(self):
        tree = parse_source("def f(a, b):\n    return a + b\n", "python")
        kinds = [n.kind for n in preorder(tree)]
        assert tree.kind == "module"
        assert "function_definition" in kinds
        assert "binary_operator" in kinds

    def test_unifies_to_shared_kinds(self, default_table):
        tree = parse_source("def f(a):\n    return a\n", "python")
        out = unify_ast(tree, "python", default_table)
        kinds = {n.kind for n in preorder(out)}
        assert out.kind == "unit"
        assert "block" in kinds

    def test_empty_source_gives_bare_root(self):
        assert node_count(parse_source("", "python")) == 1
