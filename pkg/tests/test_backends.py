"""Per-language parsers: structure, recovery, and the language registry."""

import pytest

from uastkit.ast_frontend import (
    node_count,
    parse_source,
    preorder,
    unify_ast,
)
from uastkit.ast_frontend.backends import (
    EXTENSION_LANGUAGES,
    SEXPR_EXTENSION,
    language_for_extension,
    normalize_language,
    registered_languages,
)
from uastkit.errors import ParseFailure, UnknownExtension, UnsupportedLanguage

ADD_SNIPPETS = {
    "java": "public class A { static int add(int a, int b) { return a + b; } }",
    "cpp": "int add(int a, int b) { return a + b; }",
    "c": "int add(int a, int b) { return a + b; }",
    "javascript": "function add(a, b) { return a + b; }",
    "python": "def add(a, b):\n    return a + b\n",
}


def kinds_of(tree):
    return [n.kind for n in preorder(tree)]


# --- per-language structure -----------------------------------------------------

class TestParsing:
    @pytest.mark.parametrize("language", sorted(ADD_SNIPPETS))
    def test_add_function_parses(self, language):
        tree = parse_source(ADD_SNIPPETS[language], language)
        kinds = kinds_of(tree)
        assert node_count(tree) >= 5
        assert "identifier" in kinds
        assert "ERROR" not in kinds

    def test_java_structure(self):
        kinds = kinds_of(parse_source(ADD_SNIPPETS["java"], "java"))
        for kind in ("program", "class_declaration", "method_declaration",
                     "formal_parameters", "block", "return_statement",
                     "binary_expression"):
            assert kind in kinds

    def test_cpp_structure(self):
        kinds = kinds_of(parse_source(ADD_SNIPPETS["cpp"], "cpp"))
        for kind in ("translation_unit", "function_definition",
                     "parameter_list", "compound_statement",
                     "return_statement"):
            assert kind in kinds

    def test_python_structure(self):
        kinds = kinds_of(parse_source(ADD_SNIPPETS["python"], "python"))
        for kind in ("module", "function_definition", "parameters", "block",
                     "return_statement", "binary_operator"):
            assert kind in kinds

    def test_javascript_structure(self):
        kinds = kinds_of(parse_source(ADD_SNIPPETS["javascript"],
                                      "javascript"))
        for kind in ("program", "function_declaration", "statement_block",
                     "return_statement"):
            assert kind in kinds

    def test_c_control_flow(self):
        src = ("int main() {\n"
               "  int s = 0;\n"
               "  for (int i = 0; i < 10; i++) { s += i; }\n"
               "  while (s > 5) { s--; }\n"
               "  if (s == 5) { return s; } else { return 0; }\n"
               "}\n")
        kinds = kinds_of(parse_source(src, "c"))
        for kind in ("for_statement", "while_statement", "if_statement",
                     "call_expression" if "call_expression" in kinds
                     else "update_expression"):
            assert kind in kinds

    def test_python_control_flow(self):
        src = ("def f(xs):\n"
               "    total = 0\n"
               "    for x in xs:\n"
               "        if x > 0:\n"
               "            total += x\n"
               "    while total > 100:\n"
               "        total //= 2\n"
               "    return total\n")
        kinds = kinds_of(parse_source(src, "python"))
        for kind in ("for_statement", "if_statement", "while_statement",
                     "augmented_assignment"):
            assert kind in kinds

    def test_nested_calls_nest_in_tree(self):
        tree = parse_source("def f(a):\n    return g(h(a))\n", "python")
        calls = [n for n in preorder(tree) if n.kind == "call"]
        assert len(calls) == 2
        assert any(c.kind == "call" for outer in calls
                   for c in preorder(outer) if c is not outer)

    def test_same_function_different_languages_share_unified_kinds(
            self, default_table):
        shared = None
        for language, src in ADD_SNIPPETS.items():
            tree = unify_ast(parse_source(src, language), language,
                             default_table)
            kinds = set(kinds_of(tree))
            assert tree.kind == "unit"
            shared = kinds if shared is None else shared & kinds
        assert "block" in shared
        assert "identifier" in shared


# --- error handling --------------------------------------------------------------

class TestRecovery:
    @pytest.mark.parametrize("language,src", [
        ("c", "int f() { int x = 1; @@@ ; return x; }"),
        ("cpp", "int f() { return 1 + ; }"),
        ("java", "public class A { void f() { int x = 1; ]]] ; } }"),
        ("javascript", "function f() { let x = 1; @@@ ; return x; }"),
    ])
    def test_bad_statement_becomes_one_error_node(self, language, src):
        kinds = kinds_of(parse_source(src, language))
        assert kinds.count("ERROR") == 1

    def test_recovery_keeps_surrounding_statements(self):
        tree = parse_source("int f() { int x = 1; @@@ ; return x; }", "c")
        kinds = kinds_of(tree)
        assert "declaration" in kinds
        assert "return_statement" in kinds

    @pytest.mark.parametrize("language", sorted(ADD_SNIPPETS))
    def test_pure_garbage_raises(self, language):
        with pytest.raises(ParseFailure):
            parse_source("@@@@ ]]]] ~~~~", language)

    def test_python_syntax_error_raises(self):
        # the python backend has no recovery; any syntax error fails the file
        with pytest.raises(ParseFailure):
            parse_source("def g(:\n    pass\n", "python")


# --- registry -----------------------------------------------------------------

class TestRegistry:
    def test_registered_languages(self):
        assert registered_languages() == ["c", "cpp", "java", "javascript",
                                          "python"]

    @pytest.mark.parametrize("alias,canonical", [
        ("c++", "cpp"), ("C++", "cpp"), ("cxx", "cpp"),
        ("js", "javascript"), ("JS", "javascript"),
        ("Python", "python"), ("py", "python"),
        ("Java", "java"), ("C", "c"),
    ])
    def test_aliases_normalize(self, alias, canonical):
        assert normalize_language(alias) == canonical

    def test_unknown_language_raises(self):
        with pytest.raises(UnsupportedLanguage):
            normalize_language("cobol")
        with pytest.raises(UnsupportedLanguage):
            parse_source("x", "cobol")

    @pytest.mark.parametrize("ext,language", sorted(
        EXTENSION_LANGUAGES.items()))
    def test_extension_map(self, ext, language):
        assert language_for_extension(ext) == language

    def test_unknown_extension_raises(self):
        with pytest.raises(UnknownExtension):
            language_for_extension(".rb")

    def test_sexpr_extension_is_reserved(self):
        assert SEXPR_EXTENSION == ".sexpr"
        assert SEXPR_EXTENSION not in EXTENSION_LANGUAGES
