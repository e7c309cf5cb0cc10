"""Registry mapping language ids to parser callables.

Built-in backends cover c, cpp, java, javascript (subset recursive descent)
and python (stdlib parser).  A language with no registered backend can still
enter the pipeline through pre-parsed S-expression files; parse_source simply
refuses it.
"""

from __future__ import annotations

from typing import Callable

from ..errors import UnknownExtension, UnsupportedLanguage
from . import clike_backend, python_backend
from .tree import AstNode

Backend = Callable[[str], AstNode]

# alias -> canonical id; keys are casefolded before lookup
_ALIASES = {
    "c": "c",
    "c++": "cpp", "cpp": "cpp", "cxx": "cpp", "cc": "cpp",
    "java": "java",
    "python": "python", "py": "python", "python3": "python",
    "javascript": "javascript", "js": "javascript", "node": "javascript",
}

EXTENSION_LANGUAGES = {
    ".c": "c",
    ".cpp": "cpp", ".cc": "cpp", ".cxx": "cpp",
    ".java": "java",
    ".py": "python",
    ".js": "javascript",
}

SEXPR_EXTENSION = ".sexpr"

_BACKENDS: dict[str, Backend] = {}


def normalize_language(language: str) -> str:
    canonical = _ALIASES.get(language.strip().casefold())
    if canonical is None:
        raise UnsupportedLanguage(f"unknown language id {language!r}")
    return canonical


def language_for_extension(ext: str) -> str:
    lang = EXTENSION_LANGUAGES.get(ext.casefold())
    if lang is None:
        raise UnknownExtension(f"no language registered for extension {ext!r}")
    return lang


def register_backend(language: str, parser: Backend) -> None:
    """Attach a parser to a language id, replacing any existing one."""
    _BACKENDS[normalize_language(language)] = parser


def registered_languages() -> list[str]:
    return sorted(_BACKENDS)


def parse_source(text: str, language: str) -> AstNode:
    """Parse source text in the given language into an AST.

    Raises UnsupportedLanguage when no backend is registered for the
    language, ParseFailure when the backend cannot produce a tree at all.
    Trees containing ERROR nodes are returned, not rejected.
    """
    lang = normalize_language(language)
    backend = _BACKENDS.get(lang)
    if backend is None:
        raise UnsupportedLanguage(f"no grammar backend registered for {lang!r}")
    return backend(text)


register_backend("c", clike_backend.parse_c)
register_backend("cpp", clike_backend.parse_cpp)
register_backend("java", clike_backend.parse_java)
register_backend("javascript", clike_backend.parse_javascript)
register_backend("python", python_backend.parse_python)
