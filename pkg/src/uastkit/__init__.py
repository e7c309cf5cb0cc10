"""Cross-language program classification over unified abstract syntax trees."""

__version__ = "0.1.0"
