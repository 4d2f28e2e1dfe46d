"""Maximal surfaces in anti-de Sitter 3-space with poles of higher order."""

__version__ = "0.1.0"
