"""Presentation layer for sandtable CSV artifacts."""

from .render import KINDS, RenderError, render

__version__ = "0.1.0"
