"""Exact infinitesimal symmetries of (n+1)-webs."""

__version__ = "0.1.0"
