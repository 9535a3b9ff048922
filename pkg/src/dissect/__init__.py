"""Exact verification and enumeration tools for triangle/square dissections."""

__version__ = "0.1.0"
