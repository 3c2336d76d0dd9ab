"""Stokes data of irregular connections and their hbar-truncated quantization."""

__version__ = "0.1.0"
