"""Approximate and quasi quantum error correction toolkit with SU(d) valence-bond-solid codes."""

__version__ = "0.1.0"
