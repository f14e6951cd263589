"""Exhaustive and exact checks around Schur's question on quadratic non-residue runs."""

__version__ = "0.1.0"
