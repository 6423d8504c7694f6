"""Linear involutions: exact renormalization, cocycle diagnostics, and the
piecewise-constant-correction coboundary solver."""

__version__ = "0.1.0"
