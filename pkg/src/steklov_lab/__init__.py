"""steklov_lab: a numerical laboratory for weighted Steklov problems on the disk."""

__version__ = "0.1.0"
