"""Mining relation and type axioms for categories of a category graph."""

__version__ = "0.1.0"
