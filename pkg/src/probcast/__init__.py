"""Average consensus with probabilistic broadcast scheduling."""

__version__ = "0.1.0"
