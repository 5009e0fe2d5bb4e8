"""Planning as explicit-state model checking."""

__version__ = "0.1.0"
