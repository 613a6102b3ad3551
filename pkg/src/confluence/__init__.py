"""Component-based coupling framework for surface-process models."""

__version__ = "0.1.0"
