"""Single-stream DAB+ passive radar via posterior-aware differential CSI tracking."""

__version__ = "0.1.0"
