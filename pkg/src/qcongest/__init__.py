"""Message-metered simulator of quantum distributed protocols in the CONGEST model."""

__version__ = "0.1.0"
