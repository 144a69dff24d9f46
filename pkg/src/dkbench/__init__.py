"""dK-random graph anonymization benchmark."""

__version__ = "0.1.0"
