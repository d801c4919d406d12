"""Face image preprocessing, feature extraction, and classification toolkit."""

__version__ = "0.1.0"
