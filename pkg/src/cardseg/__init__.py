"""Business-card segmentation: text regions, skew, binarization, lines, characters."""

__version__ = "0.1.0"
