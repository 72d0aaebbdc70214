"""Role extraction in directed graphs from pairwise neighborhood-pattern similarity."""

__version__ = "0.1.0"
