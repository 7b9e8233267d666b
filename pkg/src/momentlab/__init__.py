"""momentlab: numerical laboratory for mixed moments of twisted L-functions."""

__version__ = "0.1.0"
