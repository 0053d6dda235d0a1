"""Grid knot Floer homology and a mechanically checked skein exact triangle."""

__version__ = "0.1.0"
