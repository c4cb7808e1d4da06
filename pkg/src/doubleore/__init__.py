"""Construction and degree-wise certification of double Ore extensions."""

__version__ = "0.1.0"
