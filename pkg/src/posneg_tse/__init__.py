"""Target speaker extraction conditioned on positive/negative enrollment pairs."""

__version__ = "0.1.0"
