"""Drake equation as a low-statistics Poisson counting experiment."""

__version__ = "0.1.0"
