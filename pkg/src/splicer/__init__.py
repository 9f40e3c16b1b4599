"""Complete draft programs with holes using code retrieved from a corpus."""

__version__ = "0.1.0"
