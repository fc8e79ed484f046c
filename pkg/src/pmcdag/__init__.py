"""Parametric Markov chain analysis with hash-consed arithmetic circuits."""
__version__ = "0.1.0"
