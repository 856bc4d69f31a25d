"""Channel comparison: diamond norms, dual diamond norms and deficiency."""
__version__ = "0.1.0"
