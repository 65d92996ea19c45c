"""Well-quasi-orders on words: closures, ideals and piecewise-testable separability."""

__version__ = "1.0.0"
