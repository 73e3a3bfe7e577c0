"""Low-autocorrelation binary sequence search: solvers, oracle, statistics."""

__version__ = "0.1.0"
