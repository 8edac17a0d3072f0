"""Exact certificates of infeasibility and validity for integer programs."""
__version__ = "0.1.0"
