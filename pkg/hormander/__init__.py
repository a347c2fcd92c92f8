"""
Numerical toolkit for multilinear pseudo-differential operators on a periodic box
"""
__version__ = "0.1.0"
