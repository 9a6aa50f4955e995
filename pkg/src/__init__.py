"""
bivariate-mops - exact quadratic decomposition of bivariate monic orthogonal polynomial systems
"""

__version__ = "0.4.0"
__author__ = "Benjamin Poppe"
