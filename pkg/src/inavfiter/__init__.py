"""
Strapdown inertial navigation by Chebyshev fitting and functional iteration.
"""

__version__ = "0.1.0"
