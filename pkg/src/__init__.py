"""
GPFP Toolkit
Free cumulants, Hankel tests and univalence checks for GPFP laws.
"""

__version__ = "1.0.0"
