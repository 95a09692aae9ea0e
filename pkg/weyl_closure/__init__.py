"""
Weyl Closure - partial Weyl closure of D-modules by truncated saturation.

This package contains the exact arithmetic, the Gröbner basis engine for
modules over Weyl algebras, the holonomicity and singular locus tools, and
the ``wclose`` command line built on them.
"""

__version__ = "0.1.0"
