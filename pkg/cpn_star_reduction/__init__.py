"""
CP^n Star Product Reduction Package

Exact computation of the star products *^D on C^{n+1} minus the origin,
their phase space reduction to CP^n and the equivalence classification.
"""

__version__ = "0.1.0"
