"""
lorentz-lab: computable hyperbolic and Hilbert geometry at desk scale
"""

__version__ = "0.1.0"
