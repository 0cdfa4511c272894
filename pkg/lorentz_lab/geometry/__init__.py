"""
Geometry of the infinite-dimensional hyperbolic and Hilbert spaces
"""
