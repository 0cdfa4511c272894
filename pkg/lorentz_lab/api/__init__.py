"""
API package for lorentz-lab
"""
