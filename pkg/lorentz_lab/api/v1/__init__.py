"""
Version 1 of the lorentz-lab HTTP API
"""
