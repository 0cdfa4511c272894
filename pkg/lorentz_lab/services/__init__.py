"""
Services package for lorentz-lab
"""
