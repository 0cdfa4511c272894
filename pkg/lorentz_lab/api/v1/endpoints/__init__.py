"""
Endpoint routers
"""
