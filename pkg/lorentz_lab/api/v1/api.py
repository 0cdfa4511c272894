"""
Main API router for v1 endpoints
"""

from fastapi import APIRouter

from lorentz_lab.api.v1.endpoints import experiments, health

api_router = APIRouter()

# Include all endpoint routers
api_router.include_router(health.router, prefix="/health", tags=["health"])
api_router.include_router(experiments.router, prefix="/experiments", tags=["experiments"])
