"""
Health check endpoints
"""

from fastapi import APIRouter, Depends

from lorentz_lab.core.config import settings
from lorentz_lab.services.experiment_service import ExperimentService, get_experiment_service

router = APIRouter()


@router.get("/")
async def health_check():
    """Basic health check"""
    return {
        "status": "healthy",
        "service": settings.app_name,
        "version": settings.app_version,
    }


@router.get("/detailed")
async def detailed_health_check(service: ExperimentService = Depends(get_experiment_service)):
    """Health check listing the registered experiments"""
    return {
        "status": "healthy",
        "service": settings.app_name,
        "version": settings.app_version,
        "experiments": service.names(),
        "max_workers": settings.max_workers,
    }
