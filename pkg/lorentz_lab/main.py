"""
Main FastAPI application for lorentz-lab
"""

from contextlib import asynccontextmanager

from fastapi import FastAPI

from lorentz_lab.api.v1.api import api_router
from lorentz_lab.core.config import settings
from lorentz_lab.core.logging import get_logger, setup_logging
from lorentz_lab.services.experiment_service import get_experiment_service

logger = get_logger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan events"""
    # Startup
    setup_logging()
    service = await get_experiment_service()
    logger.info("lorentz-lab starting up", experiments=service.names())

    yield
    # Shutdown
    logger.info("lorentz-lab shutting down")


def create_application() -> FastAPI:
    """Create and configure the FastAPI application"""

    app = FastAPI(
        title=settings.app_name,
        version=settings.app_version,
        description="Seeded experiments on the infinite-dimensional hyperbolic and Hilbert spaces",
        docs_url="/docs",
        redoc_url="/redoc",
        lifespan=lifespan,
    )

    # Include API routes
    app.include_router(api_router, prefix="/api/v1")

    return app


app = create_application()


@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "message": "lorentz-lab experiment service",
        "version": settings.app_version,
        "status": "operational",
    }


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {
        "status": "healthy",
        "service": settings.app_name,
        "version": settings.app_version,
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "lorentz_lab.main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.reload,
        log_level=settings.log_level.lower(),
    )
