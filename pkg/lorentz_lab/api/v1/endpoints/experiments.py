"""
Experiment endpoints
"""

from fastapi import APIRouter, Depends, HTTPException, status

from lorentz_lab.core.errors import ExperimentConfigError, LorentzLabError
from lorentz_lab.core.logging import get_logger
from lorentz_lab.models.experiment import ExperimentConfig, ExperimentName, ExperimentReport
from lorentz_lab.services.experiment_service import ExperimentService, get_experiment_service

router = APIRouter()
logger = get_logger(__name__)


@router.get("/")
async def list_experiments(service: ExperimentService = Depends(get_experiment_service)):
    """Names of the experiments that can be run"""
    return {"experiments": service.names()}


@router.post("/{name}", response_model=ExperimentReport)
async def run_experiment(
    name: ExperimentName,
    config: ExperimentConfig,
    service: ExperimentService = Depends(get_experiment_service),
):
    """Run an experiment and return its report"""
    try:
        return await service.run(name.value, config)
    except ExperimentConfigError as e:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))
    except LorentzLabError as e:
        logger.error(f"Experiment {name.value} rejected: {str(e)}", error=type(e).__name__)
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"{type(e).__name__}: {e}",
        )
