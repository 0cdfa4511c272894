"""
Experiment runner: registry, seeded parallel trials and deterministic reports
"""

import asyncio
import hashlib
import json
import time
from typing import Any, Dict, List, Optional

import numpy as np

from lorentz_lab.core.config import settings, tolerance_scope
from lorentz_lab.core.errors import ExperimentConfigError, LorentzLabError
from lorentz_lab.core.logging import get_logger
from lorentz_lab.models.experiment import (
    Aggregate,
    ExperimentConfig,
    ExperimentName,
    ExperimentReport,
    TrialRecord,
)

logger = get_logger(__name__)


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_digest(payload: Any) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def config_digest(config: ExperimentConfig) -> str:
    return sha256_digest(config.model_dump(mode="json", by_alias=True))


def report_digest(report: ExperimentReport) -> str:
    """sha256 of the canonical report without its timing and digest fields"""
    payload = report.model_dump(mode="json", by_alias=True, exclude={"digest"})
    payload["aggregate"].pop("wall_ms", None)
    return sha256_digest(payload)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Generator owned by one trial, derived from (seed, trial index)"""
    return np.random.default_rng([seed, index])


def trial_record(
    index: int,
    inputs: Dict[str, Any],
    defect: Optional[float],
    bound: float,
    details: Optional[Dict[str, float]] = None,
    excluded: bool = False,
    reason: Optional[str] = None,
) -> TrialRecord:
    """Record with pass iff the defect is below the bound"""
    passed = defect is not None and float(defect) < bound and not excluded
    return TrialRecord(
        trial=index,
        inputs_digest=sha256_digest(inputs),
        defect=None if defect is None else float(defect),
        bound=float(bound),
        passed=passed,
        excluded=excluded,
        reason=reason,
        details={key: float(value) for key, value in (details or {}).items()},
    )


class Experiment:
    """One experiment: configuration checks, shared preparation and a per-trial body"""

    name: ExperimentName
    min_dims: int = 1

    def validate(self, config: ExperimentConfig):
        if config.dims < self.min_dims:
            raise ExperimentConfigError(
                f"{self.name.value} needs dims >= {self.min_dims}, got {config.dims}"
            )

    def prepare(self, config: ExperimentConfig) -> Any:
        return None

    def run_trial(
        self, config: ExperimentConfig, context: Any, index: int, rng: np.random.Generator
    ) -> TrialRecord:
        raise NotImplementedError


class ExperimentService:
    """Runs registered experiments with one seeded generator per trial"""

    def __init__(self):
        self.experiments: Dict[ExperimentName, Experiment] = {}

    def register(self, experiment: Experiment):
        self.experiments[experiment.name] = experiment

    def names(self) -> List[str]:
        return [name.value for name in self.experiments]

    def get(self, name: str) -> Experiment:
        try:
            return self.experiments[ExperimentName(name)]
        except (KeyError, ValueError):
            raise ExperimentConfigError(f"unknown experiment {name!r}")

    @staticmethod
    def _run_trial(
        experiment: Experiment, config: ExperimentConfig, context: Any, index: int
    ) -> TrialRecord:
        rng = trial_rng(config.seed, index)
        try:
            return experiment.run_trial(config, context, index, rng)
        except LorentzLabError as e:
            logger.error(
                f"Trial {index} of {experiment.name.value} failed: {str(e)}",
                error=type(e).__name__,
            )
            return trial_record(
                index, {"seed": config.seed, "trial": index}, None, 0.0, reason=type(e).__name__
            )

    async def run(self, name: str, config: ExperimentConfig) -> ExperimentReport:
        """Run every trial of an experiment and merge the records by trial index"""
        experiment = self.get(name)
        experiment.validate(config)
        digest = config_digest(config)
        overrides = config.tolerances
        logger.info("Experiment started", experiment=experiment.name.value, config_digest=digest)

        started = time.perf_counter()
        with tolerance_scope(
            overrides.abs_tol if overrides else None,
            overrides.rel_tol if overrides else None,
        ):
            context = experiment.prepare(config)
            semaphore = asyncio.Semaphore(max(1, settings.max_workers))

            async def bounded(index: int) -> TrialRecord:
                async with semaphore:
                    return await asyncio.to_thread(
                        self._run_trial, experiment, config, context, index
                    )

            records = await asyncio.gather(*(bounded(i) for i in range(config.trials)))
        wall_ms = (time.perf_counter() - started) * 1000.0

        counted = [r for r in records if not r.excluded]
        defects = [r.defect for r in counted if r.defect is not None]
        aggregate = Aggregate(
            max_defect=max(defects) if defects else None,
            passed=all(r.passed for r in counted),
            wall_ms=round(wall_ms, 3),
            excluded=len(records) - len(counted),
        )
        report = ExperimentReport(
            experiment=experiment.name,
            config_digest=digest,
            trials=sorted(records, key=lambda r: r.trial),
            aggregate=aggregate,
        )
        report.digest = report_digest(report)
        logger.info(
            "Experiment finished",
            experiment=experiment.name.value,
            passed=aggregate.passed,
            max_defect=aggregate.max_defect,
            excluded=aggregate.excluded,
            wall_ms=aggregate.wall_ms,
            digest=report.digest,
        )
        return report


def build_experiment_service() -> ExperimentService:
    from lorentz_lab.services.compactification_experiments import (
        CompactificationExperiment,
        WeakContinuityExperiment,
    )
    from lorentz_lab.services.conjugacy_experiments import (
        DenseConjugacyExperiment,
        NoDenseConjugacyExperiment,
    )
    from lorentz_lab.services.decomposition_experiments import DecompositionExperiment
    from lorentz_lab.services.rotation_experiments import SteinhausExperiment

    service = ExperimentService()
    for experiment in (
        NoDenseConjugacyExperiment(),
        DenseConjugacyExperiment(),
        SteinhausExperiment(),
        CompactificationExperiment(),
        DecompositionExperiment(),
        WeakContinuityExperiment(),
    ):
        service.register(experiment)
    return service


# Global experiment service instance
experiment_service: Optional[ExperimentService] = None


async def get_experiment_service() -> ExperimentService:
    """Get the global experiment service instance"""
    global experiment_service
    if experiment_service is None:
        experiment_service = build_experiment_service()
    return experiment_service
