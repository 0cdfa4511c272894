"""
Horofunction compactification experiments
"""

from itertools import combinations
from typing import Dict, List

import numpy as np

from lorentz_lab.geometry.euclid import (
    e_compose,
    e_identity,
    hilbert_frustum_action,
    translation,
)
from lorentz_lab.geometry.horoboundary import (
    FrustumPoint,
    frustum_action,
    weak_convergence_probe,
)
from lorentz_lab.geometry.isometry import HypIsometry, compose, identity, transvection
from lorentz_lab.geometry.lorentz_core import SparseVec
from lorentz_lab.geometry.models import Geodesic, HPoint
from lorentz_lab.geometry.oracles import (
    frustum_pushforward_defect,
    hilbert_pushforward_defect,
    klein_grid,
    refit_defect,
)
from lorentz_lab.geometry.sampling import (
    random_ball_point,
    random_euclidean,
    random_frustum_point,
    random_hilbert_vector,
    random_isometry,
)
from lorentz_lab.models.experiment import ExperimentConfig, ExperimentName, TrialRecord
from lorentz_lab.services.experiment_service import Experiment, trial_record

ACTION_BOUND = 1e-8
REFIT_TOLERANCE = 1e-6
WITNESS_GAP = 1e-6
GRID_SIZE = 64
LEVELS = (0.2, 0.5, 0.9)


def frustum_distance(a: FrustumPoint, b: FrustumPoint) -> float:
    return float((a.x.coords - b.x.coords).norm() + abs(a.r - b.r))


def ball_component_spread(g: HypIsometry, x: SparseVec, levels=LEVELS) -> float:
    """Largest change of the ball component of g (x, r) across the levels"""
    images = [frustum_action(g, FrustumPoint.of(x, r)).x.coords for r in levels]
    return max((a - b).norm() for a, b in combinations(images, 2))


def hilbert_level_gap(v: SparseVec, x: SparseVec, levels=(0.0, 0.5)) -> float:
    """Change of the ball component of tau_v (x, r) between two levels; |x| must not exceed either level"""
    first, second = (hilbert_frustum_action(translation(v), FrustumPoint.of(x, r)) for r in levels)
    return float((first.x.coords - second.x.coords).norm())


def _small_ball_vector(rng: np.random.Generator, dims: int, radius: float) -> SparseVec:
    return random_ball_point(rng, dims, radius=radius).coords


class CompactificationExperiment(Experiment):
    """Frustum actions of both groups against function-space oracles, and their structural contrast"""

    name = ExperimentName.COMPACTIFICATION
    min_dims = 2

    def run_trial(
        self, config: ExperimentConfig, context, index: int, rng: np.random.Generator
    ) -> TrialRecord:
        dims = config.dims
        if index == 0:
            g, h = identity(), identity()
            ge, he = e_identity(), e_identity()
            v = SparseVec.basis(1)
        else:
            g, h = random_isometry(rng, dims), random_isometry(rng, dims)
            ge, he = random_euclidean(rng, dims, 0.5), random_euclidean(rng, dims, 0.5)
            v = random_hilbert_vector(rng, dims)

        F = random_frustum_point(rng, dims)
        sheet = random_frustum_point(rng, dims, sheet=True)
        grid = klein_grid(rng, dims, GRID_SIZE)
        probes = [random_hilbert_vector(rng, dims) for _ in range(GRID_SIZE)]
        x_fixed = _small_ball_vector(rng, dims, 0.2)

        defects: Dict[str, float] = {
            "pushforward": frustum_pushforward_defect(g, F, grid),
            "pushforward_sheet": frustum_pushforward_defect(g, sheet, grid),
            "group_law": frustum_distance(
                frustum_action(g, frustum_action(h, F)), frustum_action(compose(g, h), F)
            ),
            "sheet_level": abs(frustum_action(g, sheet).r - 1.0),
            "r_independence": ball_component_spread(g, x_fixed),
            "hilbert_group_law": frustum_distance(
                hilbert_frustum_action(ge, hilbert_frustum_action(he, F)),
                hilbert_frustum_action(e_compose(ge, he), F),
            ),
            "hilbert_pushforward": hilbert_pushforward_defect(ge, F, probes),
        }
        defect = max(defects.values())

        details = dict(defects)
        details["refit"] = refit_defect(g, F, grid)
        details["hilbert_level_gap"] = hilbert_level_gap(v, SparseVec.zero())
        if details["refit"] > REFIT_TOLERANCE:
            defect = max(defect, details["refit"])
        if details["hilbert_level_gap"] <= WITNESS_GAP:
            defect = max(defect, 1.0)

        inputs = {
            "g": g.block.tolist(),
            "h": h.block.tolist(),
            "F": [F.x.coords.items(), F.r],
            "sheet": sheet.x.coords.items(),
            "v": v.items(),
        }
        return trial_record(index, inputs, defect, ACTION_BOUND, details)


WEAK_SEQUENCE_LENGTH = 48
WEAK_FUNCTIONALS = 4
WEAK_ESCAPE = 0.5
WEAK_MARGIN = 8


def escaping_sequence(x: SparseVec, start: int, length: int) -> List[SparseVec]:
    """x + WEAK_ESCAPE e_{start + n}: weakly convergent to x, not in norm"""
    return [x + SparseVec.basis(start + n, WEAK_ESCAPE) for n in range(1, length + 1)]


class WeakContinuityExperiment(Experiment):
    """Continuity of the frustum action along g_n -> g and weakly convergent (x_n, r)"""

    name = ExperimentName.WEAK_CONTINUITY
    min_dims = 2

    def run_trial(
        self, config: ExperimentConfig, context, index: int, rng: np.random.Generator
    ) -> TrialRecord:
        dims = config.dims
        g = random_isometry(rng, dims)
        x = _small_ball_vector(rng, dims, 0.4)
        floor = float(np.sqrt(x.dot(x) + WEAK_ESCAPE ** 2))
        r = float(rng.uniform(floor, 1.0))
        axis = Geodesic(base=HPoint.origin(), direction=SparseVec.basis(1))

        xs = escaping_sequence(x, dims, WEAK_SEQUENCE_LENGTH)
        sequence = [
            frustum_action(compose(g, transvection(axis, 2.0 ** -n)), FrustumPoint.of(xn, r))
            for n, xn in enumerate(xs, start=1)
        ]
        candidate = frustum_action(g, FrustumPoint.of(x, r))
        functionals = [
            random_ball_point(rng, dims + WEAK_MARGIN) for _ in range(WEAK_FUNCTIONALS)
        ]
        probe = weak_convergence_probe(sequence, candidate, functionals, threshold=ACTION_BOUND)

        details = {"first_defect": probe.defects[0], "tail": float(probe.tail)}
        inputs = {"g": g.block.tolist(), "x": x.items(), "r": r}
        return trial_record(index, inputs, probe.tail_defect, ACTION_BOUND, details)
