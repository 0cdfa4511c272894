"""
Steinhaus factorization experiment: two rotations bringing g x back to x
"""

import numpy as np

from lorentz_lab.core.errors import CollinearCenter
from lorentz_lab.geometry.isometry import (
    HypIsometry,
    apply,
    compose,
    identity,
    steinhaus_factor,
)
from lorentz_lab.geometry.lorentz_core import SparseVec, q_orthonormalize
from lorentz_lab.geometry.models import (
    Geodesic,
    HPoint,
    dist,
    eval_geodesic,
    initial_vector,
    midpoint,
)
from lorentz_lab.geometry.sampling import random_hpoint, random_isometry
from lorentz_lab.models.experiment import ExperimentConfig, ExperimentName, TrialRecord
from lorentz_lab.services.experiment_service import Experiment, trial_record

FIX_BOUND = 1e-8
CENTER_OFFSET = 0.7
BASE_DISTANCE = 1.0
AUXILIARY_PROBES = 3


def off_axis_center(x: HPoint, y: HPoint, rng: np.random.Generator, dims: int) -> HPoint:
    """Point at distance CENTER_OFFSET from the midpoint of [x, y], off the geodesic through them"""
    m = midpoint(x, y)
    spread = SparseVec.from_dense(range(1, dims + 1), rng.normal(size=dims))
    frame = q_orthonormalize([y.coords, spread], m.coords)
    return eval_geodesic(Geodesic(base=m, direction=frame.negatives[-1]), CENTER_OFFSET)


def partner_point(x: HPoint, rng: np.random.Generator, dims: int) -> HPoint:
    """Point at distance BASE_DISTANCE from x in a random direction"""
    direction = initial_vector(x, random_hpoint(rng, dims).coords)
    return eval_geodesic(Geodesic(base=x, direction=direction), BASE_DISTANCE)


def _coordinates(p: HPoint) -> list:
    return [[i, v] for i, v in p.coords.items()]


class SteinhausExperiment(Experiment):
    """Fix-defect of rho2 rho1 g at x; the last trial is a collinear-center control"""

    name = ExperimentName.STEINHAUS
    min_dims = 3

    def run_trial(
        self, config: ExperimentConfig, context, index: int, rng: np.random.Generator
    ) -> TrialRecord:
        dims = config.dims
        control = config.trials >= 3 and index == config.trials - 1
        g: HypIsometry = identity() if index == 0 else random_isometry(rng, dims, boost=0.05, spin=0.05)
        x = random_hpoint(rng, dims, scale=0.5)
        y = partner_point(x, rng, dims)
        z = midpoint(x, y) if control else off_axis_center(x, y, rng, dims)
        inputs = {
            "block": g.block.tolist(),
            "x": _coordinates(x),
            "y": _coordinates(y),
            "z": _coordinates(z),
        }

        try:
            rho1, rho2 = steinhaus_factor(g, x, y, z)
        except CollinearCenter:
            return trial_record(
                index, inputs, None, FIX_BOUND, excluded=True, reason="CollinearCenter"
            )

        product = compose(rho2, compose(rho1, g))
        defect = dist(apply(product, x), x)
        probes = [random_hpoint(rng, dims) for _ in range(AUXILIARY_PROBES)]
        details = {
            "displacement": dist(apply(g, x), x),
            "rho1_probe_displacement": max(dist(apply(rho1, p), p) for p in probes),
            "rho2_probe_displacement": max(dist(apply(rho2, p), p) for p in probes),
        }
        return trial_record(index, inputs, defect, FIX_BOUND, details)
